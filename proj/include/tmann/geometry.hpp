#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "tmann/common.hpp"
#include "tmann/report.hpp"

namespace tmann {

enum class SpaceKind { euclidean, spider_tree, maxnorm_plane };

/// A point of one of the concrete spaces. Vector points own their
/// coordinates; tree points are (ray, radius) on a spider of rays glued at
/// one origin. Radius zero is canonicalized to ray 0, so the origin has a
/// unique representation.
class Point {
 public:
  static Point vector(std::vector<double> coords);
  static Point tree(std::size_t ray, double radius);

  bool is_tree() const { return is_tree_; }
  const std::vector<double>& coords() const;
  std::size_t ray() const;
  double radius() const;

  std::string describe() const;

 private:
  Point() = default;
  bool is_tree_ = false;
  std::vector<double> coords_;
  std::size_t ray_ = 0;
  double radius_ = 0.0;
};

/// A geodesic space together with its convex-combination operation. The
/// three instances are Euclidean space of a fixed dimension, a spider tree
/// (finitely many rays glued at one origin) and the plane under the max
/// norm. Values are immutable; all operations are pure and safe to call
/// concurrently.
class Space {
 public:
  static Space euclidean(std::size_t dim, Tolerance tol = {});
  static Space spider_tree(std::size_t ray_count, Tolerance tol = {});
  static Space maxnorm_plane(Tolerance tol = {});

  SpaceKind kind() const { return kind_; }
  /// Coordinate count for vector spaces, ray count for the spider tree.
  std::size_t dimension() const { return dim_; }
  const Tolerance& tolerance() const { return tol_; }
  bool is_normed() const { return kind_ != SpaceKind::spider_tree; }
  std::string describe() const;

  /// Throws InputError when p or q does not belong to this space.
  double distance(const Point& p, const Point& q) const;

  /// The point at parameter t on the geodesic from x to y, i.e. the convex
  /// combination (1-t)x + ty. Satisfies d(x,result) = t d(x,y).
  /// Throws InputError when t is outside [0,1].
  Point combine(const Point& x, const Point& y, double t) const;

  /// Point equality up to the space's tolerance (never bitwise).
  bool close(const Point& p, const Point& q) const;

  Point origin() const;
  Point sample(std::mt19937_64& rng) const;

  /// Evaluates the four convexity axioms on random tuples. One entry per
  /// axiom with the max violation over all samples.
  ValidationReport check_axioms(std::size_t sample_count, u64 seed,
                                double tol) const;

  /// Evaluates the five geodesic-segment identities and inequalities that
  /// follow from the axioms (endpoint/interpolation identities and the
  /// two mixed-parameter bounds).
  ValidationReport check_segment_identities(std::size_t sample_count,
                                            u64 seed, double tol) const;

  void require_member(const Point& p, const char* what) const;

 private:
  Space(SpaceKind kind, std::size_t dim, Tolerance tol)
      : kind_(kind), dim_(dim), tol_(tol) {}

  SpaceKind kind_;
  std::size_t dim_;
  Tolerance tol_;
};

}  // namespace tmann
