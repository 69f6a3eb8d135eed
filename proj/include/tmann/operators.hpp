#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tmann/geometry.hpp"

namespace tmann {

struct MapNode;

/// A self-map of a concrete space, built from a small set of descriptors
/// (isometries, metric projections, and the two closure operations). Maps
/// are immutable after construction and carry an optional known fixed
/// point, used downstream to bound the orbit.
///
/// Nonexpansiveness is a property of the descriptor *and* the space it
/// acts on; check_nonexpansive() samples it. All built-in factories
/// produce nonexpansive maps on the spaces they accept.
class Map {
 public:
  static Map identity(const Space& space);
  /// Rotation by `angle` about `center` in the first two coordinates.
  /// Euclidean spaces of dimension >= 2; also accepted on the max-norm
  /// plane, where only quarter-turn multiples are isometries.
  static Map rotation(const Space& space, double angle, Point center);
  /// Metric projection onto the closed ball B(center, radius), Euclidean only.
  static Map ball_projection(const Space& space, Point center, double radius);
  /// Metric projection onto {x : <normal,x> <= offset}, Euclidean only.
  static Map halfspace_projection(const Space& space, std::vector<double> normal,
                                  double offset);
  /// Radius-preserving permutation of the spider's rays.
  static Map ray_permutation(const Space& space, std::vector<std::size_t> perm);
  /// x -> (1-weight)*a(x) + weight*b(x), realized through the space's
  /// convex combination.
  static Map convex_combination(const Space& space, Map a, Map b, double weight);
  /// x -> outer(inner(x)).
  static Map compose(const Space& space, Map outer, Map inner);

  Point apply(const Space& space, const Point& x) const;

  const std::optional<Point>& known_fixed_point() const { return fixed_point_; }
  Map with_fixed_point(const Space& space, Point p) const;

  /// Max over sampled pairs of d(Tx,Ty) - d(x,y); passes when <= tol.
  ValidationReport check_nonexpansive(const Space& space, std::size_t sample_count,
                                      u64 seed, double tol) const;

  std::string describe() const;

 private:
  Map(std::shared_ptr<const MapNode> node, std::optional<Point> fp)
      : node_(std::move(node)), fixed_point_(std::move(fp)) {}

  std::shared_ptr<const MapNode> node_;
  std::optional<Point> fixed_point_;
};

}  // namespace tmann
