#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tmann/geometry.hpp"
#include "tmann/operators.hpp"
#include "tmann/schedule.hpp"

namespace tmann {

/// Everything needed to run one Tikhonov-Mann orbit: the space, the
/// nonexpansive map, the anchor u, the start x0, the two parameter
/// schedules and their quantitative moduli. `finalize` validates the data,
/// derives the orbit bound from a known fixed point and defaults
/// dist_bound from it.
struct Scenario {
  std::string name = "scenario";
  Space space = Space::euclidean(2);
  Map map = Map::identity(Space::euclidean(2));
  Point anchor = Point::vector({0.0, 0.0});  // u
  Point start = Point::vector({0.0, 0.0});   // x0
  Schedule lambda = Schedule::constant(0.5);
  Schedule beta = Schedule::harmonic_complement();
  ModuliBundle moduli;
  std::optional<Point> fixed_point;

  /// max(d(x0,p), d(u,p)) when a fixed point is known.
  std::optional<double> orbit_bound() const;
};

/// Validates membership and the fixed point, and fills
/// moduli.dist_bound = max(1, ceil(orbit bound)) unless the caller already
/// supplied a (larger) value. Throws InputError on inconsistent data.
void finalize_scenario(Scenario& scenario);

/// One step of the iteration:
///   y      = (1-beta_n) u + beta_n x
///   x_next = (1-lambda_n) y + lambda_n T(y)
std::pair<Point, Point> tikhonov_mann_step(const Space& space, const Map& map,
                                           const Point& anchor, const Point& x,
                                           double lambda_n, double beta_n);

/// The orbit with every distance the analysis needs, recorded densely.
/// Points themselves are kept only at a stride to bound memory. Columns of
/// length `horizon` are indexed by step n; fixed_gap has one extra entry
/// for the final iterate.
struct IterationTrace {
  std::size_t horizon = 0;
  bool has_fixed_point = false;
  double orbit_bound = 0.0;     // M = max(d(x0,p), d(u,p)); 0 when unknown
  double anchor_fixed_gap = 0.0;  // d(u,p)

  std::vector<double> lambda;      // lambda_n
  std::vector<double> beta;        // beta_n
  std::vector<double> step_gap;    // d(x_n, x_{n+1})
  std::vector<double> t_gap;       // d(x_n, T x_n)
  std::vector<double> xy_gap;      // d(x_n, y_n)
  std::vector<double> anchor_gap;  // d(x_n, u)
  std::vector<double> anchor_t_gap;  // d(u, T x_n)
  std::vector<double> y_step_gap;  // d(y_n, y_{n+1}), length horizon-1
  std::vector<double> y_t_gap;     // d(y_n, T y_n)
  std::vector<double> y_fixed_gap;  // d(y_n, p), empty when p unknown
  std::vector<double> fixed_gap;    // d(x_n, p), length horizon+1

  std::vector<std::size_t> point_index;
  std::vector<Point> points;  // x at the sampled indices
};

/// Runs the iteration for `horizon` steps. Deterministic; propagates
/// schedule/input errors from the step.
IterationTrace run_trace(const Scenario& scenario, std::size_t horizon,
                         std::size_t point_stride = 1000);

/// For normed spaces with anchor u = 0 the iteration collapses to
///   x_{n+1} = (1-lambda_n) beta_n x_n + lambda_n T(beta_n x_n).
/// Runs that scalar recurrence independently and compares it step by step
/// against the orbit; also checks y_n against beta_n * x_n.
ValidationReport check_modified_mann_equivalence(const Scenario& scenario,
                                                 std::size_t horizon,
                                                 double tol = 1e-12);

}  // namespace tmann
