#include "tmann/iteration.hpp"

#include <cmath>

namespace tmann {

std::optional<double> Scenario::orbit_bound() const {
  if (!fixed_point) return std::nullopt;
  return std::max(space.distance(start, *fixed_point),
                  space.distance(anchor, *fixed_point));
}

void finalize_scenario(Scenario& scenario) {
  scenario.space.require_member(scenario.anchor, "anchor");
  scenario.space.require_member(scenario.start, "start");
  if (scenario.fixed_point) {
    const Point& p = *scenario.fixed_point;
    scenario.space.require_member(p, "fixed_point");
    const Point tp = scenario.map.apply(scenario.space, p);
    if (!scenario.space.close(tp, p)) {
      throw InputError("declared fixed point moves by " +
                       format_double(scenario.space.distance(tp, p)) + " under " +
                       scenario.map.describe());
    }
    const double m = *scenario.orbit_bound();
    const u128 needed = static_cast<u128>(std::ceil(m - 1e-12));
    const u128 floor = needed == 0 ? 1 : needed;
    if (scenario.moduli.dist_bound == 0) {
      scenario.moduli.dist_bound = floor;
    } else if (to_double_u128(scenario.moduli.dist_bound) < m - 1e-12) {
      throw InputError("dist_bound " + to_string_u128(scenario.moduli.dist_bound) +
                       " is below the orbit bound " + format_double(m));
    }
    scenario.moduli.dist_bound_verified = true;
  } else if (scenario.moduli.dist_bound == 0) {
    throw InputError(
        "no fixed point is known, so dist_bound must be supplied explicitly");
  } else {
    scenario.moduli.dist_bound_verified = false;
  }
}

std::pair<Point, Point> tikhonov_mann_step(const Space& space, const Map& map,
                                           const Point& anchor, const Point& x,
                                           double lambda_n, double beta_n) {
  if (!(lambda_n >= 0.0 && lambda_n <= 1.0)) {
    throw InputError("lambda_n outside [0,1]: " + format_double(lambda_n));
  }
  if (!(beta_n >= 0.0 && beta_n <= 1.0)) {
    throw InputError("beta_n outside [0,1]: " + format_double(beta_n));
  }
  Point y = space.combine(anchor, x, beta_n);
  Point ty = map.apply(space, y);
  Point x_next = space.combine(y, ty, lambda_n);
  return {std::move(y), std::move(x_next)};
}

IterationTrace run_trace(const Scenario& scenario, std::size_t horizon,
                         std::size_t point_stride) {
  if (horizon == 0) throw InputError("run_trace needs horizon >= 1");
  const Space& space = scenario.space;
  const Map& map = scenario.map;
  const Point& u = scenario.anchor;

  IterationTrace trace;
  trace.horizon = horizon;
  trace.has_fixed_point = scenario.fixed_point.has_value();
  if (trace.has_fixed_point) {
    trace.orbit_bound = *scenario.orbit_bound();
    trace.anchor_fixed_gap = space.distance(u, *scenario.fixed_point);
  }

  trace.lambda.resize(horizon);
  trace.beta.resize(horizon);
  trace.step_gap.resize(horizon);
  trace.t_gap.resize(horizon);
  trace.xy_gap.resize(horizon);
  trace.anchor_gap.resize(horizon);
  trace.anchor_t_gap.resize(horizon);
  trace.y_step_gap.resize(horizon > 1 ? horizon - 1 : 0);
  trace.y_t_gap.resize(horizon);
  if (trace.has_fixed_point) {
    trace.y_fixed_gap.resize(horizon);
    trace.fixed_gap.resize(horizon + 1);
  }

  Point x = scenario.start;
  std::optional<Point> prev_y;
  for (std::size_t n = 0; n < horizon; ++n) {
    const double ln = scenario.lambda.eval(n);
    const double bn = scenario.beta.eval(n);
    trace.lambda[n] = ln;
    trace.beta[n] = bn;

    if (point_stride > 0 && n % point_stride == 0) {
      trace.point_index.push_back(n);
      trace.points.push_back(x);
    }

    Point y = space.combine(u, x, bn);
    Point ty = map.apply(space, y);
    Point x_next = space.combine(y, ty, ln);
    Point tx = map.apply(space, x);

    trace.step_gap[n] = space.distance(x, x_next);
    trace.t_gap[n] = space.distance(x, tx);
    trace.xy_gap[n] = space.distance(x, y);
    trace.anchor_gap[n] = space.distance(x, u);
    trace.anchor_t_gap[n] = space.distance(u, tx);
    trace.y_t_gap[n] = space.distance(y, ty);
    if (n > 0) trace.y_step_gap[n - 1] = space.distance(*prev_y, y);
    if (trace.has_fixed_point) {
      trace.fixed_gap[n] = space.distance(x, *scenario.fixed_point);
      trace.y_fixed_gap[n] = space.distance(y, *scenario.fixed_point);
    }

    prev_y = std::move(y);
    x = std::move(x_next);
  }
  if (trace.has_fixed_point) {
    trace.fixed_gap[horizon] = space.distance(x, *scenario.fixed_point);
  }
  return trace;
}

ValidationReport check_modified_mann_equivalence(const Scenario& scenario,
                                                 std::size_t horizon,
                                                 double tol) {
  const Space& space = scenario.space;
  if (!space.is_normed()) {
    throw InputError("the scalar reduction needs a normed space, got " +
                     space.describe());
  }
  if (!space.close(scenario.anchor, space.origin())) {
    throw InputError("the scalar reduction needs anchor u = 0");
  }
  if (horizon == 0) throw InputError("horizon must be >= 1");

  const auto scale = [&](double s, const Point& p) {
    std::vector<double> c = p.coords();
    for (double& v : c) v *= s;
    return Point::vector(std::move(c));
  };
  const auto lerp = [&](double w, const Point& a, const Point& b) {
    // (1-w) a + w b written out in coordinates, bypassing Space::combine.
    std::vector<double> c(a.coords().size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      c[i] = (1.0 - w) * a.coords()[i] + w * b.coords()[i];
    }
    return Point::vector(std::move(c));
  };

  double worst_y = -1e300, worst_x = -1e300;
  std::string witness_y, witness_x;

  Point x = scenario.start;  // the orbit as the iteration computes it
  Point z = scenario.start;  // the scalar recurrence, evolved independently
  for (std::size_t n = 0; n < horizon; ++n) {
    const double ln = scenario.lambda.eval(n);
    const double bn = scenario.beta.eval(n);

    auto [y, x_next] = tikhonov_mann_step(space, scenario.map, scenario.anchor,
                                          x, ln, bn);
    const double dy = space.distance(y, scale(bn, x));
    if (dy > worst_y) {
      worst_y = dy;
      witness_y = "n=" + std::to_string(n);
    }

    const Point bz = scale(bn, z);
    const Point z_next = lerp(ln, bz, scenario.map.apply(space, bz));
    const double dx = space.distance(x_next, z_next);
    if (dx > worst_x) {
      worst_x = dx;
      witness_x = "n=" + std::to_string(n);
    }

    x = std::move(x_next);
    z = z_next;
  }

  ValidationReport report;
  CheckEntry ey;
  ey.name = "y_scalar_form";
  ey.relation = "y_n = beta_n * x_n when u = 0";
  ey.worst = worst_y;
  ey.pass = worst_y <= tol;
  if (!ey.pass) ey.witness = witness_y;
  report.add(std::move(ey));
  CheckEntry ex;
  ex.name = "scalar_recurrence";
  ex.relation = "x_{n+1} = (1-lambda_n) beta_n x_n + lambda_n T(beta_n x_n)";
  ex.worst = worst_x;
  ex.pass = worst_x <= tol;
  if (!ex.pass) ex.witness = witness_x;
  report.add(std::move(ex));
  return report;
}

}  // namespace tmann
