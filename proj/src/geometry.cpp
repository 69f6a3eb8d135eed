#include "tmann/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tmann {

namespace {

std::string format_coords(const std::vector<double>& c) {
  std::string s = "(";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i > 0) s += ", ";
    s += format_double(c[i]);
  }
  return s + ")";
}

}  // namespace

Point Point::vector(std::vector<double> coords) {
  if (coords.empty()) throw InputError("vector point needs at least one coordinate");
  Point p;
  p.coords_ = std::move(coords);
  return p;
}

Point Point::tree(std::size_t ray, double radius) {
  if (!(radius >= 0.0)) throw InputError("tree point radius must be >= 0");
  Point p;
  p.is_tree_ = true;
  p.ray_ = radius == 0.0 ? 0 : ray;
  p.radius_ = radius;
  return p;
}

const std::vector<double>& Point::coords() const {
  if (is_tree_) throw InputError("tree point has no coordinates");
  return coords_;
}

std::size_t Point::ray() const {
  if (!is_tree_) throw InputError("vector point has no ray");
  return ray_;
}

double Point::radius() const {
  if (!is_tree_) throw InputError("vector point has no radius");
  return radius_;
}

std::string Point::describe() const {
  if (is_tree_) {
    return "ray " + std::to_string(ray_) + " @ " + format_double(radius_);
  }
  return format_coords(coords_);
}

Space Space::euclidean(std::size_t dim, Tolerance tol) {
  if (dim == 0) throw InputError("euclidean dimension must be >= 1");
  return Space(SpaceKind::euclidean, dim, tol);
}

Space Space::spider_tree(std::size_t ray_count, Tolerance tol) {
  if (ray_count == 0) throw InputError("spider tree needs at least one ray");
  return Space(SpaceKind::spider_tree, ray_count, tol);
}

Space Space::maxnorm_plane(Tolerance tol) {
  return Space(SpaceKind::maxnorm_plane, 2, tol);
}

std::string Space::describe() const {
  switch (kind_) {
    case SpaceKind::euclidean:
      return "euclidean(" + std::to_string(dim_) + ")";
    case SpaceKind::spider_tree:
      return "spider_tree(" + std::to_string(dim_) + ")";
    case SpaceKind::maxnorm_plane:
      return "maxnorm_plane";
  }
  return "?";
}

void Space::require_member(const Point& p, const char* what) const {
  if (kind_ == SpaceKind::spider_tree) {
    if (!p.is_tree()) {
      throw InputError(std::string(what) + ": expected a tree point in " + describe());
    }
    if (p.radius() > 0.0 && p.ray() >= dim_) {
      throw InputError(std::string(what) + ": ray index " + std::to_string(p.ray()) +
                       " out of range for " + describe());
    }
    return;
  }
  if (p.is_tree()) {
    throw InputError(std::string(what) + ": expected a vector point in " + describe());
  }
  if (p.coords().size() != dim_) {
    throw InputError(std::string(what) + ": dimension " +
                     std::to_string(p.coords().size()) + " does not match " + describe());
  }
}

double Space::distance(const Point& p, const Point& q) const {
  require_member(p, "distance");
  require_member(q, "distance");
  if (kind_ == SpaceKind::spider_tree) {
    // Same ray (or either point is the origin): along-ray distance.
    // Distinct rays: the geodesic passes through the origin.
    if (p.radius() == 0.0 || q.radius() == 0.0 || p.ray() == q.ray()) {
      return std::abs(p.radius() - q.radius());
    }
    return p.radius() + q.radius();
  }
  const auto& a = p.coords();
  const auto& b = q.coords();
  if (kind_ == SpaceKind::maxnorm_plane) {
    return std::max(std::abs(a[0] - b[0]), std::abs(a[1] - b[1]));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

Point Space::combine(const Point& x, const Point& y, double t) const {
  require_member(x, "combine");
  require_member(y, "combine");
  if (!(t >= 0.0 && t <= 1.0)) {
    throw InputError("combine parameter " + format_double(t) + " outside [0,1]");
  }
  if (kind_ != SpaceKind::spider_tree) {
    const auto& a = x.coords();
    const auto& b = y.coords();
    std::vector<double> c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = (1.0 - t) * a[i] + t * b[i];
    return Point::vector(std::move(c));
  }
  if (x.radius() == 0.0 || y.radius() == 0.0 || x.ray() == y.ray()) {
    const std::size_t ray = x.radius() > 0.0 ? x.ray() : y.ray();
    return Point::tree(ray, (1.0 - t) * x.radius() + t * y.radius());
  }
  // Distinct rays: walk t*d(x,y) from x, through the origin if needed.
  const double walked = t * (x.radius() + y.radius());
  if (walked <= x.radius()) return Point::tree(x.ray(), x.radius() - walked);
  return Point::tree(y.ray(), walked - x.radius());
}

bool Space::close(const Point& p, const Point& q) const {
  const double d = distance(p, q);
  double scale = 0.0;
  if (kind_ == SpaceKind::spider_tree) {
    scale = std::max(p.radius(), q.radius());
  } else {
    for (double v : p.coords()) scale = std::max(scale, std::abs(v));
    for (double v : q.coords()) scale = std::max(scale, std::abs(v));
  }
  return d <= tol_.slack(scale);
}

Point Space::origin() const {
  if (kind_ == SpaceKind::spider_tree) return Point::tree(0, 0.0);
  return Point::vector(std::vector<double>(dim_, 0.0));
}

Point Space::sample(std::mt19937_64& rng) const {
  if (kind_ == SpaceKind::spider_tree) {
    std::uniform_int_distribution<std::size_t> ray(0, dim_ - 1);
    std::uniform_real_distribution<double> radius(0.0, 5.0);
    // Exact origins now and then; degenerate tuples are allowed.
    std::uniform_int_distribution<int> snap(0, 19);
    const double r = snap(rng) == 0 ? 0.0 : radius(rng);
    return Point::tree(ray(rng), r);
  }
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  std::vector<double> c(dim_);
  for (auto& v : c) v = coord(rng);
  return Point::vector(std::move(c));
}

namespace {

double sample_parameter(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> snap(0, 9);
  const int s = snap(rng);
  if (s == 0) return 0.0;
  if (s == 1) return 1.0;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  return uniform(rng);
}

struct WorstCase {
  double violation = -1e300;
  std::string witness;

  void update(double v, const std::string& w) {
    if (v > violation) {
      violation = v;
      witness = w;
    }
  }

  CheckEntry entry(std::string name, std::string relation, double tol) const {
    CheckEntry e;
    e.name = std::move(name);
    e.relation = std::move(relation);
    e.worst = violation;
    e.pass = violation <= tol;
    if (!e.pass) e.witness = witness;
    return e;
  }
};

std::string tuple_witness(const Point& x, const Point& y, double l, double lt) {
  return "x=" + x.describe() + " y=" + y.describe() + " t=" + format_double(l) +
         " t'=" + format_double(lt);
}

}  // namespace

ValidationReport Space::check_axioms(std::size_t sample_count, u64 seed,
                                     double tol) const {
  if (sample_count == 0) throw InputError("sample_count must be >= 1");
  std::mt19937_64 rng(seed);
  WorstCase w1, w2, w3, w4;
  for (std::size_t i = 0; i < sample_count; ++i) {
    const Point x = sample(rng);
    const Point y = sample(rng);
    const Point z = sample(rng);
    const Point w = sample(rng);
    const double l = sample_parameter(rng);
    const double lt = sample_parameter(rng);

    const Point xy = combine(x, y, l);
    w1.update(distance(z, xy) - ((1.0 - l) * distance(z, x) + l * distance(z, y)),
              tuple_witness(x, y, l, lt) + " z=" + z.describe());
    w2.update(std::abs(distance(xy, combine(x, y, lt)) - std::abs(l - lt) * distance(x, y)),
              tuple_witness(x, y, l, lt));
    w3.update(distance(xy, combine(y, x, 1.0 - l)), tuple_witness(x, y, l, lt));
    w4.update(distance(combine(x, z, l), combine(y, w, l)) -
                  ((1.0 - l) * distance(x, y) + l * distance(z, w)),
              tuple_witness(x, y, l, lt) + " z=" + z.describe() + " w=" + w.describe());
  }
  ValidationReport report;
  report.add(w1.entry("W1", "d(z,(1-t)x+ty) <= (1-t)d(z,x)+t d(z,y)", tol));
  report.add(w2.entry("W2", "d((1-t)x+ty,(1-t')x+t'y) = |t-t'| d(x,y)", tol));
  report.add(w3.entry("W3", "(1-t)x+ty = ty+(1-t)x", tol));
  report.add(w4.entry("W4", "d((1-t)x+tz,(1-t)y+tw) <= (1-t)d(x,y)+t d(z,w)", tol));
  return report;
}

ValidationReport Space::check_segment_identities(std::size_t sample_count,
                                                 u64 seed, double tol) const {
  if (sample_count == 0) throw InputError("sample_count must be >= 1");
  std::mt19937_64 rng(seed);
  WorstCase s1, s2, s3, s4, s5;
  for (std::size_t i = 0; i < sample_count; ++i) {
    const Point x = sample(rng);
    const Point y = sample(rng);
    const Point z = sample(rng);
    const Point w = sample(rng);
    const double l = sample_parameter(rng);
    const double lt = sample_parameter(rng);
    const std::string wit = tuple_witness(x, y, l, lt);

    const Point xy = combine(x, y, l);
    const double dxy = distance(x, y);
    s1.update(std::max(std::abs(distance(x, xy) - l * dxy),
                       std::abs(distance(y, xy) - (1.0 - l) * dxy)),
              wit);
    s2.update(std::max(distance(combine(x, y, 0.0), x), distance(combine(x, y, 1.0), y)), wit);
    s3.update(distance(combine(x, x, l), x), wit);
    s4.update(distance(combine(x, z, l), combine(y, w, lt)) -
                  ((1.0 - l) * distance(x, y) + l * distance(z, w) +
                   std::abs(l - lt) * distance(y, w)),
              wit + " z=" + z.describe() + " w=" + w.describe());
    s5.update(distance(combine(x, z, l), combine(x, w, lt)) -
                  (l * distance(z, w) + std::abs(l - lt) * distance(x, w)),
              wit + " z=" + z.describe() + " w=" + w.describe());
  }
  ValidationReport report;
  report.add(s1.entry("segment-1", "d(x,(1-t)x+ty) = t d(x,y), d(y,.) = (1-t)d(x,y)", tol));
  report.add(s2.entry("segment-2", "1x+0y = x and 0x+1y = y", tol));
  report.add(s3.entry("segment-3", "(1-t)x+tx = x", tol));
  report.add(s4.entry("segment-4",
                      "d((1-t)x+tz,(1-t')y+t'w) <= (1-t)d(x,y)+t d(z,w)+|t-t'| d(y,w)", tol));
  report.add(s5.entry("segment-5",
                      "d((1-t)x+tz,(1-t')x+t'w) <= t d(z,w)+|t-t'| d(x,w)", tol));
  return report;
}

}  // namespace tmann
