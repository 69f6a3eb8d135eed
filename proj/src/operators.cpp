#include "tmann/operators.hpp"

#include <algorithm>
#include <cmath>

namespace tmann {

struct MapNode {
  enum class Kind {
    identity,
    rotation,
    ball_projection,
    halfspace_projection,
    ray_permutation,
    convex_combination,
    compose,
  };

  Kind kind = Kind::identity;
  double angle = 0.0;
  Point center = Point::vector({0.0});
  double radius = 0.0;
  std::vector<double> normal;
  double offset = 0.0;
  std::vector<std::size_t> perm;
  double weight = 0.0;
  std::shared_ptr<const MapNode> left, right;
};

namespace {

using Node = MapNode;

Point apply_rotation(const Node& node, const Point& x) {
  const auto& c = node.center.coords();
  std::vector<double> v = x.coords();
  const double dx = v[0] - c[0];
  const double dy = v[1] - c[1];
  const double cs = std::cos(node.angle);
  const double sn = std::sin(node.angle);
  v[0] = c[0] + cs * dx - sn * dy;
  v[1] = c[1] + sn * dx + cs * dy;
  return Point::vector(std::move(v));
}

Point apply_ball_projection(const Node& node, const Point& x) {
  const auto& c = node.center.coords();
  std::vector<double> v = x.coords();
  double norm2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = v[i] - c[i];
    norm2 += d * d;
  }
  const double norm = std::sqrt(norm2);
  if (norm <= node.radius) return Point::vector(std::move(v));
  const double scale = node.radius / norm;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = c[i] + scale * (v[i] - c[i]);
  return Point::vector(std::move(v));
}

Point apply_halfspace_projection(const Node& node, const Point& x) {
  std::vector<double> v = x.coords();
  double dot = 0.0;
  double norm2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    dot += node.normal[i] * v[i];
    norm2 += node.normal[i] * node.normal[i];
  }
  const double excess = dot - node.offset;
  if (excess <= 0.0) return Point::vector(std::move(v));
  const double scale = excess / norm2;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= scale * node.normal[i];
  return Point::vector(std::move(v));
}

Point apply_node(const Node& node, const Space& space, const Point& x) {
  switch (node.kind) {
    case Node::Kind::identity:
      return x;
    case Node::Kind::rotation:
      return apply_rotation(node, x);
    case Node::Kind::ball_projection:
      return apply_ball_projection(node, x);
    case Node::Kind::halfspace_projection:
      return apply_halfspace_projection(node, x);
    case Node::Kind::ray_permutation:
      if (x.radius() == 0.0) return x;
      return Point::tree(node.perm[x.ray()], x.radius());
    case Node::Kind::convex_combination:
      return space.combine(apply_node(*node.left, space, x),
                           apply_node(*node.right, space, x), node.weight);
    case Node::Kind::compose:
      return apply_node(*node.left, space, apply_node(*node.right, space, x));
  }
  throw InputError("corrupt map descriptor");
}

std::string describe_node(const Node& node) {
  switch (node.kind) {
    case Node::Kind::identity:
      return "identity";
    case Node::Kind::rotation:
      return "rotation(" + format_double(node.angle) + " about " +
             node.center.describe() + ")";
    case Node::Kind::ball_projection:
      return "ball_projection(" + node.center.describe() + ", r=" +
             format_double(node.radius) + ")";
    case Node::Kind::halfspace_projection:
      return "halfspace_projection";
    case Node::Kind::ray_permutation: {
      std::string s = "ray_permutation(";
      for (std::size_t i = 0; i < node.perm.size(); ++i) {
        if (i > 0) s += " ";
        s += std::to_string(node.perm[i]);
      }
      return s + ")";
    }
    case Node::Kind::convex_combination:
      return "convex_combination(" + format_double(node.weight) + ", " +
             describe_node(*node.left) + ", " + describe_node(*node.right) + ")";
    case Node::Kind::compose:
      return "compose(" + describe_node(*node.left) + ", " +
             describe_node(*node.right) + ")";
  }
  return "?";
}

void require_vector_space(const Space& space, const char* what) {
  if (space.kind() == SpaceKind::spider_tree) {
    throw InputError(std::string(what) + " is not defined on " + space.describe());
  }
}

void require_euclidean(const Space& space, const char* what) {
  if (space.kind() != SpaceKind::euclidean) {
    throw InputError(std::string(what) + " requires a euclidean space, got " +
                     space.describe());
  }
}

}  // namespace

Map Map::identity(const Space& space) {
  auto node = std::make_shared<Node>();
  node->kind = Node::Kind::identity;
  return Map(std::move(node), space.origin());
}

Map Map::rotation(const Space& space, double angle, Point center) {
  require_vector_space(space, "rotation");
  if (space.dimension() < 2) throw InputError("rotation needs dimension >= 2");
  space.require_member(center, "rotation center");
  auto node = std::make_shared<Node>();
  node->kind = Node::Kind::rotation;
  node->angle = angle;
  node->center = center;
  return Map(std::move(node), std::move(center));
}

Map Map::ball_projection(const Space& space, Point center, double radius) {
  require_euclidean(space, "ball_projection");
  space.require_member(center, "ball center");
  if (!(radius > 0.0)) throw InputError("ball radius must be > 0");
  auto node = std::make_shared<Node>();
  node->kind = Node::Kind::ball_projection;
  node->center = center;
  node->radius = radius;
  return Map(std::move(node), std::move(center));
}

Map Map::halfspace_projection(const Space& space, std::vector<double> normal,
                              double offset) {
  require_euclidean(space, "halfspace_projection");
  if (normal.size() != space.dimension()) {
    throw InputError("halfspace normal dimension does not match the space");
  }
  double norm2 = 0.0;
  for (double v : normal) norm2 += v * v;
  if (!(norm2 > 0.0)) throw InputError("halfspace normal must be nonzero");
  // The boundary point closest to the origin is fixed by the projection.
  std::vector<double> fp(normal.size());
  for (std::size_t i = 0; i < normal.size(); ++i) fp[i] = offset / norm2 * normal[i];
  auto node = std::make_shared<Node>();
  node->kind = Node::Kind::halfspace_projection;
  node->normal = std::move(normal);
  node->offset = offset;
  return Map(std::move(node), Point::vector(std::move(fp)));
}

Map Map::ray_permutation(const Space& space, std::vector<std::size_t> perm) {
  if (space.kind() != SpaceKind::spider_tree) {
    throw InputError("ray_permutation requires a spider tree, got " + space.describe());
  }
  if (perm.size() != space.dimension()) {
    throw InputError("ray permutation size does not match the ray count");
  }
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t v : perm) {
    if (v >= perm.size() || seen[v]) throw InputError("ray permutation is not a bijection");
    seen[v] = true;
  }
  auto node = std::make_shared<Node>();
  node->kind = Node::Kind::ray_permutation;
  node->perm = std::move(perm);
  return Map(std::move(node), space.origin());
}

Map Map::convex_combination(const Space& space, Map a, Map b, double weight) {
  if (!(weight >= 0.0 && weight <= 1.0)) {
    throw InputError("convex combination weight outside [0,1]");
  }
  std::optional<Point> fp;
  if (a.fixed_point_ && b.fixed_point_ &&
      space.close(*a.fixed_point_, *b.fixed_point_)) {
    fp = a.fixed_point_;
  }
  auto node = std::make_shared<Node>();
  node->kind = Node::Kind::convex_combination;
  node->weight = weight;
  node->left = a.node_;
  node->right = b.node_;
  return Map(std::move(node), std::move(fp));
}

Map Map::compose(const Space& space, Map outer, Map inner) {
  std::optional<Point> fp;
  if (outer.fixed_point_ && inner.fixed_point_ &&
      space.close(*outer.fixed_point_, *inner.fixed_point_)) {
    fp = inner.fixed_point_;
  }
  auto node = std::make_shared<Node>();
  node->kind = Node::Kind::compose;
  node->left = outer.node_;
  node->right = inner.node_;
  return Map(std::move(node), std::move(fp));
}

Point Map::apply(const Space& space, const Point& x) const {
  space.require_member(x, "map argument");
  return apply_node(*node_, space, x);
}

Map Map::with_fixed_point(const Space& space, Point p) const {
  space.require_member(p, "fixed point");
  return Map(node_, std::move(p));
}

ValidationReport Map::check_nonexpansive(const Space& space,
                                         std::size_t sample_count, u64 seed,
                                         double tol) const {
  if (sample_count == 0) throw InputError("sample_count must be >= 1");
  std::mt19937_64 rng(seed);
  double worst = -1e300;
  std::string witness;
  for (std::size_t i = 0; i < sample_count; ++i) {
    const Point x = space.sample(rng);
    const Point y = space.sample(rng);
    const double v = space.distance(apply(space, x), apply(space, y)) -
                     space.distance(x, y);
    if (v > worst) {
      worst = v;
      witness = "x=" + x.describe() + " y=" + y.describe();
    }
  }
  ValidationReport report;
  CheckEntry e;
  e.name = "nonexpansive";
  e.relation = "d(Tx,Ty) <= d(x,y) for " + describe();
  e.worst = worst;
  e.pass = worst <= tol;
  if (!e.pass) e.witness = witness;
  report.add(std::move(e));
  return report;
}

std::string Map::describe() const { return describe_node(*node_); }

}  // namespace tmann
