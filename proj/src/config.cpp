#include "tmann/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace tmann {

namespace {

// ---------------------------------------------------------------------------
// Descriptor expressions: ident, number, ident(arg, ...), (num, num, ...).
// ---------------------------------------------------------------------------

struct Expr {
  std::string head;  // empty for a bare tuple or a plain number
  std::optional<double> number;
  std::vector<Expr> args;

  bool is_number() const { return number.has_value(); }
  bool is_word() const { return !head.empty() && args.empty() && !number; }
  bool is_call() const { return !head.empty() && !args.empty(); }
  bool is_tuple() const { return head.empty() && !number; }
};

struct ExprParser {
  const std::string& text;
  std::size_t pos = 0;
  const std::string& context;

  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError(context + ": " + msg + " in '" + text + "'");
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
      ++pos;
    }
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  Expr parse_value() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of value");
    const char c = text[pos];
    if (c == '(') return parse_tuple();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_word();
    return parse_number();
  }

  Expr parse_tuple() {
    Expr e;
    eat('(');
    if (eat(')')) fail("empty tuple");
    do {
      e.args.push_back(parse_value());
    } while (eat(','));
    if (!eat(')')) fail("missing ')'");
    return e;
  }

  Expr parse_word() {
    Expr e;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
      e.head.push_back(text[pos++]);
    }
    if (eat('(')) {
      if (eat(')')) fail("empty argument list for '" + e.head + "'");
      do {
        e.args.push_back(parse_value());
      } while (eat(','));
      if (!eat(')')) fail("missing ')' after '" + e.head + "'");
    }
    return e;
  }

  Expr parse_number() {
    skip_ws();
    const char* begin = text.data() + pos;
    const char* end = text.data() + text.size();
    double v = 0.0;
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{}) fail("expected a number");
    pos = static_cast<std::size_t>(res.ptr - text.data());
    Expr e;
    e.number = v;
    return e;
  }

  Expr parse_all() {
    Expr e = parse_value();
    skip_ws();
    if (pos != text.size()) fail("trailing characters");
    return e;
  }
};

Expr parse_expr(const std::string& text, const std::string& context) {
  ExprParser p{text, 0, context};
  return p.parse_all();
}

double expect_number(const Expr& e, const std::string& context) {
  if (!e.is_number()) throw InputError(context + ": expected a number");
  return *e.number;
}

u64 expect_natural(const Expr& e, const std::string& context) {
  const double v = expect_number(e, context);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1.8e19) {
    throw InputError(context + ": expected a natural number, got " +
                     format_double(v));
  }
  return static_cast<u64>(v);
}

// ---------------------------------------------------------------------------
// Raw key/value table with line tracking.
// ---------------------------------------------------------------------------

struct RawConfig {
  struct Item {
    std::string value;
    std::size_t line = 0;
    bool used = false;
  };
  std::string origin;
  std::map<std::string, Item> items;

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    const auto it = items.find(key);
    const std::string at = it == items.end()
                               ? origin
                               : origin + ":" + std::to_string(it->second.line);
    throw InputError(at + ": key '" + key + "': " + msg);
  }

  std::optional<std::string> get(const std::string& key) {
    auto it = items.find(key);
    if (it == items.end()) return std::nullopt;
    it->second.used = true;
    return it->second.value;
  }

  std::string require(const std::string& key) {
    auto v = get(key);
    if (!v) throw InputError(origin + ": missing required key '" + key + "'");
    return *v;
  }
};

RawConfig tokenize(const std::string& text, const std::string& origin) {
  RawConfig raw;
  raw.origin = origin;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string{};
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError(origin + ":" + std::to_string(lineno) +
                       ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw InputError(origin + ":" + std::to_string(lineno) +
                       ": expected 'key = value', got '" + line + "'");
    }
    if (raw.items.count(key)) {
      throw InputError(origin + ":" + std::to_string(lineno) + ": duplicate key '" +
                       key + "'");
    }
    raw.items[key] = {value, lineno, false};
  }
  return raw;
}

// ---------------------------------------------------------------------------
// Typed builders.
// ---------------------------------------------------------------------------

Space build_space(const Expr& e, const std::string& ctx) {
  if (e.is_word() && e.head == "maxnorm_plane") return Space::maxnorm_plane();
  if (e.is_call() && e.head == "euclidean" && e.args.size() == 1) {
    return Space::euclidean(expect_natural(e.args[0], ctx));
  }
  if (e.is_call() && e.head == "spider_tree" && e.args.size() == 1) {
    return Space::spider_tree(expect_natural(e.args[0], ctx));
  }
  throw InputError(ctx + ": unknown space; use euclidean(d), spider_tree(r) or "
                   "maxnorm_plane");
}

Point build_point(const Space& space, const Expr& e, const std::string& ctx) {
  if (e.is_call() && e.head == "tree" && e.args.size() == 2) {
    return Point::tree(expect_natural(e.args[0], ctx),
                       expect_number(e.args[1], ctx));
  }
  if (e.is_word() && e.head == "origin") return space.origin();
  if (e.is_tuple()) {
    std::vector<double> coords;
    coords.reserve(e.args.size());
    for (const auto& a : e.args) coords.push_back(expect_number(a, ctx));
    return Point::vector(std::move(coords));
  }
  if (e.is_number()) return Point::vector({*e.number});
  throw InputError(ctx + ": expected a point: (c1, ..., cd), tree(ray, radius) "
                   "or origin");
}

Schedule build_schedule(const Expr& e, const std::string& ctx) {
  if (e.is_word() && e.head == "harmonic_complement") {
    return Schedule::harmonic_complement();
  }
  if (e.is_call() && e.head == "constant" && e.args.size() == 1) {
    return Schedule::constant(expect_number(e.args[0], ctx));
  }
  if (e.is_call() && e.head == "table") {
    std::vector<double> values;
    for (const auto& a : e.args) values.push_back(expect_number(a, ctx));
    return Schedule::table(std::move(values));
  }
  throw InputError(ctx + ": unknown schedule; use constant(c), "
                   "harmonic_complement or table(v0, v1, ...)");
}

Map build_map(const Space& space, const Expr& e, const std::string& ctx) {
  if (e.is_word() && e.head == "identity") return Map::identity(space);
  if (e.is_call() && e.head == "rotation" && e.args.size() >= 2) {
    const double angle = expect_number(e.args[0], ctx);
    std::vector<double> center;
    for (std::size_t i = 1; i < e.args.size(); ++i) {
      center.push_back(expect_number(e.args[i], ctx));
    }
    return Map::rotation(space, angle, Point::vector(std::move(center)));
  }
  if (e.is_call() && e.head == "ball_projection" && e.args.size() >= 2) {
    std::vector<double> center;
    for (std::size_t i = 0; i + 1 < e.args.size(); ++i) {
      center.push_back(expect_number(e.args[i], ctx));
    }
    const double radius = expect_number(e.args.back(), ctx);
    return Map::ball_projection(space, Point::vector(std::move(center)), radius);
  }
  if (e.is_call() && e.head == "halfspace_projection" && e.args.size() >= 2) {
    std::vector<double> normal;
    for (std::size_t i = 0; i + 1 < e.args.size(); ++i) {
      normal.push_back(expect_number(e.args[i], ctx));
    }
    return Map::halfspace_projection(space, std::move(normal),
                                     expect_number(e.args.back(), ctx));
  }
  if (e.is_call() && e.head == "ray_permutation") {
    std::vector<std::size_t> perm;
    for (const auto& a : e.args) perm.push_back(expect_natural(a, ctx));
    return Map::ray_permutation(space, std::move(perm));
  }
  if (e.is_call() && e.head == "convex_combination" && e.args.size() == 3) {
    const double w = expect_number(e.args[0], ctx);
    return Map::convex_combination(space, build_map(space, e.args[1], ctx),
                                   build_map(space, e.args[2], ctx), w);
  }
  if (e.is_call() && e.head == "compose" && e.args.size() == 2) {
    return Map::compose(space, build_map(space, e.args[0], ctx),
                        build_map(space, e.args[1], ctx));
  }
  throw InputError(ctx + ": unknown map descriptor '" + e.head + "'");
}

NatRate build_rate(const Expr& e, const std::string& ctx) {
  if (e.is_word() && e.head == "identity") return NatRate::identity();
  if (e.is_call() && e.head == "constant" && e.args.size() == 1) {
    return NatRate::constant(expect_natural(e.args[0], ctx));
  }
  if (e.is_call() && e.head == "affine" && e.args.size() == 2) {
    return NatRate::affine(expect_natural(e.args[0], ctx),
                           expect_natural(e.args[1], ctx));
  }
  if (e.is_call() && e.head == "table") {
    std::vector<u64> values;
    for (const auto& a : e.args) values.push_back(expect_natural(a, ctx));
    return NatRate::table(std::move(values));
  }
  throw InputError(ctx + ": unknown rate; use identity, constant(c), "
                   "affine(a,b) or table(v0, v1, ...)");
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RawConfig raw = tokenize(text, origin);
  RunConfig config;
  Scenario& sc = config.scenario;

  const auto expr_of = [&](const std::string& key,
                           const std::string& value) -> Expr {
    try {
      return parse_expr(value, key);
    } catch (const InputError& err) {
      raw.fail(key, err.what());
    }
  };

  sc.space = build_space(expr_of("space", raw.require("space")), "space");
  sc.map = build_map(sc.space, expr_of("map", raw.require("map")), "map");
  sc.anchor = build_point(sc.space, expr_of("u", raw.require("u")), "u");
  sc.start = build_point(sc.space, expr_of("x0", raw.require("x0")), "x0");
  sc.lambda = build_schedule(expr_of("lambda", raw.require("lambda")), "lambda");
  sc.beta = build_schedule(expr_of("beta", raw.require("beta")), "beta");
  if (auto v = raw.get("name")) sc.name = *v;
  if (auto v = raw.get("fixed_point")) {
    sc.fixed_point = build_point(sc.space, expr_of("fixed_point", *v), "fixed_point");
  }
  if (sc.lambda.is_constant()) config.lambda_constant = sc.lambda.eval(0);

  u128 dist_bound = 0;
  if (auto v = raw.get("dist_bound")) {
    dist_bound = expect_natural(expr_of("dist_bound", *v), "dist_bound");
    if (dist_bound == 0) raw.fail("dist_bound", "must be >= 1");
  }

  const std::string bundle = raw.require("bundle");
  if (bundle == "corollary") {
    if (!config.lambda_constant || !sc.beta.is_harmonic_complement()) {
      raw.fail("bundle",
               "the corollary preset needs lambda = constant(c) with c in (0,1] "
               "and beta = harmonic_complement");
    }
    config.corollary_preset = true;
    // dist_bound may still be defaulted from the fixed point in finalize;
    // build the preset bundle afterwards (cmd layer re-derives it), here we
    // only record the shape with a placeholder when unset.
    sc.moduli = quadratic_family_bundle(dist_bound == 0 ? 1 : dist_bound,
                                        *config.lambda_constant);
    sc.moduli.dist_bound = dist_bound;  // 0 = derive from the fixed point
  } else if (bundle == "explicit") {
    ModuliBundle& m = sc.moduli;
    bool numeric_sum_div = false;
    if (auto v = raw.get("beta_sum_div")) {
      if (*v == "numeric") {
        numeric_sum_div = true;  // tabulated once the horizon is known, below
      } else {
        m.beta_sum_div = build_rate(expr_of("beta_sum_div", *v), "beta_sum_div");
      }
    }
    config.numeric_sum_div = numeric_sum_div;
    if (auto v = raw.get("beta_prod_rate")) {
      m.beta_prod_rate = build_rate(expr_of("beta_prod_rate", *v), "beta_prod_rate");
    }
    if (auto v = raw.get("beta_diff_mod")) {
      m.beta_diff_mod = build_rate(expr_of("beta_diff_mod", *v), "beta_diff_mod");
    }
    if (auto v = raw.get("lambda_diff_mod")) {
      m.lambda_diff_mod = build_rate(expr_of("lambda_diff_mod", *v), "lambda_diff_mod");
    }
    if (auto v = raw.get("beta_to_one")) {
      m.beta_to_one = build_rate(expr_of("beta_to_one", *v), "beta_to_one");
    }
    if (auto v = raw.get("prod_floor")) {
      m.prod_floor = build_rate(expr_of("prod_floor", *v), "prod_floor");
    }
    if (auto v = raw.get("inv_lambda")) {
      m.inv_lambda = expect_natural(expr_of("inv_lambda", *v), "inv_lambda");
    }
    if (auto v = raw.get("inv_lambda_from")) {
      m.inv_lambda_from =
          expect_natural(expr_of("inv_lambda_from", *v), "inv_lambda_from");
    }
    m.dist_bound = dist_bound;
  } else {
    raw.fail("bundle", "expected 'corollary' or 'explicit'");
  }

  if (auto v = raw.get("horizon")) {
    config.horizon = expect_natural(expr_of("horizon", *v), "horizon");
    if (config.horizon == 0) raw.fail("horizon", "must be >= 1");
  }
  if (auto v = raw.get("k_max")) {
    config.k_max = expect_natural(expr_of("k_max", *v), "k_max");
  }
  if (auto v = raw.get("slack")) {
    config.slack = expect_number(expr_of("slack", *v), "slack");
    if (!(config.slack >= 0.0)) raw.fail("slack", "must be >= 0");
  }
  if (auto v = raw.get("stride")) {
    config.stride = expect_natural(expr_of("stride", *v), "stride");
    if (config.stride == 0) raw.fail("stride", "must be >= 1");
  }
  if (auto v = raw.get("seed")) {
    config.seed = expect_natural(expr_of("seed", *v), "seed");
  }
  if (auto v = raw.get("samples")) {
    config.sample_count = expect_natural(expr_of("samples", *v), "samples");
    if (config.sample_count == 0) raw.fail("samples", "must be >= 1");
  }
  if (auto v = raw.get("point_stride")) {
    config.point_stride = expect_natural(expr_of("point_stride", *v), "point_stride");
  }
  if (auto v = raw.get("out")) config.out_dir = *v;

  const auto toggle = [&](const char* key, bool& flag) {
    if (auto v = raw.get(key)) {
      if (*v == "on" || *v == "1") {
        flag = true;
      } else if (*v == "off" || *v == "0") {
        flag = false;
      } else {
        raw.fail(key, "expected on/off");
      }
    }
  };
  toggle("check_axioms", config.check_axioms);
  toggle("check_moduli", config.check_moduli);
  toggle("check_inequalities", config.check_inequalities);
  toggle("check_rates", config.check_rates);

  // A deferred numeric divergence rate needs the final horizon.
  if (config.numeric_sum_div) {
    sc.moduli.beta_sum_div = numeric_beta_sum_div(sc.beta, config.horizon);
  }

  for (const auto& [key, item] : raw.items) {
    if (!item.used) {
      throw InputError(raw.origin + ":" + std::to_string(item.line) +
                       ": unknown key '" + key + "'");
    }
  }

  finalize_scenario(sc);
  if (config.corollary_preset) {
    // Rebuild the preset with the final dist_bound (finalize may have
    // derived it from the fixed point); prod_floor depends on it.
    const bool verified = sc.moduli.dist_bound_verified;
    const u128 final_bound = sc.moduli.dist_bound;
    sc.moduli = quadratic_family_bundle(final_bound, *config.lambda_constant);
    sc.moduli.dist_bound_verified = verified;
  }
  return config;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.filename().string());
}

void apply_override(RunConfig& config, const std::string& key,
                    const std::string& value) {
  if (key == "out") {
    config.out_dir = value;
    return;
  }
  const Expr e = parse_expr(value, "--" + key);
  if (key == "horizon") {
    config.horizon = expect_natural(e, key);
    if (config.horizon == 0) throw InputError("--horizon must be >= 1");
  } else if (key == "kmax") {
    config.k_max = expect_natural(e, key);
  } else if (key == "slack") {
    config.slack = expect_number(e, key);
  } else if (key == "stride") {
    config.stride = expect_natural(e, key);
    if (config.stride == 0) throw InputError("--stride must be >= 1");
  } else if (key == "seed") {
    config.seed = expect_natural(e, key);
  } else {
    throw InputError("unknown override --" + key);
  }
}

}  // namespace tmann
