#include "tmann/schedule.hpp"

#include <algorithm>
#include <cmath>

namespace tmann {

Schedule Schedule::constant(double c) {
  if (!(c >= 0.0 && c <= 1.0)) {
    throw InputError("constant schedule value " + format_double(c) + " outside [0,1]");
  }
  return Schedule(Kind::constant, c, {});
}

Schedule Schedule::harmonic_complement() {
  return Schedule(Kind::harmonic_complement, 0.0, {});
}

Schedule Schedule::table(std::vector<double> values) {
  if (values.empty()) throw InputError("table schedule needs at least one value");
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InputError("table schedule value " + format_double(v) + " outside [0,1]");
    }
  }
  return Schedule(Kind::table, 0.0, std::move(values));
}

Schedule Schedule::with_override(std::size_t index, double value) const {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw InputError("override value outside [0,1]");
  }
  Schedule s = *this;
  s.override_ = {index, value};
  return s;
}

double Schedule::eval(std::size_t n) const {
  if (override_ && override_->first == n) return override_->second;
  switch (kind_) {
    case Kind::constant:
      return c_;
    case Kind::harmonic_complement:
      return 1.0 - 1.0 / (static_cast<double>(n) + 1.0);
    case Kind::table:
      return values_[std::min(n, values_.size() - 1)];
  }
  return 0.0;
}

bool Schedule::is_constant() const { return kind_ == Kind::constant && !override_; }

bool Schedule::is_harmonic_complement() const {
  return kind_ == Kind::harmonic_complement && !override_;
}

std::string Schedule::describe() const {
  std::string base;
  switch (kind_) {
    case Kind::constant:
      base = "constant(" + format_double(c_) + ")";
      break;
    case Kind::harmonic_complement:
      base = "harmonic_complement";
      break;
    case Kind::table:
      base = "table[" + std::to_string(values_.size()) + "]";
      break;
  }
  if (override_) {
    base += " with [" + std::to_string(override_->first) +
            "]=" + format_double(override_->second);
  }
  return base;
}

double partial_product(const Schedule& beta, std::size_t n) {
  long double prod = 1.0L;
  long double log_sum = 0.0L;
  bool log_mode = false;
  for (std::size_t i = 0; i <= n; ++i) {
    const double factor = beta.eval(i + 1);
    if (!(factor > 0.0)) {
      throw NumericError("partial_product: factor at index " + std::to_string(i + 1) +
                         " is not positive");
    }
    if (!log_mode && factor < 1e-8) {
      log_mode = true;
      log_sum = std::log(prod);
    }
    if (log_mode) {
      log_sum += std::log(static_cast<long double>(factor));
    } else {
      prod *= factor;
    }
  }
  return log_mode ? static_cast<double>(std::exp(log_sum))
                  : static_cast<double>(prod);
}

double diff_series_partial(const Schedule& s, std::size_t n) {
  long double sum = 0.0L;
  double prev = s.eval(0);
  for (std::size_t i = 0; i <= n; ++i) {
    const double next = s.eval(i + 1);
    sum += std::abs(next - prev);
    prev = next;
  }
  return static_cast<double>(sum);
}

NatRate numeric_beta_sum_div(const Schedule& beta, std::size_t horizon) {
  std::vector<u64> values;
  values.push_back(0);  // the empty requirement: any partial sum reaches 0
  long double sum = 0.0L;
  u64 next = 1;
  for (std::size_t m = 0; m <= horizon; ++m) {
    sum += 1.0L - static_cast<long double>(beta.eval(m));
    while (sum >= static_cast<long double>(next)) {
      values.push_back(static_cast<u64>(m));
      ++next;
    }
  }
  return NatRate::table_with_floor(std::move(values),
                                   static_cast<u128>(horizon) + 1);
}

ModuliBundle quadratic_family_bundle(u128 dist_bound, double lambda_value) {
  if (dist_bound == 0) throw InputError("dist_bound must be >= 1");
  ModuliBundle b;
  b.beta_prod_rate = NatRate::identity();
  b.beta_diff_mod = NatRate::identity();
  b.lambda_diff_mod = NatRate::constant(0);
  b.beta_to_one = NatRate::identity();
  b.inv_lambda = ceil_inv(lambda_value);
  b.inv_lambda_from = 0;
  const u128 step = checked_mul(24, dist_bound);
  b.prod_floor = NatRate::affine(step, checked_add(step, 1));
  b.dist_bound = dist_bound;
  return b;
}

namespace {

struct ConditionCheck {
  double worst = -1e300;
  std::string witness;
  bool skipped_tail = false;  // some k not checkable within the horizon

  void update(double violation, std::string w) {
    if (violation > worst) {
      worst = violation;
      witness = std::move(w);
    }
  }

  CheckEntry entry(std::string name, std::string relation, double slack) const {
    CheckEntry e;
    e.name = std::move(name);
    e.relation = std::move(relation);
    if (skipped_tail) e.relation += " (tail beyond horizon not checked)";
    e.worst = worst == -1e300 ? 0.0 : worst;
    e.pass = e.worst <= slack;
    if (!e.pass) e.witness = witness;
    return e;
  }
};

// Evaluates a rate at k, returning false when the value cannot be produced
// or does not fit in the horizon-indexable range.
bool rate_index(const NatRate& rate, u64 k, std::size_t horizon, std::size_t& out) {
  try {
    const RateValue v = rate.eval(static_cast<u128>(k));
    if (!v.exact || v.value > static_cast<u128>(horizon)) return false;
    out = static_cast<std::size_t>(v.value);
    return true;
  } catch (const HorizonError&) {
    return false;
  }
}

}  // namespace

ValidationReport validate_moduli(const ModuliBundle& bundle,
                                 const Schedule& lambda, const Schedule& beta,
                                 std::size_t horizon, u64 k_max, double slack) {
  if (horizon == 0) throw InputError("validate_moduli needs horizon >= 1");
  ValidationReport report;

  std::vector<double> beta_vals(horizon + 2), lambda_vals(horizon + 2);
  for (std::size_t n = 0; n < beta_vals.size(); ++n) {
    beta_vals[n] = beta.eval(n);
    lambda_vals[n] = lambda.eval(n);
  }

  // Prefix sums of 1-beta_n and of the two difference series; prefix
  // products of beta_{n+1} kept in log space.
  std::vector<double> one_minus_beta_sum(horizon + 1);
  std::vector<double> beta_diff_sum(horizon + 1), lambda_diff_sum(horizon + 1);
  std::vector<double> prod(horizon + 1);
  bool prod_valid = true;
  std::size_t first_zero_factor = 0;
  {
    long double s = 0.0L, bd = 0.0L, ld = 0.0L, lp = 0.0L;
    for (std::size_t n = 0; n <= horizon; ++n) {
      s += 1.0L - static_cast<long double>(beta_vals[n]);
      one_minus_beta_sum[n] = static_cast<double>(s);
      bd += std::abs(static_cast<long double>(beta_vals[n + 1]) - beta_vals[n]);
      beta_diff_sum[n] = static_cast<double>(bd);
      ld += std::abs(static_cast<long double>(lambda_vals[n + 1]) - lambda_vals[n]);
      lambda_diff_sum[n] = static_cast<double>(ld);
      if (prod_valid) {
        const double factor = beta_vals[n + 1];
        if (!(factor > 0.0)) {
          prod_valid = false;
          first_zero_factor = n + 1;
        } else {
          lp += std::log(static_cast<long double>(factor));
          prod[n] = static_cast<double>(std::exp(lp));
        }
      }
    }
  }

  if (bundle.beta_sum_div) {
    ConditionCheck c;
    for (u128 n = 0;; ++n) {
      std::size_t m = 0;
      if (n > static_cast<u128>(horizon) + 2 ||
          !rate_index(*bundle.beta_sum_div, static_cast<u64>(n), horizon, m)) {
        c.skipped_tail = true;
        break;
      }
      c.update(to_double_u128(n) - one_minus_beta_sum[m],
               "n=" + to_string_u128(n) + " rate=" + std::to_string(m) +
                   " sum=" + format_double(one_minus_beta_sum[m]));
    }
    report.add(c.entry("beta_sum_div",
                       "sum_{i<=rate(n)} (1-beta_i) >= n", slack));
  }

  if (bundle.beta_prod_rate) {
    ConditionCheck c;
    if (!prod_valid) {
      c.update(1.0, "beta factor at index " + std::to_string(first_zero_factor) +
                        " is zero; the product hypothesis needs beta_n > 0");
    } else {
      std::vector<double> suffix_max(horizon + 1);
      double run = -1e300;
      for (std::size_t n = horizon + 1; n-- > 0;) {
        run = std::max(run, prod[n]);
        suffix_max[n] = run;
      }
      for (u64 k = 0; k <= k_max; ++k) {
        std::size_t from = 0;
        if (!rate_index(*bundle.beta_prod_rate, k, horizon, from)) {
          c.skipped_tail = true;
          break;
        }
        c.update(suffix_max[from] - 1.0 / (static_cast<double>(k) + 1.0),
                 "k=" + std::to_string(k) + " from=" + std::to_string(from) +
                     " prod=" + format_double(suffix_max[from]));
      }
    }
    report.add(c.entry("beta_prod_rate",
                       "prod_{i<=n} beta_{i+1} <= 1/(k+1) for n >= rate(k)", slack));
  }

  const auto check_cauchy = [&](const NatRate& mod, const std::vector<double>& prefix,
                                const char* name, const char* relation) {
    ConditionCheck c;
    for (u64 k = 0; k <= k_max; ++k) {
      std::size_t from = 0;
      if (!rate_index(mod, k, horizon, from)) {
        c.skipped_tail = true;
        break;
      }
      const double tail = prefix[horizon] - prefix[from];
      c.update(tail - 1.0 / (static_cast<double>(k) + 1.0),
               "k=" + std::to_string(k) + " from=" + std::to_string(from) +
                   " tail=" + format_double(tail));
    }
    report.add(c.entry(name, std::string(relation) + " (tails within horizon)", slack));
  };

  if (bundle.beta_diff_mod) {
    check_cauchy(*bundle.beta_diff_mod, beta_diff_sum, "beta_diff_mod",
                 "tail of sum|beta_{n+1}-beta_n| <= 1/(k+1) past mod(k)");
  }
  if (bundle.lambda_diff_mod) {
    check_cauchy(*bundle.lambda_diff_mod, lambda_diff_sum, "lambda_diff_mod",
                 "tail of sum|lambda_{n+1}-lambda_n| <= 1/(k+1) past mod(k)");
  }

  if (bundle.beta_to_one) {
    ConditionCheck c;
    std::vector<double> suffix_max(horizon + 1);
    double run = -1e300;
    for (std::size_t n = horizon + 1; n-- > 0;) {
      run = std::max(run, 1.0 - beta_vals[n]);
      suffix_max[n] = run;
    }
    for (u64 k = 0; k <= k_max; ++k) {
      std::size_t from = 0;
      if (!rate_index(*bundle.beta_to_one, k, horizon, from)) {
        c.skipped_tail = true;
        break;
      }
      c.update(suffix_max[from] - 1.0 / (static_cast<double>(k) + 1.0),
               "k=" + std::to_string(k) + " from=" + std::to_string(from) +
                   " 1-beta=" + format_double(suffix_max[from]));
    }
    report.add(c.entry("beta_to_one",
                       "1-beta_n <= 1/(k+1) for n >= rate(k)", slack));
  }

  if (bundle.inv_lambda >= 1) {
    ConditionCheck c;
    const double floor = 1.0 / static_cast<double>(bundle.inv_lambda);
    for (std::size_t n = bundle.inv_lambda_from; n <= horizon; ++n) {
      c.update(floor - lambda_vals[n],
               "n=" + std::to_string(n) + " lambda=" + format_double(lambda_vals[n]));
    }
    report.add(c.entry("inv_lambda",
                       "lambda_n >= 1/" + std::to_string(bundle.inv_lambda) +
                           " from n=" + std::to_string(bundle.inv_lambda_from),
                       slack));
  }

  if (bundle.prod_floor) {
    ConditionCheck c;
    if (!bundle.beta_diff_mod || !bundle.lambda_diff_mod) {
      c.update(1.0, "prod_floor needs both difference moduli to locate its index");
    } else if (!prod_valid) {
      c.update(1.0, "beta factor at index " + std::to_string(first_zero_factor) +
                        " is zero");
    } else {
      for (u64 k = 0; k <= k_max; ++k) {
        RateValue chi = RateValue::exactly(0);
        try {
          chi = perturbation_modulus(
              *bundle.beta_diff_mod, *bundle.lambda_diff_mod, bundle.dist_bound,
              checked_add(checked_mul(3, static_cast<u128>(k)), 2));
        } catch (const HorizonError&) {
          c.skipped_tail = true;
          break;
        }
        if (!chi.exact || chi.value > static_cast<u128>(horizon)) {
          c.skipped_tail = true;
          break;
        }
        RateValue f = RateValue::exactly(0);
        try {
          f = bundle.prod_floor->eval(static_cast<u128>(k));
        } catch (const HorizonError&) {
          c.skipped_tail = true;
          break;
        }
        if (!f.exact || f.value == 0) {
          c.update(1.0, "prod_floor(" + std::to_string(k) + ") is not a positive integer");
          break;
        }
        const std::size_t idx = static_cast<std::size_t>(chi.value);
        c.update(1.0 / to_double_u128(f.value) - prod[idx],
                 "k=" + std::to_string(k) + " index=" + std::to_string(idx) +
                     " prod=" + format_double(prod[idx]) + " floor=1/" +
                     to_string_u128(f.value));
      }
    }
    report.add(c.entry("prod_floor",
                       "1/prod_floor(k) <= prod at the perturbation-modulus index",
                       slack));
  }

  return report;
}

}  // namespace tmann
