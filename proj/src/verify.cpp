#include "tmann/verify.hpp"

#include <algorithm>
#include <cmath>

namespace tmann {

const std::vector<double>& trace_quantity(const IterationTrace& trace,
                                          TraceQuantity q) {
  return q == TraceQuantity::step_gap ? trace.step_gap : trace.t_gap;
}

const char* trace_quantity_name(TraceQuantity q) {
  return q == TraceQuantity::step_gap ? "step_gap" : "t_gap";
}

namespace {

// Exhausted tabulations and out-of-range oracle scans mean "not checkable
// with the data at hand", not a failed condition.
std::optional<RateValue> try_eval(const NatRate& rate, u128 k) {
  try {
    return rate.eval(k);
  } catch (const HorizonError&) {
    return std::nullopt;
  }
}

struct Worst {
  double violation = -1e300;
  std::string witness;

  void update(double v, const std::function<std::string()>& describe) {
    if (v > violation) {
      violation = v;
      witness = describe();
    }
  }

  void update(double v, std::size_t n) {
    update(v, [n] { return "n=" + std::to_string(n); });
  }

  CheckEntry entry(std::string name, std::string relation, double slack) const {
    CheckEntry e;
    e.name = std::move(name);
    e.relation = std::move(relation);
    e.worst = violation == -1e300 ? 0.0 : violation;
    e.pass = e.worst <= slack;
    if (!e.pass) e.witness = witness;
    return e;
  }
};

}  // namespace

ValidationReport validate_rate(const IterationTrace& trace, const NatRate& rate,
                               TraceQuantity quantity, u64 k_max, double slack,
                               std::size_t stride) {
  if (stride == 0) throw InputError("stride must be >= 1");
  const std::vector<double>& q = trace_quantity(trace, quantity);
  const RateValue last = rate.eval(static_cast<u128>(k_max));
  if (!last.exact || last.value >= static_cast<u128>(trace.horizon)) {
    throw HorizonError("rate " + rate.label() + " needs a trace longer than " +
                       last.describe() + " at k=" + std::to_string(k_max) +
                       ", have " + std::to_string(trace.horizon));
  }

  Worst c;
  for (u64 k = 0; k <= k_max; ++k) {
    const std::size_t from =
        static_cast<std::size_t>(rate.eval(static_cast<u128>(k)).value);
    const double threshold = 1.0 / (static_cast<double>(k) + 1.0);
    for (std::size_t n = from; n < trace.horizon; n += stride) {
      c.update(q[n] - threshold, [&] {
        return "k=" + std::to_string(k) + " n=" + std::to_string(n) +
               " value=" + format_double(q[n]) +
               " threshold=" + format_double(threshold);
      });
    }
  }

  ValidationReport report;
  report.add(c.entry(std::string(trace_quantity_name(quantity)) + "_rate",
                     std::string(trace_quantity_name(quantity)) +
                         "_n <= 1/(k+1) for n >= " + rate.label() + "(k)",
                     slack));
  return report;
}

ValidationReport check_trace_inequalities(const IterationTrace& trace,
                                          double slack) {
  const std::size_t h = trace.horizon;
  ValidationReport report;

  // The anchor-gap identity and the t-gap recursion hold without a fixed point.
  Worst xy_identity, t_gap_rec;
  for (std::size_t n = 0; n < h; ++n) {
    const double bn = trace.beta[n];
    const double ln = trace.lambda[n];
    xy_identity.update(
        std::abs(trace.xy_gap[n] - (1.0 - bn) * trace.anchor_gap[n]), n);
    const double rhs = trace.step_gap[n] + ln * (1.0 - bn) * trace.anchor_gap[n] +
                       (1.0 - ln) * bn * trace.t_gap[n] +
                       (1.0 - ln) * (1.0 - bn) * trace.anchor_t_gap[n];
    t_gap_rec.update(trace.t_gap[n] - rhs, n);
  }
  report.add(xy_identity.entry("anchor_gap_identity",
                               "d(x_n,y_n) = (1-beta_n) d(x_n,u)", slack));
  report.add(t_gap_rec.entry(
      "t_gap_recursion",
      "d(x_n,Tx_n) <= step + lam(1-b) d(x,u) + (1-lam)b d(x,Tx) + (1-lam)(1-b) d(u,Tx)",
      slack));

  if (!trace.has_fixed_point) {
    CheckEntry skipped;
    skipped.name = "orbit_bounds";
    skipped.relation = "not checked: no fixed point known, orbit bound unavailable";
    skipped.pass = true;
    report.add(std::move(skipped));
    return report;
  }

  const double m = trace.orbit_bound;
  Worst y_consec, x_consec, t_gap_lambda, fixed_gap_rec, x_bounded, y_bounded;
  for (std::size_t n = 0; n < h; ++n) {
    const double bn = trace.beta[n];
    const double ln = trace.lambda[n];
    if (n + 1 < h) {
      const double db = std::abs(trace.beta[n + 1] - bn);
      const double dl = std::abs(trace.lambda[n + 1] - ln);
      y_consec.update(trace.y_step_gap[n] -
                          (trace.beta[n + 1] * trace.step_gap[n] + 2.0 * m * db),
                      n);
      x_consec.update(trace.step_gap[n + 1] -
                          (trace.beta[n + 1] * trace.step_gap[n] +
                           2.0 * m * (db + dl)),
                      n);
    }
    t_gap_lambda.update(ln * trace.t_gap[n] -
                            (trace.step_gap[n] + 2.0 * m * (1.0 - bn)),
                        n);
    fixed_gap_rec.update(trace.fixed_gap[n + 1] -
                             ((1.0 - bn) * trace.anchor_fixed_gap +
                              bn * trace.fixed_gap[n]),
                         n);
    x_bounded.update(std::max(trace.fixed_gap[n] - m,
                              trace.anchor_gap[n] - 2.0 * m),
                     n);
    y_bounded.update(std::max(trace.y_fixed_gap[n] - m,
                              trace.y_t_gap[n] - 2.0 * m),
                     n);
  }
  report.add(y_consec.entry(
      "y_consecutive",
      "d(y_{n+1},y_n) <= beta_{n+1} d(x_{n+1},x_n) + 2M |d beta|", slack));
  report.add(x_consec.entry(
      "x_consecutive",
      "d(x_{n+2},x_{n+1}) <= beta_{n+1} d(x_{n+1},x_n) + 2M (|d beta|+|d lambda|)",
      slack));
  report.add(t_gap_lambda.entry(
      "t_gap_lambda",
      "lambda_n d(x_n,Tx_n) <= d(x_n,x_{n+1}) + 2M (1-beta_n)", slack));
  report.add(fixed_gap_rec.entry(
      "fixed_gap_recursion",
      "d(x_{n+1},p) <= (1-beta_n) d(u,p) + beta_n d(x_n,p)", slack));
  report.add(x_bounded.entry("orbit_bounded",
                             "d(x_n,p) <= M and d(x_n,u) <= 2M", slack));
  report.add(y_bounded.entry("y_bounded",
                             "d(y_n,p) <= M and d(y_n,Ty_n) <= 2M", slack));
  return report;
}

std::optional<std::size_t> first_hit(const IterationTrace& trace,
                                     TraceQuantity quantity, u64 k) {
  const std::vector<double>& q = trace_quantity(trace, quantity);
  const double threshold = 1.0 / (static_cast<double>(k) + 1.0);
  std::size_t n = trace.horizon;
  while (n > 0 && q[n - 1] <= threshold) --n;
  if (n == trace.horizon) return std::nullopt;
  return n;
}

ValidationReport recurrence_harness(const RecurrenceInstance& instance,
                                    std::size_t horizon, u64 k_max,
                                    double slack) {
  if (instance.sequence) {
    if (instance.sequence->size() < 2) {
      throw InputError("a supplied sequence needs at least two entries");
    }
    horizon = instance.sequence->size() - 1;
  }
  if (horizon == 0) throw InputError("recurrence_harness needs horizon >= 1");
  if (instance.bound == 0) throw InputError("bound must be >= 1");
  if (!instance.decay_div && !instance.residual_prod_rate) {
    throw InputError("the instance claims no route: neither a divergence rate "
                     "nor a product rate is present");
  }
  if (instance.residual_prod_rate && !instance.prod_floor) {
    throw InputError("the product route needs prod_floor alongside the rate");
  }

  // Take s as given or generate it with equality; either way collect every
  // prefix the checks use.
  std::vector<double> s(horizon + 1), decay(horizon);
  std::vector<double> perturb_sum(horizon), decay_sum(horizon);
  std::vector<double> residual_prod(horizon);
  const double bound = to_double_u128(instance.bound);
  ValidationReport report;
  {
    long double psum = 0.0L, dsum = 0.0L, prod = 1.0L;
    Worst range, recurrence;
    s[0] = instance.sequence ? (*instance.sequence)[0] : instance.start;
    range.update(s[0] - bound, std::size_t{0});
    for (std::size_t n = 0; n < horizon; ++n) {
      decay[n] = instance.decay(n);
      const double cn = instance.perturb(n);
      if (!(decay[n] >= 0.0 && decay[n] <= 1.0)) {
        throw NumericError("decay value outside [0,1] at n=" + std::to_string(n));
      }
      if (!(cn >= 0.0)) {
        throw NumericError("negative perturbation at n=" + std::to_string(n));
      }
      const double recurrence_bound = (1.0 - decay[n]) * s[n] + cn;
      if (instance.sequence) {
        s[n + 1] = (*instance.sequence)[n + 1];
        recurrence.update(s[n + 1] - recurrence_bound, n);
      } else {
        s[n + 1] = recurrence_bound;
      }
      psum += cn;
      perturb_sum[n] = static_cast<double>(psum);
      dsum += decay[n];
      decay_sum[n] = static_cast<double>(dsum);
      prod *= 1.0L - static_cast<long double>(decay[n]);
      residual_prod[n] = static_cast<double>(prod);
      range.update(s[n + 1] - bound, n + 1);
    }
    report.add(range.entry("sequence_bound", "s_n <= bound", slack));
    if (instance.sequence) {
      report.add(recurrence.entry(
          "recurrence_holds", "s_{n+1} <= (1-decay_n) s_n + perturb_n", slack));
    }
  }

  // Claimed Cauchy modulus of the perturbation series (tails within horizon).
  {
    Worst c;
    bool skipped = false;
    for (u64 k = 0; k <= k_max; ++k) {
      const auto v = try_eval(instance.perturb_mod, static_cast<u128>(k));
      if (!v || !v->exact || v->value >= static_cast<u128>(horizon)) {
        skipped = true;
        break;
      }
      const std::size_t from = static_cast<std::size_t>(v->value);
      const double tail = perturb_sum[horizon - 1] - perturb_sum[from];
      c.update(tail - 1.0 / (static_cast<double>(k) + 1.0), [&] {
        return "k=" + std::to_string(k) + " from=" + std::to_string(from) +
               " tail=" + format_double(tail);
      });
    }
    CheckEntry e = c.entry("perturb_mod",
                           "tail of sum(perturb) <= 1/(k+1) past mod(k)", slack);
    if (skipped) e.relation += " (tail beyond horizon not checked)";
    report.add(std::move(e));
  }

  if (instance.decay_div) {
    Worst c;
    for (u128 n = 0;; ++n) {
      const auto v = try_eval(*instance.decay_div, n);
      if (!v || !v->exact || v->value >= static_cast<u128>(horizon)) break;
      const std::size_t m = static_cast<std::size_t>(v->value);
      c.update(to_double_u128(n) - decay_sum[m], [&] {
        return "n=" + to_string_u128(n) + " rate=" + std::to_string(m) +
               " sum=" + format_double(decay_sum[m]);
      });
      if (n > static_cast<u128>(horizon)) break;
    }
    report.add(c.entry("decay_div", "sum_{i<=rate(n)} decay_i >= n", slack));
  }

  if (instance.residual_prod_rate) {
    std::size_t not_strict = horizon;
    for (std::size_t n = 0; n < horizon; ++n) {
      if (decay[n] >= 1.0) {
        not_strict = n;
        break;
      }
    }
    Worst c;
    if (not_strict < horizon) {
      c.update(1.0, not_strict);
      report.add(c.entry("residual_prod_rate", "needs decay_n < 1 for all n", slack));
    } else {
      std::vector<double> suffix_max(horizon);
      double run = -1e300;
      for (std::size_t n = horizon; n-- > 0;) {
        run = std::max(run, residual_prod[n]);
        suffix_max[n] = run;
      }
      for (u64 k = 0; k <= k_max; ++k) {
        const auto v = try_eval(*instance.residual_prod_rate, static_cast<u128>(k));
        if (!v || !v->exact || v->value >= static_cast<u128>(horizon)) break;
        const std::size_t from = static_cast<std::size_t>(v->value);
        c.update(suffix_max[from] - 1.0 / (static_cast<double>(k) + 1.0), [&] {
          return "k=" + std::to_string(k) + " from=" + std::to_string(from) +
                 " prod=" + format_double(suffix_max[from]);
        });
      }
      report.add(c.entry("residual_prod_rate",
                         "prod_{i<=n} (1-decay_i) <= 1/(k+1) for n >= rate(k)",
                         slack));
    }

    Worst f;
    for (u64 k = 0; k <= k_max; ++k) {
      const auto chi = try_eval(instance.perturb_mod,
                                checked_add(checked_mul(3, static_cast<u128>(k)), 2));
      if (!chi || !chi->exact || chi->value >= static_cast<u128>(horizon)) break;
      const auto fl = try_eval(*instance.prod_floor, static_cast<u128>(k));
      if (!fl) break;
      if (!fl->exact || fl->value == 0) {
        f.update(1.0, static_cast<std::size_t>(k));
        break;
      }
      const std::size_t idx = static_cast<std::size_t>(chi->value);
      f.update(1.0 / to_double_u128(fl->value) - residual_prod[idx], [&] {
        return "k=" + std::to_string(k) + " index=" + std::to_string(idx) +
               " prod=" + format_double(residual_prod[idx]);
      });
    }
    report.add(f.entry("prod_floor",
                       "1/prod_floor(k) <= prod at the modulus index", slack));
  }

  if (!report.all_pass()) {
    // Invalid moduli; stop before claiming any rate.
    return report;
  }

  std::vector<double> s_suffix(horizon + 1);
  {
    double run = -1e300;
    for (std::size_t n = horizon + 1; n-- > 0;) {
      run = std::max(run, s[n]);
      s_suffix[n] = run;
    }
  }
  const auto check_rate = [&](const char* name,
                              const std::function<RateValue(u64)>& rate_at) {
    Worst c;
    for (u64 k = 0; k <= k_max; ++k) {
      const RateValue v = rate_at(k);
      if (!v.exact || v.value > static_cast<u128>(horizon)) {
        throw HorizonError(std::string(name) + " reaches " + v.describe() +
                           " at k=" + std::to_string(k) +
                           "; extend the horizon past that index");
      }
      const std::size_t from = static_cast<std::size_t>(v.value);
      c.update(s_suffix[from] - 1.0 / (static_cast<double>(k) + 1.0), [&] {
        return "k=" + std::to_string(k) + " from=" + std::to_string(from) +
               " s=" + format_double(s_suffix[from]);
      });
    }
    report.add(c.entry(name, "s_n <= 1/(k+1) for n >= rate(k)", slack));
  };

  if (instance.decay_div) {
    check_rate("rate_via_divergence", [&](u64 k) {
      return recurrence_rate_via_divergence(*instance.decay_div,
                                            instance.perturb_mod, instance.bound,
                                            static_cast<u128>(k));
    });
  }
  if (instance.residual_prod_rate) {
    check_rate("rate_via_product", [&](u64 k) {
      return recurrence_rate_via_product(*instance.residual_prod_rate,
                                         *instance.prod_floor,
                                         instance.perturb_mod, instance.bound,
                                         static_cast<u128>(k));
    });
  }
  return report;
}

}  // namespace tmann
