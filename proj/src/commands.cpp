#include "tmann/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "tmann/verify.hpp"

namespace tmann {

namespace fs = std::filesystem;

void write_file_atomic(const std::string& path, const std::string& contents) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw NumericError("cannot write " + tmp.string());
    out << contents;
  }
  fs::rename(tmp, target);
}

namespace {

std::string out_path(const RunConfig& config, const std::string& suffix) {
  return (fs::path(config.out_dir) / (config.scenario.name + suffix)).string();
}

Schedule effective_beta(const RunConfig& config) {
  if (config.sabotage_beta_index) {
    const std::size_t idx = *config.sabotage_beta_index;
    const double original = config.scenario.beta.eval(idx);
    // Push the term as far from its schedule as [0,1] allows.
    const double wrecked = original >= 0.5 ? 0.0 : 1.0;
    return config.scenario.beta.with_override(idx, wrecked);
  }
  return config.scenario.beta;
}

Scenario effective_scenario(const RunConfig& config) {
  Scenario sc = config.scenario;
  sc.beta = effective_beta(config);
  return sc;
}

struct RatePair {
  NatRate step_rate;
  NatRate t_gap_rate;
  std::string route;
};

/// Builds the step-gap and t-gap rates the bundle supports, preferring the
/// product route (it gives the smaller rates whenever both apply).
RatePair bundle_rates(const ModuliBundle& m, BetaToOneArg variant) {
  if (!m.beta_diff_mod || !m.lambda_diff_mod) {
    throw InputError("the bundle needs both difference moduli "
                     "(beta_diff_mod, lambda_diff_mod)");
  }
  if (!m.beta_to_one || m.inv_lambda == 0) {
    throw InputError("the t-gap rate needs beta_to_one and inv_lambda");
  }
  NatRate pert = make_perturbation_modulus(*m.beta_diff_mod, *m.lambda_diff_mod,
                                           m.dist_bound);
  std::optional<NatRate> step;
  std::string route;
  if (m.beta_prod_rate && m.prod_floor) {
    step = make_step_rate_via_product(*m.beta_prod_rate, *m.prod_floor, pert,
                                      m.dist_bound);
    route = "product";
  } else if (m.beta_sum_div) {
    step = make_step_rate_via_divergence(*m.beta_sum_div, pert, m.dist_bound);
    route = "divergence";
  } else {
    throw InputError("the bundle supports neither rate route: provide "
                     "beta_prod_rate+prod_floor or beta_sum_div");
  }
  NatRate t_gap = make_t_gap_rate_from_step_rate(
      *step, m.inv_lambda_from, m.inv_lambda, *m.beta_to_one, m.dist_bound,
      variant);
  return {*step, t_gap, route};
}

}  // namespace

std::vector<RateRow> compute_rate_table(const RunConfig& config) {
  const ModuliBundle& m = config.scenario.moduli;
  const RatePair rates = bundle_rates(m, BetaToOneArg::with_inv_lambda);
  std::vector<RateRow> rows;
  rows.reserve(config.k_max + 1);
  for (u64 k = 0; k <= config.k_max; ++k) {
    RateRow row;
    row.k = k;
    row.step_rate = rates.step_rate.eval(static_cast<u128>(k));
    row.t_gap_rate = rates.t_gap_rate.eval(static_cast<u128>(k));
    if (config.corollary_preset && config.lambda_constant) {
      row.quadratic_step = quadratic_step_rate(m.dist_bound, k);
      row.quadratic_t_gap =
          quadratic_t_gap_rate(m.dist_bound, *config.lambda_constant, k);
    }
    rows.push_back(row);
  }
  return rows;
}

int cmd_run(const RunConfig& config, std::ostream& out) {
  const Scenario sc = effective_scenario(config);
  const IterationTrace trace = run_trace(sc, config.horizon, config.point_stride);

  std::ostringstream csv;
  csv << "n,d_xn_xnp1,d_xn_Txn,d_xn_yn,d_xn_u,d_xn_p,lambda_n,beta_n\n";
  for (std::size_t n = 0; n < trace.horizon; ++n) {
    csv << n << ',' << format_double(trace.step_gap[n]) << ','
        << format_double(trace.t_gap[n]) << ',' << format_double(trace.xy_gap[n])
        << ',' << format_double(trace.anchor_gap[n]) << ',';
    if (trace.has_fixed_point) csv << format_double(trace.fixed_gap[n]);
    csv << ',' << format_double(trace.lambda[n]) << ','
        << format_double(trace.beta[n]) << '\n';
  }
  const std::string path = out_path(config, "_trace.csv");
  write_file_atomic(path, csv.str());

  out << "scenario: " << sc.name << " on " << sc.space.describe() << "\n";
  out << "map: " << sc.map.describe() << "\n";
  if (trace.has_fixed_point) {
    out << "orbit bound M = " << format_double(trace.orbit_bound)
        << ", dist_bound = " << to_string_u128(sc.moduli.dist_bound) << "\n";
  } else {
    out << "orbit bound unknown (no fixed point); dist_bound = "
        << to_string_u128(sc.moduli.dist_bound) << " (unverified)\n";
  }
  out << "steps: " << trace.horizon
      << ", final step_gap = " << format_double(trace.step_gap.back())
      << ", final t_gap = " << format_double(trace.t_gap.back()) << "\n";
  out << "trace written to " << path << "\n";
  return 0;
}

int cmd_rates(const RunConfig& config, std::ostream& out) {
  const std::vector<RateRow> rows = compute_rate_table(config);
  const RatePair rates =
      bundle_rates(config.scenario.moduli, BetaToOneArg::with_inv_lambda);

  const bool closed_forms = !rows.empty() && rows.front().quadratic_step.has_value();
  std::ostringstream csv;
  csv << "# step_rate route: " << rates.route << "\n";
  csv << "# t_gap_rate: derived from step_rate via the lambda floor\n";
  if (closed_forms) {
    csv << "# quadratic_* columns: closed forms for constant lambda + "
           "harmonic-complement beta\n";
  }
  csv << "k,step_rate,t_gap_rate";
  if (closed_forms) csv << ",quadratic_step,quadratic_t_gap";
  csv << "\n";
  for (const RateRow& row : rows) {
    csv << row.k << ',' << row.step_rate.describe() << ','
        << row.t_gap_rate.describe();
    if (closed_forms) {
      csv << ',' << to_string_u128(*row.quadratic_step) << ','
          << to_string_u128(*row.quadratic_t_gap);
    }
    csv << "\n";
  }
  const std::string path = out_path(config, "_rates.csv");
  write_file_atomic(path, csv.str());

  out << "rate table (" << rates.route << " route) for k <= " << config.k_max
      << " written to " << path << "\n";
  for (const RateRow& row : rows) {
    out << "k=" << row.k << " step_rate=" << row.step_rate.describe()
        << " t_gap_rate=" << row.t_gap_rate.describe();
    if (row.quadratic_step) {
      out << " quadratic_step=" << to_string_u128(*row.quadratic_step)
          << " quadratic_t_gap=" << to_string_u128(*row.quadratic_t_gap);
    }
    out << "\n";
  }
  return 0;
}

int cmd_validate(const RunConfig& config, std::ostream& out) {
  const Scenario sc = effective_scenario(config);
  ValidationReport report;

  if (config.check_axioms) {
    report.merge(sc.space.check_axioms(config.sample_count, config.seed,
                                       config.slack));
    report.merge(sc.space.check_segment_identities(config.sample_count,
                                                   config.seed + 1, config.slack));
    report.merge(sc.map.check_nonexpansive(sc.space, config.sample_count,
                                           config.seed + 2, config.slack));
  }
  if (config.check_moduli) {
    report.merge(validate_moduli(sc.moduli, sc.lambda, sc.beta, config.horizon,
                                 config.k_max, config.slack));
  }

  if (config.check_inequalities || config.check_rates) {
    const IterationTrace trace =
        run_trace(sc, config.horizon, config.point_stride);
    if (config.check_inequalities) {
      report.merge(check_trace_inequalities(trace, config.slack));
    }
    if (config.check_rates) {
      const RatePair rates = bundle_rates(sc.moduli, BetaToOneArg::with_inv_lambda);
      report.merge(validate_rate(trace, rates.step_rate, TraceQuantity::step_gap,
                                 config.k_max, config.slack, config.stride));
      report.merge(validate_rate(trace, rates.t_gap_rate, TraceQuantity::t_gap,
                                 config.k_max, config.slack, config.stride));

      // How conservative the certificates are: theoretical index vs the
      // first index from which the trace stays below each threshold.
      for (u64 k = 0; k <= std::min<u64>(config.k_max, 5); ++k) {
        const auto hit = first_hit(trace, TraceQuantity::step_gap, k);
        out << "k=" << k << " step_rate="
            << rates.step_rate.eval(static_cast<u128>(k)).describe()
            << " first_hit=" << (hit ? std::to_string(*hit) : "none") << "\n";
      }

      if (config.compare_beta_to_one_args) {
        // Side-by-side: the variant without the lambda factor in the
        // beta_to_one argument, for comparison with the sound one.
        const RatePair literal =
            bundle_rates(sc.moduli, BetaToOneArg::without_inv_lambda);
        ValidationReport cmp = validate_rate(trace, literal.t_gap_rate,
                                             TraceQuantity::t_gap, config.k_max,
                                             config.slack, config.stride);
        for (auto& e : cmp.entries) e.name += "_no_lambda_factor";
        for (u64 k = 0; k <= std::min<u64>(config.k_max, 5); ++k) {
          out << "t_gap rate at k=" << k << ": with lambda factor "
              << rates.t_gap_rate.eval(static_cast<u128>(k)).describe()
              << ", without "
              << literal.t_gap_rate.eval(static_cast<u128>(k)).describe() << "\n";
        }
        report.merge(std::move(cmp));
      }
    }
  }

  report.write_text(out);
  const std::string path = out_path(config, "_validate.csv");
  std::ostringstream csv;
  report.write_csv(csv);
  write_file_atomic(path, csv.str());
  out << "report written to " << path << "\n";

  if (!report.all_pass()) {
    const CheckEntry* fail = report.first_failure();
    out << "FAILED: " << fail->name << " worst=" << format_double(fail->worst)
        << " witness: " << fail->witness << "\n";
    return 1;
  }
  out << "all checks passed\n";
  return 0;
}

int cmd_compare(const RunConfig& config, std::ostream& out) {
  if (!config.corollary_preset || !config.lambda_constant) {
    throw InputError("compare needs the corollary preset (constant lambda, "
                     "harmonic-complement beta)");
  }
  const ModuliBundle& m = config.scenario.moduli;
  const RatePair rates = bundle_rates(m, BetaToOneArg::with_inv_lambda);

  bool ok = true;
  for (u64 k = 0; k <= config.k_max; ++k) {
    const RateValue step = rates.step_rate.eval(static_cast<u128>(k));
    const RateValue t_gap = rates.t_gap_rate.eval(static_cast<u128>(k));
    const u128 step_closed = quadratic_step_rate(m.dist_bound, k);
    const u128 t_gap_closed =
        quadratic_t_gap_rate(m.dist_bound, *config.lambda_constant, k);
    const bool match = step.exact && t_gap.exact && step.value == step_closed &&
                       t_gap.value == t_gap_closed;
    if (!match) {
      ok = false;
      out << "MISMATCH at k=" << k << ": pipeline (" << step.describe() << ", "
          << t_gap.describe() << ") vs closed form ("
          << to_string_u128(step_closed) << ", " << to_string_u128(t_gap_closed)
          << ")\n";
    }
  }
  if (ok) {
    out << "pipeline and closed forms agree exactly for k <= " << config.k_max
        << " (dist_bound=" << to_string_u128(m.dist_bound)
        << ", lambda=" << format_double(*config.lambda_constant) << ")\n";
    return 0;
  }
  return 1;
}

}  // namespace tmann
