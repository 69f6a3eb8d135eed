#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "tmann/iteration.hpp"

namespace tmann {

/// Parsed run configuration. The file format is flat `key = value` lines
/// with `#` comments; values are numbers, bare words or small descriptor
/// expressions like `rotation(1.5707, 0, 0)`. See the README for the full
/// key list. Parse errors carry the offending line and key.
struct RunConfig {
  Scenario scenario;
  std::size_t horizon = 10000;
  u64 k_max = 10;
  double slack = 1e-9;
  std::size_t stride = 97;
  u64 seed = 20240915;
  std::size_t sample_count = 10000;  // geometry/operator sampling
  std::size_t point_stride = 1000;
  std::string out_dir = ".";
  bool check_axioms = true;        // geometry + nonexpansiveness sampling
  bool check_moduli = true;        // bundle vs. schedules
  bool check_inequalities = true;  // per-step orbit inequalities
  bool check_rates = true;         // rate validation on the trace
  bool compare_beta_to_one_args = false;  // also evaluate the unsound variant
  std::optional<std::size_t> sabotage_beta_index;  // engineered failure hook
  bool corollary_preset = false;  // bundle came from the quadratic family
  bool numeric_sum_div = false;   // beta_sum_div tabulated from the schedule
  std::optional<double> lambda_constant;  // set when lambda is constant
};

RunConfig parse_config_file(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin);

/// Applies the `--key value` style command-line overrides onto a parsed
/// config. Recognized keys: horizon, kmax, slack, stride, seed, out.
void apply_override(RunConfig& config, const std::string& key,
                    const std::string& value);

}  // namespace tmann
