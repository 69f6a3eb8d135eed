#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tmann/config.hpp"
#include "tmann/rates.hpp"

namespace tmann {

// Exit codes shared by every command:
//   0 all checks passed   1 a validation failed   2 bad config
//   3 rate overflow       4 numeric/horizon failure
// The CLI front end maps thrown errors onto 2/3/4; the functions below
// return 0 or 1 themselves.

/// One row of the rate table emitted by cmd_rates.
struct RateRow {
  u64 k = 0;
  RateValue step_rate;
  RateValue t_gap_rate;
  std::optional<u128> quadratic_step;   // closed form, when applicable
  std::optional<u128> quadratic_t_gap;  // closed form, when applicable
};

std::vector<RateRow> compute_rate_table(const RunConfig& config);

/// Runs the orbit, writes <out>/<name>_trace.csv and prints a summary.
int cmd_run(const RunConfig& config, std::ostream& out);

/// Writes <out>/<name>_rates.csv with one row per k <= k_max.
int cmd_rates(const RunConfig& config, std::ostream& out);

/// Full validation pipeline: moduli, axioms, nonexpansiveness, trace
/// inequalities and both rate checks. Prints the report; returns 1 with
/// the first failing witness on stderr-style output when anything fails.
int cmd_validate(const RunConfig& config, std::ostream& out);

/// Closed-form vs. generic-pipeline equality over k <= k_max; needs the
/// corollary preset shape. Returns 1 on any mismatch.
int cmd_compare(const RunConfig& config, std::ostream& out);

/// write-then-rename so partially written files never appear.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace tmann
