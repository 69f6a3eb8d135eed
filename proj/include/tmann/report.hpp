#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tmann {

/// Result of one checked relation. `worst` is the largest violation seen
/// (value minus bound); a check passes when it stays within the slack it
/// was run with. Failing entries carry a concrete witness.
struct CheckEntry {
  std::string name;
  std::string relation;
  bool pass = true;
  double worst = 0.0;
  std::string witness;
};

struct ValidationReport {
  std::vector<CheckEntry> entries;

  bool all_pass() const;
  void add(CheckEntry entry);
  void merge(ValidationReport other);

  /// First failing entry, or nullptr when everything passed.
  const CheckEntry* first_failure() const;

  /// One line per entry: PASS/FAIL, name, relation, worst margin, witness.
  void write_text(std::ostream& os) const;
  /// Columns: name,relation,pass,worst,witness
  void write_csv(std::ostream& os) const;
};

/// Shortest round-trip decimal rendering of a double (plain "nan"/"inf"
/// never appear in reports; callers only pass finite values).
std::string format_double(double v);

}  // namespace tmann
