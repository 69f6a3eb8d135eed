#include "tmann/report.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>

namespace tmann {

bool ValidationReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const CheckEntry& e) { return e.pass; });
}

void ValidationReport::add(CheckEntry entry) {
  entries.push_back(std::move(entry));
}

void ValidationReport::merge(ValidationReport other) {
  for (auto& e : other.entries) entries.push_back(std::move(e));
}

const CheckEntry* ValidationReport::first_failure() const {
  for (const auto& e : entries) {
    if (!e.pass) return &e;
  }
  return nullptr;
}

void ValidationReport::write_text(std::ostream& os) const {
  for (const auto& e : entries) {
    os << (e.pass ? "PASS " : "FAIL ") << e.name << "  [" << e.relation
       << "]  worst=" << format_double(e.worst);
    if (!e.witness.empty()) os << "  witness: " << e.witness;
    os << '\n';
  }
}

void ValidationReport::write_csv(std::ostream& os) const {
  os << "name,relation,pass,worst,witness\n";
  for (const auto& e : entries) {
    std::string witness = e.witness;
    std::replace(witness.begin(), witness.end(), ',', ';');
    os << e.name << ',' << e.relation << ',' << (e.pass ? 1 : 0) << ','
       << format_double(e.worst) << ',' << witness << '\n';
  }
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace tmann
