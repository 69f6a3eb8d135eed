#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tmann {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

/// Bad arguments or malformed configuration (CLI exit code 2).
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A checked integer operation left the 128-bit range (CLI exit code 3).
struct RateOverflowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A requested value cannot be witnessed within the available horizon
/// (CLI exit code 4). The message names the length that would suffice.
struct HorizonError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numeric domain violation, e.g. a zero factor in a product that must
/// stay positive (CLI exit code 4).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

u128 checked_add(u128 a, u128 b);
u128 checked_sub(u128 a, u128 b);
u128 checked_mul(u128 a, u128 b);

std::string to_string_u128(u128 v);
double to_double_u128(u128 v);

/// Slack policy for floating-point comparisons: absolute floor plus a
/// relative part scaled by the magnitudes involved.
struct Tolerance {
  double abs = 1e-9;
  double rel = 1e-12;

  double slack(double scale) const { return abs + rel * scale; }
};

}  // namespace tmann
