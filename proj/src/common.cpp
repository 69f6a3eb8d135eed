#include "tmann/common.hpp"

#include <algorithm>

namespace tmann {

u128 checked_add(u128 a, u128 b) {
  u128 r = 0;
  if (__builtin_add_overflow(a, b, &r)) {
    throw RateOverflowError("integer overflow in rate arithmetic (add)");
  }
  return r;
}

u128 checked_sub(u128 a, u128 b) {
  if (b > a) {
    throw RateOverflowError("integer underflow in rate arithmetic (sub)");
  }
  return a - b;
}

u128 checked_mul(u128 a, u128 b) {
  u128 r = 0;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw RateOverflowError("integer overflow in rate arithmetic (mul)");
  }
  return r;
}

std::string to_string_u128(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

double to_double_u128(u128 v) {
  const u128 high = v >> 64;
  const u128 low = v & ~u128{0} >> 64;
  return static_cast<double>(static_cast<u64>(high)) * 18446744073709551616.0 +
         static_cast<double>(static_cast<u64>(low));
}

}  // namespace tmann
