#pragma once

// Test-side oracles, written independently of the library code paths they
// check: plain scans over explicitly materialized sequences. The *_fn
// variants wrap a scan in a NatRate so the library can consume it; every
// value they return is recomputed from the raw sequence on demand.

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "tmann/rates.hpp"

namespace oracles {

using Seq = std::function<double(std::size_t)>;

inline std::vector<double> materialize(const Seq& f, std::size_t count) {
  std::vector<double> v(count);
  for (std::size_t n = 0; n < count; ++n) v[n] = f(n);
  return v;
}

/// Least m with sum_{i<=m} a_i >= n, by direct scan.
inline std::optional<std::size_t> brute_divergence_rate(
    const std::vector<double>& a, std::size_t n) {
  long double sum = 0.0L;
  for (std::size_t m = 0; m < a.size(); ++m) {
    sum += a[m];
    if (sum >= static_cast<long double>(n)) return m;
  }
  return std::nullopt;
}

/// Minimal horizon-bounded Cauchy modulus of sum c_i at k: the least N
/// such that every partial-sum variation starting at or past N (and ending
/// within the horizon) stays at or below 1/(k+1). The variation from N is
/// sum_{i=N+1..} c_i — the term at N itself is part of the N-th partial
/// sum, not of its tail.
inline std::size_t brute_cauchy_modulus(const std::vector<double>& c,
                                        std::size_t k) {
  long double total = 0.0L;
  for (double v : c) total += v;
  const long double threshold = 1.0L / (static_cast<long double>(k) + 1.0L);
  long double head = 0.0L;
  // c_i >= 0 makes the worst variation from N the full remaining sum.
  for (std::size_t n = 0; n < c.size(); ++n) {
    head += c[n];
    if (total - head <= threshold) return n;
  }
  return c.size();
}

/// Least n with prod_{i<=n} (1-a_i) <= 1/(k+1), by direct scan.
inline std::optional<std::size_t> brute_residual_prod_rate(
    const std::vector<double>& a, long double threshold) {
  long double prod = 1.0L;
  for (std::size_t n = 0; n < a.size(); ++n) {
    prod *= 1.0L - static_cast<long double>(a[n]);
    if (prod <= threshold) return n;
  }
  return std::nullopt;
}

/// H_m = sum_{i=1}^{m} 1/i.
inline double harmonic_number(std::size_t m) {
  long double h = 0.0L;
  for (std::size_t i = 1; i <= m; ++i) h += 1.0L / static_cast<long double>(i);
  return static_cast<double>(h);
}

// ---------------------------------------------------------------------------
// On-demand oracle rates. Arguments beyond what the materialized sequence
// can witness raise HorizonError, mirroring exhausted tabulations.
// ---------------------------------------------------------------------------

inline long double threshold_of(tmann::u128 k) {
  return 1.0L / (static_cast<long double>(tmann::to_double_u128(k)) + 1.0L);
}

inline tmann::NatRate divergence_rate_fn(std::vector<double> a) {
  auto data = std::make_shared<std::vector<double>>(std::move(a));
  return tmann::NatRate::function("oracle_divergence_rate", [data](tmann::RateValue n) {
    if (!n.exact) throw tmann::HorizonError("oracle needs an exact argument");
    if (tmann::to_double_u128(n.value) > 1e15) {
      throw tmann::HorizonError("oracle argument out of range");
    }
    const auto m =
        brute_divergence_rate(*data, static_cast<std::size_t>(n.value));
    if (!m) throw tmann::HorizonError("no divergence witness within the scan");
    return tmann::RateValue::exactly(*m);
  });
}

inline tmann::NatRate cauchy_modulus_fn(std::vector<double> c) {
  auto data = std::make_shared<std::vector<double>>(std::move(c));
  return tmann::NatRate::function("oracle_cauchy_modulus", [data](tmann::RateValue k) {
    if (!k.exact) throw tmann::HorizonError("oracle needs an exact argument");
    if (tmann::to_double_u128(k.value) > 1e15) {
      throw tmann::HorizonError("oracle argument out of range");
    }
    return tmann::RateValue::exactly(
        brute_cauchy_modulus(*data, static_cast<std::size_t>(k.value)));
  });
}

inline tmann::NatRate residual_prod_rate_fn(std::vector<double> a) {
  auto data = std::make_shared<std::vector<double>>(std::move(a));
  return tmann::NatRate::function("oracle_prod_rate", [data](tmann::RateValue k) {
    if (!k.exact) throw tmann::HorizonError("oracle needs an exact argument");
    const auto n = brute_residual_prod_rate(*data, threshold_of(k.value));
    if (!n) throw tmann::HorizonError("no product witness within the scan");
    return tmann::RateValue::exactly(*n);
  });
}

/// ceil(1 / prod_{i<=chi(3k+2)} (1-a_i)) as a rate in k.
inline tmann::NatRate prod_floor_fn(std::vector<double> a, tmann::NatRate chi) {
  auto data = std::make_shared<std::vector<double>>(std::move(a));
  return tmann::NatRate::function("oracle_prod_floor", [data, chi](tmann::RateValue k) {
    if (!k.exact) throw tmann::HorizonError("oracle needs an exact argument");
    const tmann::RateValue idx = chi.eval(tmann::checked_add(
        tmann::checked_mul(3, k.value), 2));
    if (!idx.exact || idx.value >= data->size()) {
      throw tmann::HorizonError("modulus index beyond the scan");
    }
    long double prod = 1.0L;
    for (std::size_t n = 0; n <= static_cast<std::size_t>(idx.value); ++n) {
      prod *= 1.0L - static_cast<long double>((*data)[n]);
    }
    const long double inv = 1.0L / prod;
    if (!(inv < 1e18L)) throw tmann::HorizonError("product floor out of range");
    return tmann::RateValue::exactly(
        static_cast<tmann::u128>(std::ceil(inv - 1e-9L)));
  });
}

}  // namespace oracles
