#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tmann/common.hpp"
#include "tmann/rates.hpp"
#include "tmann/report.hpp"

namespace tmann {

/// A [0,1]-valued parameter sequence. Three closed families: a constant,
/// the harmonic complement 1 - 1/(n+1), and a finite table whose last
/// entry repeats forever. Immutable; eval is pure.
class Schedule {
 public:
  static Schedule constant(double c);
  static Schedule harmonic_complement();
  static Schedule table(std::vector<double> values);

  /// Same schedule with one term replaced (used to engineer failures).
  Schedule with_override(std::size_t index, double value) const;

  double eval(std::size_t n) const;

  bool is_constant() const;
  bool is_harmonic_complement() const;
  std::string describe() const;

 private:
  enum class Kind { constant, harmonic_complement, table };
  Schedule(Kind kind, double c, std::vector<double> values)
      : kind_(kind), c_(c), values_(std::move(values)) {}

  Kind kind_;
  double c_ = 0.0;
  std::vector<double> values_;
  std::optional<std::pair<std::size_t, double>> override_;
};

/// prod_{i=0}^{n} beta_{i+1}. Every factor must be positive; a zero factor
/// raises NumericError. Accumulated in extended precision, switching to
/// log space when factors underflow toward zero.
double partial_product(const Schedule& beta, std::size_t n);

/// sum_{i=0}^{n} |s_{i+1} - s_i|.
double diff_series_partial(const Schedule& s, std::size_t n);

/// Divergence rate for sum(1 - beta_n), tabulated by scanning partial sums
/// up to `horizon`: value at n is the least m with the sum through m
/// reaching n. Arguments whose witness lies beyond the horizon evaluate to
/// a lower bound of horizon+1 instead of a number.
NatRate numeric_beta_sum_div(const Schedule& beta, std::size_t horizon);

/// The quantitative hypotheses for one scenario: rates and moduli for the
/// two schedules plus the integer data. Optional members simply mark which
/// of the two rate routes (divergence vs. product) is available.
struct ModuliBundle {
  std::optional<NatRate> beta_sum_div;     // divergence rate of sum(1-beta_n)
  std::optional<NatRate> beta_prod_rate;   // rate for prod beta_{n+1} -> 0
  std::optional<NatRate> beta_diff_mod;    // Cauchy modulus of sum|d beta|
  std::optional<NatRate> lambda_diff_mod;  // Cauchy modulus of sum|d lambda|
  std::optional<NatRate> beta_to_one;      // rate for beta_n -> 1
  u64 inv_lambda = 0;                      // lambda_n >= 1/inv_lambda ...
  u64 inv_lambda_from = 0;                 // ... for all n >= inv_lambda_from
  std::optional<NatRate> prod_floor;       // positive; 1/prod_floor(k) <= P at the modulus index
  u128 dist_bound = 0;  // natural >= max(d(x0,p), d(u,p)); 0 = derive from the fixed point
  bool dist_bound_verified = false;
};

/// Bundle for constant lambda and harmonic-complement beta, for which all
/// moduli have one-line closed forms and the resulting rates are quadratic.
ModuliBundle quadratic_family_bundle(u128 dist_bound, double lambda_value);

/// Horizon-bounded empirical check of every modulus in the bundle against
/// the actual schedules, for all k <= k_max. Cauchy-modulus conditions are
/// quantified over tails inside the horizon only and the entries say so.
ValidationReport validate_moduli(const ModuliBundle& bundle,
                                 const Schedule& lambda, const Schedule& beta,
                                 std::size_t horizon, u64 k_max,
                                 double slack = 1e-9);

}  // namespace tmann
