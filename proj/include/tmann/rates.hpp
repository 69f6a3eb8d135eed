#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "tmann/common.hpp"

namespace tmann {

/// Result of evaluating a rate. Tabulated rates built from a finite scan
/// cannot always produce the exact value: when the witness lies beyond the
/// scanned horizon the result is a certified lower bound instead. Lower
/// bounds propagate through the (monotone) rate formulas, so comparisons
/// like "this rate exceeds that one" stay sound.
struct RateValue {
  u128 value = 0;
  bool exact = true;

  static RateValue exactly(u128 v) { return {v, true}; }
  static RateValue at_least(u128 v) { return {v, false}; }

  std::string describe() const {
    return exact ? to_string_u128(value) : ">=" + to_string_u128(value);
  }
};

RateValue rv_add(RateValue a, RateValue b);
RateValue rv_max(RateValue a, RateValue b);
RateValue rv_max(RateValue a, RateValue b, RateValue c);

/// A monotone function on the naturals with exact integer semantics,
/// used for rates of convergence/divergence and Cauchy moduli. Closed
/// forms evaluate anywhere; tabulated rates refuse to extrapolate.
/// Composition is lazy: nothing is computed until eval().
class NatRate {
 public:
  static NatRate identity();
  static NatRate constant(u128 c);
  /// k -> a*k + b.
  static NatRate affine(u128 a, u128 b);
  /// Exact on [0, values.size()); beyond that throws HorizonError.
  /// Values must be nondecreasing.
  static NatRate table(std::vector<u64> values);
  /// Exact on [0, values.size()); beyond that reports at_least(floor).
  /// Values must be nondecreasing.
  static NatRate table_with_floor(std::vector<u64> values, u128 floor);
  /// Arbitrary composite; `fn` must be monotone in its argument.
  static NatRate function(std::string label, std::function<RateValue(RateValue)> fn);

  RateValue eval(u128 k) const;
  RateValue eval(RateValue k) const;

  const std::string& label() const;

 private:
  struct Impl;
  explicit NatRate(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Least j >= 0 with e^j >= m. Computed in double precision; when the
/// logarithm lands within 1e-9 of an integer the result is rounded up, so
/// the returned exponent never undershoots.
u64 ceil_ln(u128 m);

/// ceil(1/lambda) for lambda in (0,1], with the same near-integer guard.
u64 ceil_inv(double lambda);

// ---------------------------------------------------------------------------
// Rate formulas. Notation used below:
//   step gap   d(x_n, x_{n+1});  t-gap   d(x_n, T x_n);
//   dist_bound a positive natural >= max(d(x_0,p), d(u,p)) for a fixed
//              point p of T.
// A "rate" g for a quantity means quantity_n <= 1/(k+1) for all n >= g(k);
// a "Cauchy modulus" bounds all tail variations of a convergent series the
// same way; a "divergence rate" g satisfies: partial sums through g(n)
// reach n.
// ---------------------------------------------------------------------------

/// Cauchy modulus for the combined perturbation series
/// 2M(|beta_{n+1}-beta_n| + |lambda_{n+1}-lambda_n|): the max of the two
/// schedule difference moduli at 8*dist_bound*(k+1)-1.
RateValue perturbation_modulus(const NatRate& beta_diff_mod,
                               const NatRate& lambda_diff_mod, u128 dist_bound,
                               u128 k);
NatRate make_perturbation_modulus(NatRate beta_diff_mod, NatRate lambda_diff_mod,
                                  u128 dist_bound);

/// Step-gap rate from a divergence rate of sum(1-beta_n):
/// beta_sum_div(pert(3k+2) + 2 + ceil_ln(6*dist_bound*(k+1))) + 1.
RateValue step_rate_via_divergence(const NatRate& beta_sum_div,
                                   const NatRate& pert_mod, u128 dist_bound,
                                   u128 k);
NatRate make_step_rate_via_divergence(NatRate beta_sum_div, NatRate pert_mod,
                                      u128 dist_bound);

/// Step-gap rate from a rate for prod beta_{n+1} -> 0:
/// max{beta_prod_rate(6*dist_bound*(k+1)*prod_floor(k) - 1), pert(3k+2)+1} + 1.
/// prod_floor(k) must be positive: 1/prod_floor(k) lower-bounds the product
/// at index pert(3k+2).
RateValue step_rate_via_product(const NatRate& beta_prod_rate,
                                const NatRate& prod_floor,
                                const NatRate& pert_mod, u128 dist_bound, u128 k);
NatRate make_step_rate_via_product(NatRate beta_prod_rate, NatRate prod_floor,
                                   NatRate pert_mod, u128 dist_bound);

/// Which argument the beta->1 rate receives inside the t-gap transformer.
/// The sound choice carries the inv_lambda factor; the variant without it
/// is exposed for side-by-side comparison only.
enum class BetaToOneArg { with_inv_lambda, without_inv_lambda };

/// Turns any step-gap rate into a t-gap rate, given lambda_n >= 1/inv_lambda
/// from index inv_lambda_from on and a rate beta_to_one for beta_n -> 1:
/// max{inv_lambda_from, step_rate(2*inv_lambda*(k+1)-1),
///     beta_to_one(4*dist_bound*inv_lambda*(k+1)-1)}.
RateValue t_gap_rate_from_step_rate(const NatRate& step_rate, u64 inv_lambda_from,
                                    u128 inv_lambda, const NatRate& beta_to_one,
                                    u128 dist_bound, u128 k,
                                    BetaToOneArg variant = BetaToOneArg::with_inv_lambda);
NatRate make_t_gap_rate_from_step_rate(NatRate step_rate, u64 inv_lambda_from,
                                       u128 inv_lambda, NatRate beta_to_one,
                                       u128 dist_bound,
                                       BetaToOneArg variant = BetaToOneArg::with_inv_lambda);

/// Closed-form quadratic step-gap rate for constant lambda and
/// beta_n = 1 - 1/(n+1):  144*K^2*(k+1)^2 + 6*K*(k+1)  with K = dist_bound.
u128 quadratic_step_rate(u128 dist_bound, u128 k);

/// Closed-form quadratic t-gap rate for the same family, L = ceil(1/lambda):
/// 576*K^2*L^2*(k+1)^2 + 12*K*L*(k+1).
u128 quadratic_t_gap_rate(u128 dist_bound, double lambda, u128 k);

/// Divergence rate for sum(1-beta_{n+1}) from one for sum(1-beta_n):
/// n -> beta_sum_div(n+1).
RateValue shifted_divergence_rate(const NatRate& beta_sum_div, u128 n);
NatRate make_shifted_divergence_rate(NatRate beta_sum_div);

// Rates for the quantitative recurrence lemma: s_{n+1} <= (1-a_n)s_n + c_n
// with s_n <= bound, sum c_n convergent with Cauchy modulus perturb_mod.

/// Branch with sum a_n divergent (rate decay_div):
/// decay_div(perturb_mod(3k+2) + 1 + ceil_ln(3*bound*(k+1))) + 1.
RateValue recurrence_rate_via_divergence(const NatRate& decay_div,
                                         const NatRate& perturb_mod, u128 bound,
                                         u128 k);

/// Branch with prod(1-a_n) -> 0 (rate residual_prod_rate, floor prod_floor):
/// max{residual_prod_rate(3*bound*(k+1)*prod_floor(k) - 1),
///     perturb_mod(3k+2)+1} + 1.
RateValue recurrence_rate_via_product(const NatRate& residual_prod_rate,
                                      const NatRate& prod_floor,
                                      const NatRate& perturb_mod, u128 bound,
                                      u128 k);

}  // namespace tmann
