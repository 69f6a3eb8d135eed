#include "doctest.h"

#include <cmath>

#include "tmann/rates.hpp"
#include "tmann/schedule.hpp"

using namespace tmann;

namespace {

u128 exact(const RateValue& v) {
  REQUIRE(v.exact);
  return v.value;
}

}  // namespace

TEST_CASE("ceil_ln is the least exponent whose exponential reaches m") {
  CHECK(ceil_ln(1) == 0);
  CHECK(ceil_ln(2) == 1);
  CHECK(ceil_ln(3) == 2);
  CHECK(ceil_ln(6) == 2);
  CHECK(ceil_ln(7) == 2);
  CHECK(ceil_ln(8) == 3);
  CHECK(ceil_ln(12) == 3);
  CHECK_THROWS_AS(ceil_ln(0), InputError);

  // Exhaustive against a long-double scan for small arguments.
  for (u128 m = 1; m <= 5000; ++m) {
    u64 j = 0;
    while (std::exp(static_cast<long double>(j)) <
           static_cast<long double>(static_cast<double>(static_cast<u64>(m)))) {
      ++j;
    }
    CHECK(ceil_ln(m) >= j);       // never undershoots (validity)
    CHECK(ceil_ln(m) <= j + 1);   // at most one step of slack
  }
}

TEST_CASE("ceil_inv handles exact and inexact reciprocals") {
  CHECK(ceil_inv(1.0) == 1);
  CHECK(ceil_inv(0.5) == 2);
  CHECK(ceil_inv(0.25) == 4);
  CHECK(ceil_inv(0.3) == 4);
  CHECK(ceil_inv(1.0 / 3.0) == 3);
  CHECK_THROWS_AS(ceil_inv(0.0), InputError);
  CHECK_THROWS_AS(ceil_inv(1.5), InputError);
}

TEST_CASE("closed-form rate descriptors evaluate exactly") {
  CHECK(exact(NatRate::identity().eval(u128(17))) == 17);
  CHECK(exact(NatRate::constant(4).eval(u128(1000))) == 4);
  CHECK(exact(NatRate::affine(3, 2).eval(u128(10))) == 32);

  const NatRate tab = NatRate::table({5, 6, 9});
  CHECK(exact(tab.eval(u128(2))) == 9);
  CHECK_THROWS_AS(tab.eval(u128(3)), HorizonError);
  CHECK_THROWS_AS(NatRate::table({5, 4}), InputError);

  const NatRate floor_tab = NatRate::table_with_floor({5, 6, 9}, 100);
  const RateValue beyond = floor_tab.eval(u128(3));
  CHECK_FALSE(beyond.exact);
  CHECK(beyond.value == 100);
  CHECK(beyond.describe() == ">=100");
  CHECK_THROWS_AS(NatRate::table_with_floor({5, 3}, 10), InputError);
}

TEST_CASE("lower bounds propagate through monotone formulas") {
  const NatRate floor_tab = NatRate::table_with_floor({0, 1}, 50);
  // affine on a lower-bound argument stays a lower bound
  const RateValue v = NatRate::affine(2, 1).eval(RateValue::at_least(10));
  CHECK_FALSE(v.exact);
  CHECK(v.value == 21);
  // constants are exact regardless
  CHECK(NatRate::constant(7).eval(RateValue::at_least(10)).exact);
  // max with any inexact member is inexact
  CHECK_FALSE(rv_max(RateValue::exactly(100), RateValue::at_least(3)).exact);
  CHECK(rv_max(RateValue::exactly(100), RateValue::at_least(3)).value == 100);
  // a monotone table maps a lower-bound argument to a lower bound
  CHECK_FALSE(floor_tab.eval(RateValue::at_least(1)).exact);
  CHECK(floor_tab.eval(RateValue::at_least(1)).value == 1);
}

TEST_CASE("perturbation modulus") {
  CHECK(exact(perturbation_modulus(NatRate::identity(), NatRate::constant(0), 1, 0)) == 7);
  CHECK(exact(perturbation_modulus(NatRate::constant(0), NatRate::constant(0), 5, 9)) == 0);
  CHECK(exact(perturbation_modulus(NatRate::identity(), NatRate::constant(0), 2, 3)) == 63);
}

TEST_CASE("step rate via the divergence route") {
  const NatRate chi0 = NatRate::constant(0);
  CHECK(exact(step_rate_via_divergence(NatRate::identity(), chi0, 1, 0)) == 5);
  CHECK(exact(step_rate_via_divergence(NatRate::identity(), chi0, 1, 1)) == 6);
}

TEST_CASE("step rate via the product route") {
  const ModuliBundle b = quadratic_family_bundle(1, 0.5);
  const NatRate chi =
      make_perturbation_modulus(*b.beta_diff_mod, *b.lambda_diff_mod, 1);
  CHECK(exact(step_rate_via_product(*b.beta_prod_rate, *b.prod_floor, chi, 1, 0)) == 150);
  CHECK(exact(step_rate_via_product(*b.beta_prod_rate, *b.prod_floor, chi, 1, 1)) == 588);

  // Degenerate moduli: the perturbation-modulus branch of the max wins.
  CHECK(exact(step_rate_via_product(NatRate::constant(0), NatRate::constant(1),
                                    NatRate::constant(0), 1, 0)) == 2);
  CHECK_THROWS_AS(step_rate_via_product(NatRate::constant(0), NatRate::constant(0),
                                        NatRate::constant(0), 1, 0),
                  InputError);
}

TEST_CASE("t-gap rate transformer") {
  const ModuliBundle b = quadratic_family_bundle(1, 0.5);
  const NatRate chi =
      make_perturbation_modulus(*b.beta_diff_mod, *b.lambda_diff_mod, 1);
  const NatRate step =
      make_step_rate_via_product(*b.beta_prod_rate, *b.prod_floor, chi, 1);
  CHECK(exact(t_gap_rate_from_step_rate(step, 0, 2, NatRate::identity(), 1, 0)) == 2328);

  CHECK(exact(t_gap_rate_from_step_rate(NatRate::constant(0), 5, 1,
                                        NatRate::constant(0), 1, 0)) == 5);
  CHECK(exact(t_gap_rate_from_step_rate(NatRate::constant(0), 5, 1,
                                        NatRate::constant(0), 1, 3)) == 5);
  CHECK(exact(t_gap_rate_from_step_rate(NatRate::identity(), 0, 1,
                                        NatRate::identity(), 1, 0)) == 3);
}

TEST_CASE("the two beta_to_one argument variants differ where they should") {
  // With a large lambda floor the variant without the factor asks less of
  // beta_to_one; the sound variant dominates it.
  const u128 with_factor = exact(t_gap_rate_from_step_rate(
      NatRate::constant(0), 0, 5, NatRate::identity(), 1, 0,
      BetaToOneArg::with_inv_lambda));
  const u128 without = exact(t_gap_rate_from_step_rate(
      NatRate::constant(0), 0, 5, NatRate::identity(), 1, 0,
      BetaToOneArg::without_inv_lambda));
  CHECK(with_factor == 19);  // beta_to_one(4*1*5*1 - 1)
  CHECK(without == 3);       // beta_to_one(4*1*1 - 1)
  CHECK(with_factor > without);
}

TEST_CASE("quadratic closed forms") {
  CHECK(quadratic_step_rate(1, 0) == 150);
  CHECK(quadratic_step_rate(1, 1) == 588);
  CHECK(quadratic_step_rate(1, 2) == 1314);  // 144*9 + 6*3
  CHECK(quadratic_step_rate(3, 0) == 1314);  // 144*9 + 18: same value by chance
  CHECK(quadratic_t_gap_rate(1, 0.5, 0) == 2328);
  CHECK(quadratic_t_gap_rate(1, 1.0, 0) == 588);
  CHECK(quadratic_t_gap_rate(1, 0.5, 1) == 9264);
  CHECK(quadratic_t_gap_rate(1, 0.5, 2) == 20808);
}

TEST_CASE("shifted divergence rate") {
  CHECK(exact(shifted_divergence_rate(NatRate::identity(), 4)) == 5);
  CHECK(exact(shifted_divergence_rate(NatRate::constant(0), 0)) == 0);

  // beta == 0: rate(n) = max(n-1, 0); the shift covers the dropped first term.
  const NatRate numeric = numeric_beta_sum_div(Schedule::constant(0.0), 100);
  CHECK(exact(shifted_divergence_rate(numeric, 3)) == 3);
  double sum = 0.0;
  for (std::size_t i = 0; i <= 3; ++i) sum += 1.0;  // 1 - beta_{i+1} = 1
  CHECK(sum >= 3.0);
}

TEST_CASE("recurrence-lemma rates") {
  const NatRate chi0 = NatRate::constant(0);
  CHECK(exact(recurrence_rate_via_divergence(NatRate::identity(), chi0, 1, 0)) == 4);
  CHECK(exact(recurrence_rate_via_divergence(NatRate::identity(), chi0, 1, 1)) == 4);
  CHECK(exact(recurrence_rate_via_divergence(NatRate::constant(0), chi0, 7, 2)) == 1);

  CHECK(exact(recurrence_rate_via_product(NatRate::identity(), NatRate::constant(1),
                                          chi0, 1, 0)) == 3);
  CHECK(exact(recurrence_rate_via_product(NatRate::constant(0), NatRate::constant(1),
                                          chi0, 1, 0)) == 2);
}

TEST_CASE("the divergence-route step rate is the recurrence rate after the shift") {
  // Composing the lemma rate with the shifted divergence rate and the
  // doubled bound must reproduce the step-rate formula exactly, for any
  // moduli. Exercise closed forms and a numeric tabulation.
  const std::vector<NatRate> sum_rates = {
      NatRate::identity(), NatRate::affine(3, 2),
      numeric_beta_sum_div(Schedule::harmonic_complement(), 2000)};
  const std::vector<NatRate> chis = {NatRate::constant(0), NatRate::affine(1, 4)};
  for (const NatRate& sum_rate : sum_rates) {
    for (const NatRate& chi : chis) {
      for (u128 dist_bound : {1, 2, 5}) {
        for (u64 k = 0; k <= 40; ++k) {
          const RateValue direct =
              step_rate_via_divergence(sum_rate, chi, dist_bound, k);
          const RateValue composed = recurrence_rate_via_divergence(
              make_shifted_divergence_rate(sum_rate), chi,
              checked_mul(2, dist_bound), k);
          CHECK(direct.exact == composed.exact);
          CHECK(direct.value == composed.value);
        }
      }
    }
  }
}

TEST_CASE("the product-route step rate is the recurrence rate with doubled bound") {
  for (u128 dist_bound : {1, 2, 3}) {
    const ModuliBundle b = quadratic_family_bundle(dist_bound, 0.5);
    const NatRate chi = make_perturbation_modulus(*b.beta_diff_mod,
                                                  *b.lambda_diff_mod, dist_bound);
    for (u64 k = 0; k <= 100; ++k) {
      const u128 direct = exact(step_rate_via_product(
          *b.beta_prod_rate, *b.prod_floor, chi, dist_bound, k));
      const u128 lemma = exact(recurrence_rate_via_product(
          *b.beta_prod_rate, *b.prod_floor, chi, checked_mul(2, dist_bound), k));
      CHECK(direct == lemma);
    }
  }
}

TEST_CASE("pipeline rates reproduce the closed forms exactly") {
  for (u128 dist_bound : {1, 2, 3}) {
    for (double lambda : {1.0, 0.5, 0.25}) {
      const ModuliBundle b = quadratic_family_bundle(dist_bound, lambda);
      const NatRate chi = make_perturbation_modulus(
          *b.beta_diff_mod, *b.lambda_diff_mod, dist_bound);
      const NatRate step = make_step_rate_via_product(*b.beta_prod_rate,
                                                      *b.prod_floor, chi,
                                                      dist_bound);
      const NatRate t_gap = make_t_gap_rate_from_step_rate(
          step, b.inv_lambda_from, b.inv_lambda, *b.beta_to_one, dist_bound);
      for (u64 k = 0; k <= 100; ++k) {
        CHECK(exact(step.eval(static_cast<u128>(k))) ==
              quadratic_step_rate(dist_bound, k));
        CHECK(exact(t_gap.eval(static_cast<u128>(k))) ==
              quadratic_t_gap_rate(dist_bound, lambda, k));
      }
    }
  }
}

TEST_CASE("rates are nondecreasing in k on the built-in bundles") {
  for (u128 dist_bound : {1, 2, 3}) {
    const ModuliBundle b = quadratic_family_bundle(dist_bound, 0.25);
    const NatRate chi = make_perturbation_modulus(*b.beta_diff_mod,
                                                  *b.lambda_diff_mod, dist_bound);
    const NatRate step = make_step_rate_via_product(*b.beta_prod_rate,
                                                    *b.prod_floor, chi,
                                                    dist_bound);
    const NatRate t_gap = make_t_gap_rate_from_step_rate(
        step, b.inv_lambda_from, b.inv_lambda, *b.beta_to_one, dist_bound);
    u128 prev_step = 0, prev_t = 0;
    for (u64 k = 0; k <= 100; ++k) {
      const u128 s = exact(step.eval(static_cast<u128>(k)));
      const u128 t = exact(t_gap.eval(static_cast<u128>(k)));
      CHECK(s >= prev_step);
      CHECK(t >= prev_t);
      prev_step = s;
      prev_t = t;
    }
  }
}

TEST_CASE("overflow is an error, never a wraparound") {
  const u128 huge = u128(1) << 100;
  CHECK_THROWS_AS(quadratic_step_rate(huge, 1), RateOverflowError);
  CHECK_THROWS_AS(checked_mul(huge, huge), RateOverflowError);
  CHECK_THROWS_AS(checked_sub(0, 1), RateOverflowError);
  CHECK_THROWS_AS(NatRate::affine(huge, 0).eval(RateValue::exactly(huge)),
                  RateOverflowError);
  CHECK(checked_add(huge, huge) == u128(1) << 101);
}

TEST_CASE("formula preconditions") {
  CHECK_THROWS_AS(perturbation_modulus(NatRate::identity(), NatRate::identity(), 0, 0),
                  InputError);
  CHECK_THROWS_AS(t_gap_rate_from_step_rate(NatRate::identity(), 0, 0,
                                            NatRate::identity(), 1, 0),
                  InputError);
}

TEST_CASE("a tabulated divergence rate turns exhausted lookups into lower bounds") {
  // The harmonic-complement series diverges like log n, so the scan horizon
  // caps the arguments the tabulation can answer exactly.
  const NatRate numeric = numeric_beta_sum_div(Schedule::harmonic_complement(), 10000);
  const NatRate chi = NatRate::affine(8, 7);  // the dist_bound=1 modulus shape
  const RateValue big = step_rate_via_divergence(numeric, chi, 1, 3);
  CHECK_FALSE(big.exact);
  CHECK(big.value >= 10001);
}
