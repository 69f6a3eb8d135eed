#include "tmann/rates.hpp"

#include <cmath>

namespace tmann {

RateValue rv_add(RateValue a, RateValue b) {
  return {checked_add(a.value, b.value), a.exact && b.exact};
}

RateValue rv_max(RateValue a, RateValue b) {
  return {a.value > b.value ? a.value : b.value, a.exact && b.exact};
}

RateValue rv_max(RateValue a, RateValue b, RateValue c) {
  return rv_max(rv_max(a, b), c);
}

struct NatRate::Impl {
  enum class Kind { identity, constant, affine, table, function };

  Kind kind = Kind::identity;
  u128 a = 0;
  u128 b = 0;
  std::vector<u64> values;
  bool has_floor = false;
  u128 floor = 0;
  std::function<RateValue(RateValue)> fn;
  std::string label;
};

NatRate NatRate::identity() {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::identity;
  impl->label = "identity";
  return NatRate(std::move(impl));
}

NatRate NatRate::constant(u128 c) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::constant;
  impl->b = c;
  impl->label = "constant(" + to_string_u128(c) + ")";
  return NatRate(std::move(impl));
}

NatRate NatRate::affine(u128 a, u128 b) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::affine;
  impl->a = a;
  impl->b = b;
  impl->label = "affine(" + to_string_u128(a) + "," + to_string_u128(b) + ")";
  return NatRate(std::move(impl));
}

NatRate NatRate::table(std::vector<u64> values) {
  if (values.empty()) throw InputError("tabulated rate needs at least one value");
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[i - 1]) {
      throw InputError("tabulated rate must be nondecreasing");
    }
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::table;
  impl->values = std::move(values);
  impl->label = "table[" + std::to_string(impl->values.size()) + "]";
  return NatRate(std::move(impl));
}

NatRate NatRate::table_with_floor(std::vector<u64> values, u128 floor) {
  if (values.empty()) throw InputError("tabulated rate needs at least one value");
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[i - 1]) {
      throw InputError("tabulated rate with floor must be nondecreasing");
    }
  }
  if (floor < values.back()) {
    throw InputError("tabulated rate floor below the last table value");
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::table;
  impl->values = std::move(values);
  impl->has_floor = true;
  impl->floor = floor;
  impl->label = "table[" + std::to_string(impl->values.size()) + "]+";
  return NatRate(std::move(impl));
}

NatRate NatRate::function(std::string label,
                          std::function<RateValue(RateValue)> fn) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::function;
  impl->fn = std::move(fn);
  impl->label = std::move(label);
  return NatRate(std::move(impl));
}

RateValue NatRate::eval(u128 k) const { return eval(RateValue::exactly(k)); }

RateValue NatRate::eval(RateValue k) const {
  switch (impl_->kind) {
    case Impl::Kind::identity:
      return k;
    case Impl::Kind::constant:
      return RateValue::exactly(impl_->b);
    case Impl::Kind::affine:
      if (impl_->a == 0) return RateValue::exactly(impl_->b);
      return {checked_add(checked_mul(impl_->a, k.value), impl_->b), k.exact};
    case Impl::Kind::table: {
      const u128 size = impl_->values.size();
      if (k.value < size) {
        const u128 v = impl_->values[static_cast<std::size_t>(k.value)];
        // A lower-bound argument stays a lower bound (the table is monotone).
        return {v, k.exact};
      }
      if (impl_->has_floor) return RateValue::at_least(impl_->floor);
      throw HorizonError("tabulated rate " + impl_->label + " has no value at " +
                         k.describe() + "; extend the tabulation horizon to cover it");
    }
    case Impl::Kind::function:
      return impl_->fn(k);
  }
  throw InputError("corrupt rate descriptor");
}

const std::string& NatRate::label() const { return impl_->label; }

u64 ceil_ln(u128 m) {
  if (m == 0) throw InputError("ceil_ln needs a positive argument");
  if (m == 1) return 0;
  const double l = std::log(to_double_u128(m));
  const double nearest = std::nearbyint(l);
  // Round up at the boundary: an over-estimated exponent keeps rates valid.
  if (std::abs(l - nearest) <= 1e-9) return static_cast<u64>(nearest) + 1;
  return static_cast<u64>(std::ceil(l));
}

u64 ceil_inv(double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw InputError("lambda must lie in (0,1], got " + std::to_string(lambda));
  }
  const double r = 1.0 / lambda;
  const double nearest = std::nearbyint(r);
  if (std::abs(r - nearest) <= 1e-9) return static_cast<u64>(nearest);
  return static_cast<u64>(std::ceil(r));
}

namespace {

void require_positive(u128 v, const char* what) {
  if (v == 0) throw InputError(std::string(what) + " must be >= 1");
}

// 8*K*(k+1) - 1 and friends; every subtraction here is of the form
// (positive product) - 1, so checked_sub only fires on a genuine zero.
RateValue scaled_index(u128 factor, u128 k_plus_1, u128 extra) {
  const u128 prod = checked_mul(factor, checked_mul(k_plus_1, extra));
  return RateValue::exactly(checked_sub(prod, 1));
}

}  // namespace

RateValue perturbation_modulus(const NatRate& beta_diff_mod,
                               const NatRate& lambda_diff_mod, u128 dist_bound,
                               u128 k) {
  require_positive(dist_bound, "dist_bound");
  const RateValue arg = scaled_index(checked_mul(8, dist_bound), checked_add(k, 1), 1);
  return rv_max(beta_diff_mod.eval(arg), lambda_diff_mod.eval(arg));
}

NatRate make_perturbation_modulus(NatRate beta_diff_mod, NatRate lambda_diff_mod,
                                  u128 dist_bound) {
  require_positive(dist_bound, "dist_bound");
  return NatRate::function(
      "perturbation_modulus", [=](RateValue k) {
        if (!k.exact) throw HorizonError("perturbation modulus needs an exact index");
        return perturbation_modulus(beta_diff_mod, lambda_diff_mod, dist_bound,
                                    k.value);
      });
}

RateValue step_rate_via_divergence(const NatRate& beta_sum_div,
                                   const NatRate& pert_mod, u128 dist_bound,
                                   u128 k) {
  require_positive(dist_bound, "dist_bound");
  const u128 k1 = checked_add(k, 1);
  const RateValue chi = pert_mod.eval(checked_add(checked_mul(3, k), 2));
  const u64 log_term = ceil_ln(checked_mul(checked_mul(6, dist_bound), k1));
  const RateValue arg = rv_add(chi, RateValue::exactly(checked_add(2, log_term)));
  return rv_add(beta_sum_div.eval(arg), RateValue::exactly(1));
}

NatRate make_step_rate_via_divergence(NatRate beta_sum_div, NatRate pert_mod,
                                      u128 dist_bound) {
  require_positive(dist_bound, "dist_bound");
  return NatRate::function(
      "step_rate_via_divergence", [=](RateValue k) {
        if (!k.exact) throw HorizonError("step rate needs an exact index");
        return step_rate_via_divergence(beta_sum_div, pert_mod, dist_bound, k.value);
      });
}

RateValue step_rate_via_product(const NatRate& beta_prod_rate,
                                const NatRate& prod_floor,
                                const NatRate& pert_mod, u128 dist_bound,
                                u128 k) {
  require_positive(dist_bound, "dist_bound");
  const u128 k1 = checked_add(k, 1);
  const RateValue chi = pert_mod.eval(checked_add(checked_mul(3, k), 2));
  const RateValue floor = prod_floor.eval(k);
  if (floor.value == 0) throw InputError("prod_floor must take positive values");
  if (!floor.exact) throw HorizonError("prod_floor must evaluate exactly");
  const RateValue prod_arg = scaled_index(checked_mul(6, dist_bound), k1, floor.value);
  return rv_add(rv_max(beta_prod_rate.eval(prod_arg),
                       rv_add(chi, RateValue::exactly(1))),
                RateValue::exactly(1));
}

NatRate make_step_rate_via_product(NatRate beta_prod_rate, NatRate prod_floor,
                                   NatRate pert_mod, u128 dist_bound) {
  require_positive(dist_bound, "dist_bound");
  return NatRate::function(
      "step_rate_via_product", [=](RateValue k) {
        if (!k.exact) throw HorizonError("step rate needs an exact index");
        return step_rate_via_product(beta_prod_rate, prod_floor, pert_mod,
                                     dist_bound, k.value);
      });
}

RateValue t_gap_rate_from_step_rate(const NatRate& step_rate, u64 inv_lambda_from,
                                    u128 inv_lambda, const NatRate& beta_to_one,
                                    u128 dist_bound, u128 k, BetaToOneArg variant) {
  require_positive(inv_lambda, "inv_lambda");
  require_positive(dist_bound, "dist_bound");
  const u128 k1 = checked_add(k, 1);
  const RateValue step_arg = scaled_index(checked_mul(2, inv_lambda), k1, 1);
  const u128 beta_factor = variant == BetaToOneArg::with_inv_lambda
                               ? checked_mul(checked_mul(4, dist_bound), inv_lambda)
                               : checked_mul(4, dist_bound);
  const RateValue beta_arg = scaled_index(beta_factor, k1, 1);
  return rv_max(RateValue::exactly(inv_lambda_from), step_rate.eval(step_arg),
                beta_to_one.eval(beta_arg));
}

NatRate make_t_gap_rate_from_step_rate(NatRate step_rate, u64 inv_lambda_from,
                                       u128 inv_lambda, NatRate beta_to_one,
                                       u128 dist_bound, BetaToOneArg variant) {
  require_positive(inv_lambda, "inv_lambda");
  require_positive(dist_bound, "dist_bound");
  return NatRate::function(
      "t_gap_rate", [=](RateValue k) {
        if (!k.exact) throw HorizonError("t-gap rate needs an exact index");
        return t_gap_rate_from_step_rate(step_rate, inv_lambda_from, inv_lambda,
                                         beta_to_one, dist_bound, k.value, variant);
      });
}

u128 quadratic_step_rate(u128 dist_bound, u128 k) {
  require_positive(dist_bound, "dist_bound");
  const u128 k1 = checked_add(k, 1);
  const u128 quad = checked_mul(144, checked_mul(checked_mul(dist_bound, dist_bound),
                                                 checked_mul(k1, k1)));
  return checked_add(quad, checked_mul(6, checked_mul(dist_bound, k1)));
}

u128 quadratic_t_gap_rate(u128 dist_bound, double lambda, u128 k) {
  require_positive(dist_bound, "dist_bound");
  const u128 inv = ceil_inv(lambda);
  const u128 k1 = checked_add(k, 1);
  const u128 kl = checked_mul(dist_bound, inv);
  const u128 quad = checked_mul(576, checked_mul(checked_mul(kl, kl),
                                                 checked_mul(k1, k1)));
  return checked_add(quad, checked_mul(12, checked_mul(kl, k1)));
}

RateValue shifted_divergence_rate(const NatRate& beta_sum_div, u128 n) {
  return beta_sum_div.eval(checked_add(n, 1));
}

NatRate make_shifted_divergence_rate(NatRate beta_sum_div) {
  return NatRate::function(
      "shifted(" + beta_sum_div.label() + ")", [=](RateValue n) {
        return beta_sum_div.eval(rv_add(n, RateValue::exactly(1)));
      });
}

RateValue recurrence_rate_via_divergence(const NatRate& decay_div,
                                         const NatRate& perturb_mod, u128 bound,
                                         u128 k) {
  require_positive(bound, "bound");
  const u128 k1 = checked_add(k, 1);
  const RateValue chi = perturb_mod.eval(checked_add(checked_mul(3, k), 2));
  const u64 log_term = ceil_ln(checked_mul(checked_mul(3, bound), k1));
  const RateValue arg = rv_add(chi, RateValue::exactly(checked_add(1, log_term)));
  return rv_add(decay_div.eval(arg), RateValue::exactly(1));
}

RateValue recurrence_rate_via_product(const NatRate& residual_prod_rate,
                                      const NatRate& prod_floor,
                                      const NatRate& perturb_mod, u128 bound,
                                      u128 k) {
  require_positive(bound, "bound");
  const u128 k1 = checked_add(k, 1);
  const RateValue chi = perturb_mod.eval(checked_add(checked_mul(3, k), 2));
  const RateValue floor = prod_floor.eval(k);
  if (floor.value == 0) throw InputError("prod_floor must take positive values");
  if (!floor.exact) throw HorizonError("prod_floor must evaluate exactly");
  const RateValue prod_arg = scaled_index(checked_mul(3, bound), k1, floor.value);
  return rv_add(rv_max(residual_prod_rate.eval(prod_arg),
                       rv_add(chi, RateValue::exactly(1))),
                RateValue::exactly(1));
}

}  // namespace tmann
