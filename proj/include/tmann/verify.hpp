#pragma once

#include <cstddef>
#include <functional>
#include <optional>

#include "tmann/iteration.hpp"
#include "tmann/rates.hpp"
#include "tmann/report.hpp"

namespace tmann {

enum class TraceQuantity { step_gap, t_gap };

const std::vector<double>& trace_quantity(const IterationTrace& trace,
                                          TraceQuantity q);
const char* trace_quantity_name(TraceQuantity q);

/// Checks that `rate` really bounds the chosen quantity: for every
/// k <= k_max the quantity is at most 1/(k+1)+slack at n = rate(k) and at
/// a strided sample of later indices (stride 1 checks every index).
/// Throws HorizonError, naming the required length, when rate(k_max) does
/// not fit inside the trace.
ValidationReport validate_rate(const IterationTrace& trace, const NatRate& rate,
                               TraceQuantity quantity, u64 k_max, double slack,
                               std::size_t stride = 97);

/// Evaluates, at every step of the trace, the consecutive-gap bounds, the
/// anchor-gap identity, the two t-gap bounds and the three orbit
/// boundedness facts. Needs a known fixed point for the bounds involving
/// the orbit radius; those entries are skipped (and say so) without one.
ValidationReport check_trace_inequalities(const IterationTrace& trace,
                                          double slack);

/// Least n such that the quantity stays at or below 1/(k+1) from n through
/// the end of the trace; nullopt when even the last index violates. Used
/// to measure how conservative a theoretical rate is.
std::optional<std::size_t> first_hit(const IterationTrace& trace,
                                     TraceQuantity quantity, u64 k);

/// A synthetic instance of the recurrence s_{n+1} = (1-decay_n) s_n +
/// perturb_n together with claimed moduli. Either route may be present:
/// a divergence rate for sum(decay_n), or a convergence rate for
/// prod(1-decay_n) plus a positive floor for that product at the
/// perturbation-modulus index.
struct RecurrenceInstance {
  std::function<double(std::size_t)> decay;    // values in [0,1]
  std::function<double(std::size_t)> perturb;  // nonnegative, summable
  double start = 0.0;                          // s_0 (ignored with `sequence`)
  u128 bound = 1;                              // positive upper bound on s_n
  NatRate perturb_mod = NatRate::constant(0);  // Cauchy modulus of sum(perturb)
  std::optional<NatRate> decay_div;            // divergence rate of sum(decay)
  std::optional<NatRate> residual_prod_rate;   // rate for prod(1-decay) -> 0
  std::optional<NatRate> prod_floor;           // 1/prod_floor(k) <= prod at mod index
  /// When set, these s_n are checked against the recurrence as an
  /// inequality instead of being generated with equality; the horizon
  /// becomes sequence.size()-1. This is how a recorded orbit is fed in.
  std::optional<std::vector<double>> sequence;
};

/// Generates the sequence with equality (or takes instance.sequence as
/// given), first validates every claimed modulus against it on the
/// horizon, then (only if all moduli hold) checks the rates produced by
/// the recurrence lemma on both available routes. Failing moduli
/// short-circuit: no rate claims are evaluated.
ValidationReport recurrence_harness(const RecurrenceInstance& instance,
                                    std::size_t horizon, u64 k_max,
                                    double slack);

}  // namespace tmann
