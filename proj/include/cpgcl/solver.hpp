// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cpgcl/analysis_value.hpp"
#include "cpgcl/rmdp.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace cpgcl {

/// Chosen action per nondeterministic state.
using SchedulerAssignment = std::map<std::uint32_t, Action>;

/// Probability of eventually reaching a state carrying one of the labels
/// in `target_mask`, from the initial state. Exact rational linear solve
/// (SCC-decomposed Gaussian elimination) after a graph pre-pass that pins
/// states that cannot reach the target to 0. Requires a fully
/// probabilistic, frontier-free model.
Rational reach_prob(const Rmdp& m, std::uint8_t target_mask);

/// Expected reward accumulated along paths that reach the sink, i.e. the
/// probability-weighted sum of path rewards over sink-reaching paths
/// (non-reaching paths contribute nothing). Throws NonConvergent when a
/// reachable reward-positive bottom SCC avoids the sink.
Rational expected_reward(const Rmdp& m);

/// expected_reward plus the probability of never reaching the sink.
/// Rewards must be bounded by 1.
Rational liberal_expected_reward(const Rmdp& m);

/// Conditional (liberal) expected reward of reaching the sink given that
/// the bad state is never visited: rewards over bad-avoiding sink paths
/// divided by 1 - Pr(reach bad). Undefined iff the denominator is 0.
AnalysisValue conditional_expected_reward(const Rmdp& m, bool liberal = false);

/// Sound interval for the conditional value of a partially unfolded model.
/// Rewards must be bounded by post_bound. The unresolved frontier mass
/// widens both the numerator (by at most mass * post_bound) and the bad
/// probability (by at most the mass).
struct BoundedConditional {
    AnalysisValue value;       // Interval, Exact when fully resolved, or Undefined
    Rational unresolved_mass;  // probability of reaching the frontier
    std::size_t frontier_size = 0;
};
BoundedConditional bounded_conditional(const Rmdp& m, const Rational& post_bound,
                                       bool liberal = false);

/// Demonic scheduler enumeration: evaluates the conditional expected
/// reward under every action assignment of the (acyclic-fragment)
/// nondeterministic states and minimizes under the convention that the
/// undefined 0/0 orders below every rational. The witness is the first
/// minimizing assignment in binary counting order.
struct MinConditionalResult {
    AnalysisValue value;
    SchedulerAssignment scheduler;
    /// All enumerated values in assignment order (2^n entries).
    std::vector<AnalysisValue> enumerated;
};
MinConditionalResult min_conditional(const Rmdp& m, std::size_t budget = 20,
                                     bool liberal = false, bool parallel = true);

/// The fully probabilistic model induced by fixing the scheduler choices.
Rmdp induce(const Rmdp& m, const SchedulerAssignment& sched);

} // namespace cpgcl
