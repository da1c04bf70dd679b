// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cpgcl/analysis_value.hpp"
#include "cpgcl/ast.hpp"
#include "cpgcl/expectation.hpp"

#include <optional>

namespace cpgcl {

/// Pre-expectation computed by structural recursion. Loops iterate their
/// characteristic functional with syntactic fixpoint detection; when no
/// fixpoint is found within the unroll depth the result is a bound:
/// a lower bound for wp (iteration from 0), an upper bound for wlp
/// (iteration from 1).
struct PreExpectationResult {
    Expectation value; // simplified
    bool exact = true;
    unsigned unroll_used = 0; // depth reached on some non-converged loop
};

inline constexpr unsigned kDefaultUnroll = 64;

PreExpectationResult wp(const Stmt& s, const Expectation& post,
                        unsigned unroll_depth = kDefaultUnroll);
PreExpectationResult wlp(const Stmt& s, const Expectation& post,
                         unsigned unroll_depth = kDefaultUnroll);

/// Pair of expectations with componentwise scalar multiplication and
/// addition, as used by the paired conditional transformer.
struct ExpectationPair {
    Expectation first;
    Expectation second;
};

struct CwpPairResult {
    PreExpectationResult first;  // expected-value component
    PreExpectationResult second; // observation-mass component
};

/// The paired conditional transformer, computed by its own literal pair
/// rules (loop iteration from (0,1)); deliberately not implemented via
/// wp/wlp so that the decoupling law can be cross-checked between two
/// independent routes. Rejects nondeterministic programs.
CwpPairResult cwp_pair(const Stmt& s, const Expectation& f, const Expectation& g,
                       unsigned unroll_depth = kDefaultUnroll);

/// Conditional weakest pre-expectation wp[P](f)/wlp[P](1) at one state.
/// Undefined for the 0/0 case (infeasible program). When loop iteration
/// yields only bounds, a sound interval is produced if post_bound (an upper
/// bound on f) is supplied; otherwise NonConvergent is raised.
AnalysisValue cwp(const Program& p, const Expectation& f, const State& sigma,
                  unsigned unroll_depth = kDefaultUnroll,
                  std::optional<Rational> post_bound = std::nullopt);

/// Liberal variant wlp[P](f)/wlp[P](1); f must be bounded by 1.
AnalysisValue cwlp(const Program& p, const Expectation& f, const State& sigma,
                   unsigned unroll_depth = kDefaultUnroll);

/// The four normalization quotients wp/wlp1, wlp/wlp1, wp/wp1, wlp/wp1
/// evaluated at one state. Values above 1 are flagged as informational
/// "not a probability"; zero denominators yield Undefined.
struct QuotientTable {
    AnalysisValue values[4];
    bool not_a_probability[4] = {false, false, false, false};
};

QuotientTable quotient_table(const Program& p, const Expectation& f, const State& sigma,
                             unsigned unroll_depth = kDefaultUnroll);

} // namespace cpgcl
