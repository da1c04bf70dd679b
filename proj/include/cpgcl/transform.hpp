// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cpgcl/ast.hpp"
#include "cpgcl/expectation.hpp"

#include <string>

namespace cpgcl {

/// Result of observation hoisting: an observe-free program and the side
/// expectation capturing the probability of establishing every observation.
struct HoistResult {
    StmtPtr program;
    Expectation h;
};

/// Hoists observations out of a fully probabilistic program, rewriting
/// probabilistic-choice annotations so that branch probabilities absorb
/// the observation mass. Loop side-expectations are greatest fixed points,
/// found by iteration from 1 with syntactic detection; exceeding
/// max_loop_iters raises LoopFixpointNotFound.
HoistResult hoist(const Stmt& s, const Expectation& f, unsigned max_loop_iters = 50);

/// Program-level wrapper: hoists with post-expectation 1 and rebuilds the
/// variable/parameter tables. Parameters must be instantiated first.
struct HoistProgramResult {
    Program program;
    Expectation h;
};
HoistProgramResult hoist_program(const Program& p, unsigned max_loop_iters = 50);

/// Replaces every observation by a rerun flag plus a restarting wrapper
/// loop that restores the initial values on every retry. Fresh variables
/// use the reserved "__" prefix. Works on any program; the semantic
/// equivalence is stated for fully probabilistic inputs.
Program observe_to_loop(const Program& p);

/// For an iid loop while(G){B}, returns "B; observe(!G)".
/// Raises NotIid when the syntactic criterion fails.
StmtPtr loop_to_observe(const Stmt& while_stmt);

/// Sound syntactic iid criterion: every variable read by the body or the
/// guard must be definitely assigned, on every body path, from values that
/// do not depend on the previous iteration. Returns false on any doubt;
/// `offending` receives the first violating variable name.
bool iid_check(const Stmt& while_stmt, std::string* offending = nullptr);

/// Local cleanup pass used after hoisting (--simplify): dead probabilistic
/// branches (p = 0 or 1), conditionals with identical branches, and skip
/// units in sequencing.
StmtPtr simplify_stmt(const StmtPtr& s);

} // namespace cpgcl
