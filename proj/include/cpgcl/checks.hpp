// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cpgcl {

/// Outcome of one randomized cross-validation suite. The suites pit
/// independent computation routes against each other (symbolic transformer
/// vs. operational model, paired transformer vs. separate runs, original
/// vs. transformed program) on generated programs with fixed seeds.
struct CheckResult {
    std::string name;
    std::size_t tested = 0;
    std::size_t skipped = 0; // discarded instances (e.g. infeasible where required)
    std::size_t failed = 0;
    std::string first_failure;

    bool pass() const { return failed == 0 && tested > 0; }
    std::string summary() const;
};

// expected value & conditional value: transformer route vs. model route
CheckResult check_correspondence(std::uint64_t seed, std::size_t n);
// paired conditional transformer vs. separate wp/wlp runs, pointwise
CheckResult check_decoupling(std::uint64_t seed, std::size_t n);
// observation-violation probability: 1 - Pr(bad) vs. liberal mass of 1
CheckResult check_wlp_bad(std::uint64_t seed, std::size_t n);
// linearity and monotonicity of the conditional value on feasible inputs
CheckResult check_linearity(std::uint64_t seed, std::size_t n);
// rerun-loop elimination preserves the conditional value
CheckResult check_deobserve(std::uint64_t seed, std::size_t n);
// loop bound sequences are monotone in the unrolling depth
CheckResult check_unrolling(std::uint64_t seed, std::size_t n);
// hoisted program reproduces the conditional value; side expectation
// equals the liberal mass of 1
CheckResult check_hoist(std::uint64_t seed, std::size_t n);
// observation-free programs: conditional semantics collapses to the plain one
CheckResult check_conservativity(std::uint64_t seed, std::size_t n);
// parse(pretty_print(ast)) is the identity
CheckResult check_parser_roundtrip(std::uint64_t seed, std::size_t n);
// explicit model format: save(load(t)) is canonical and idempotent
CheckResult check_model_roundtrip(std::uint64_t seed, std::size_t n);
// OpenMP scheduler enumeration agrees with the serial reference
CheckResult check_parallel_enumeration(std::uint64_t seed, std::size_t n);
// loopy programs whose unfolding closes: the symbolic result (exact or
// interval) agrees with / encloses the exact model value
CheckResult check_loop_bounds(std::uint64_t seed, std::size_t n);

/// All suites at their default sizes (seed offsets fixed per suite).
std::vector<CheckResult> run_all_checks(std::uint64_t seed);

/// One suite by CLI name; throws ParameterError for unknown names.
CheckResult run_check(const std::string& property, std::uint64_t seed, std::size_t n);

std::vector<std::string> check_names();

} // namespace cpgcl
