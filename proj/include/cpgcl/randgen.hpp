// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cpgcl/ast.hpp"
#include "cpgcl/expectation.hpp"
#include "cpgcl/state.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cpgcl {

/// Deterministic splitmix64 generator; results are identical across
/// platforms for fixed seeds, which keeps the randomized suites stable.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }
    long range(long lo, long hi) { // inclusive
        return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }
    bool chance(unsigned percent) { return below(100) < percent; }
    /// Rational in [0,1] with denominator at most max_den.
    Rational probability(unsigned max_den = 8) {
        unsigned den = static_cast<unsigned>(range(1, static_cast<long>(max_den)));
        unsigned num = static_cast<unsigned>(range(0, static_cast<long>(den)));
        return Rational(static_cast<long>(num), static_cast<long>(den));
    }

private:
    std::uint64_t state_;
};

struct GenOptions {
    unsigned max_depth = 6;
    unsigned num_vars = 4;
    long min_const = -3;
    long max_const = 3;
    bool loops = false;
    bool nondet = false;
    bool observe = true;
    bool abort = true;
};

std::vector<std::string> gen_var_names(const GenOptions& o);
AExpPtr gen_aexp(Rng& rng, const GenOptions& o, unsigned depth);
BExpPtr gen_bexp(Rng& rng, const GenOptions& o, unsigned depth);
StmtPtr gen_stmt(Rng& rng, const GenOptions& o, unsigned depth);
Program gen_program(Rng& rng, const GenOptions& o);
State gen_state(Rng& rng, const GenOptions& o);

/// Nonnegative guarded-polynomial post-expectation (even powers and
/// nonnegative coefficients keep it in the valid expectation space).
/// With bounded_by_one, a guarded sub-probability indicator sum.
Expectation gen_post(Rng& rng, const GenOptions& o, bool bounded_by_one);

} // namespace cpgcl
