// SPDX-License-Identifier: Apache-2.0
#include "cpgcl/randgen.hpp"

namespace cpgcl {

std::vector<std::string> gen_var_names(const GenOptions& o) {
    static const char* pool[] = {"x", "y", "z", "w", "v", "u", "t", "s"};
    std::vector<std::string> out;
    for (unsigned i = 0; i < o.num_vars && i < 8; ++i) out.emplace_back(pool[i]);
    return out;
}

AExpPtr gen_aexp(Rng& rng, const GenOptions& o, unsigned depth) {
    auto vars = gen_var_names(o);
    if (depth == 0 || rng.chance(50)) {
        if (rng.chance(50)) return aconst(BigInt(rng.range(o.min_const, o.max_const)));
        return avar(vars[rng.below(vars.size())]);
    }
    AOp op = static_cast<AOp>(rng.below(3));
    return abin(op, gen_aexp(rng, o, depth - 1), gen_aexp(rng, o, depth - 1));
}

BExpPtr gen_bexp(Rng& rng, const GenOptions& o, unsigned depth) {
    if (depth == 0 || rng.chance(55)) {
        switch (rng.below(8)) {
        case 0: return btrue();
        case 1: return bfalse();
        default: {
            CmpOp op = static_cast<CmpOp>(rng.below(6));
            return bcmp(op, gen_aexp(rng, o, depth > 0 ? depth - 1 : 0),
                        gen_aexp(rng, o, depth > 0 ? depth - 1 : 0));
        }
        }
    }
    switch (rng.below(3)) {
    case 0: return band(gen_bexp(rng, o, depth - 1), gen_bexp(rng, o, depth - 1));
    case 1: return bor(gen_bexp(rng, o, depth - 1), gen_bexp(rng, o, depth - 1));
    default: return bnot(gen_bexp(rng, o, depth - 1));
    }
}

StmtPtr gen_stmt(Rng& rng, const GenOptions& o, unsigned depth) {
    auto vars = gen_var_names(o);
    auto leaf = [&]() -> StmtPtr {
        switch (rng.below(10)) {
        case 0: return sskip();
        case 1:
            if (o.abort) return sabort();
            [[fallthrough]];
        case 2:
            if (o.observe) return sobserve(gen_bexp(rng, o, 1));
            [[fallthrough]];
        default:
            return sassign(vars[rng.below(vars.size())], gen_aexp(rng, o, 2));
        }
    };
    if (depth == 0) return leaf();
    unsigned roll = static_cast<unsigned>(rng.below(100));
    if (roll < 30) return leaf();
    if (roll < 55) return sseq(gen_stmt(rng, o, depth - 1), gen_stmt(rng, o, depth - 1));
    if (roll < 70)
        return spchoice(gen_stmt(rng, o, depth - 1), ProbExp::constant(rng.probability()),
                        gen_stmt(rng, o, depth - 1));
    if (roll < 85)
        return site(gen_bexp(rng, o, 2), gen_stmt(rng, o, depth - 1),
                    gen_stmt(rng, o, depth - 1));
    if (o.loops && roll < 93) {
        // guards that terminate almost surely dominate; tests for bound
        // monotonicity still cover the diverging rest
        BExpPtr g = gen_bexp(rng, o, 1);
        return swhile(g, gen_stmt(rng, o, depth > 2 ? 2 : depth - 1));
    }
    if (o.nondet && roll < 97)
        return sndchoice(gen_stmt(rng, o, depth - 1), gen_stmt(rng, o, depth - 1));
    return sseq(gen_stmt(rng, o, depth - 1), gen_stmt(rng, o, depth - 1));
}

Program gen_program(Rng& rng, const GenOptions& o) {
    return make_program(gen_stmt(rng, o, o.max_depth));
}

State gen_state(Rng& rng, const GenOptions& o) {
    State s;
    for (const auto& v : gen_var_names(o)) s.set(v, BigInt(rng.range(o.min_const, o.max_const)));
    return s;
}

Expectation gen_post(Rng& rng, const GenOptions& o, bool bounded_by_one) {
    if (bounded_by_one) {
        // [G] * c with c in [0,1]; a single term stays within the bound
        return Expectation::term(from_bexp(*gen_bexp(rng, o, 2)),
                                 Poly::constant(rng.probability()))
            .simplified();
    }
    auto vars = gen_var_names(o);
    unsigned terms = static_cast<unsigned>(rng.range(1, 3));
    Expectation acc = Expectation::zero();
    for (unsigned i = 0; i < terms; ++i) {
        Poly w = Poly::constant(Rational(rng.range(0, 5)));
        if (rng.chance(60)) {
            // even powers keep the weight nonnegative on every state
            const std::string& v = vars[rng.below(vars.size())];
            Poly sq = Poly::variable(v) * Poly::variable(v);
            w = w * sq + Poly::constant(Rational(rng.range(0, 3)));
        }
        GuardPtr g = rng.chance(50) ? gtrue() : from_bexp(*gen_bexp(rng, o, 2));
        acc = Expectation::add(acc, Expectation::term(g, w));
    }
    return acc.simplified();
}

} // namespace cpgcl
