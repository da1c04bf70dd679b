// SPDX-License-Identifier: Apache-2.0
#include "cpgcl/transformer.hpp"

#include "cpgcl/errors.hpp"

#include <algorithm>

namespace cpgcl {

namespace {

Rational const_prob(const ProbExp& p) {
    switch (p.kind) {
    case ProbExp::Kind::Const: return p.value;
    case ProbExp::Kind::Param: throw UninstantiatedParameter(p.param);
    case ProbExp::Kind::Quotient: throw QuotientProbabilityUnsupported();
    }
    throw EvaluationError("corrupt probability");
}

enum class LoopMode { Lfp, Gfp }; // iterate from 0 upward resp. from 1 downward

PreExpectationResult transform(const Stmt& s, const Expectation& post, unsigned unroll,
                               bool liberal);

/// Iterates whose symbolic size keeps growing (branchy loop bodies can
/// double the distinct substitution patterns per round) are cut off; the
/// last iterate is still a sound bound.
inline constexpr std::size_t kMaxIterateTerms = 4096;

PreExpectationResult transform_while(const BExp& guard, const Stmt& body,
                                     const Expectation& post, unsigned unroll,
                                     bool liberal, LoopMode mode) {
    GuardPtr g = from_bexp(guard);
    GuardPtr ng = gnegate(g);
    Expectation exit_part = Expectation::guard_mul(ng, post).simplified();
    Expectation x = mode == LoopMode::Lfp ? Expectation::zero() : Expectation::one();
    x = x.simplified();
    for (unsigned k = 0; k < unroll; ++k) {
        PreExpectationResult sub = transform(body, x, unroll, liberal);
        Expectation next =
            Expectation::add(Expectation::guard_mul(g, sub.value), exit_part).simplified();
        if (sub.exact && next.equals(x)) return {x, true, 0};
        if (next.size() > kMaxIterateTerms) return {x, false, k};
        x = std::move(next);
    }
    return {x, false, unroll};
}

PreExpectationResult transform(const Stmt& s, const Expectation& post, unsigned unroll,
                               bool liberal) {
    switch (s.kind) {
    case Stmt::Kind::Skip: return {post, true, 0};
    case Stmt::Kind::Abort:
        return {liberal ? Expectation::one() : Expectation::zero(), true, 0};
    case Stmt::Kind::Assign:
        return {post.substituted(s.var, *s.expr).simplified(), true, 0};
    case Stmt::Kind::Observe:
        return {Expectation::guard_mul(from_bexp(*s.guard), post).simplified(), true, 0};
    case Stmt::Kind::Seq: {
        PreExpectationResult inner = transform(*s.second, post, unroll, liberal);
        PreExpectationResult outer = transform(*s.first, inner.value, unroll, liberal);
        return {outer.value, inner.exact && outer.exact,
                std::max(inner.unroll_used, outer.unroll_used)};
    }
    case Stmt::Kind::Ite: {
        GuardPtr g = from_bexp(*s.guard);
        PreExpectationResult t = transform(*s.first, post, unroll, liberal);
        PreExpectationResult e = transform(*s.second, post, unroll, liberal);
        Expectation v = Expectation::add(Expectation::guard_mul(g, t.value),
                                         Expectation::guard_mul(gnegate(g), e.value))
                            .simplified();
        return {v, t.exact && e.exact, std::max(t.unroll_used, e.unroll_used)};
    }
    case Stmt::Kind::PChoice: {
        Rational p = const_prob(s.prob);
        PreExpectationResult a = transform(*s.first, post, unroll, liberal);
        PreExpectationResult b = transform(*s.second, post, unroll, liberal);
        Expectation v = Expectation::add(Expectation::scale(p, a.value),
                                         Expectation::scale(Rational(1) - p, b.value))
                            .simplified();
        return {v, a.exact && b.exact, std::max(a.unroll_used, b.unroll_used)};
    }
    case Stmt::Kind::NDChoice: {
        PreExpectationResult a = transform(*s.first, post, unroll, liberal);
        PreExpectationResult b = transform(*s.second, post, unroll, liberal);
        return {Expectation::min_of(a.value, b.value).simplified(), a.exact && b.exact,
                std::max(a.unroll_used, b.unroll_used)};
    }
    case Stmt::Kind::While:
        return transform_while(*s.guard, *s.first, post, unroll, liberal,
                               liberal ? LoopMode::Gfp : LoopMode::Lfp);
    }
    throw EvaluationError("corrupt statement");
}

} // namespace

PreExpectationResult wp(const Stmt& s, const Expectation& post, unsigned unroll_depth) {
    return transform(s, post.simplified(), unroll_depth, false);
}

PreExpectationResult wlp(const Stmt& s, const Expectation& post, unsigned unroll_depth) {
    return transform(s, post.simplified(), unroll_depth, true);
}

// ---------------------------------------------------------------------------
// Paired conditional transformer
// ---------------------------------------------------------------------------

namespace {

struct PairResult {
    ExpectationPair value;
    bool exact;
    unsigned unroll_used;
};

ExpectationPair pair_add(const ExpectationPair& a, const ExpectationPair& b) {
    return {Expectation::add(a.first, b.first), Expectation::add(a.second, b.second)};
}

ExpectationPair pair_scale(const Rational& c, const ExpectationPair& a) {
    return {Expectation::scale(c, a.first), Expectation::scale(c, a.second)};
}

ExpectationPair pair_guard(const GuardPtr& g, const ExpectationPair& a) {
    return {Expectation::guard_mul(g, a.first), Expectation::guard_mul(g, a.second)};
}

ExpectationPair pair_simplified(const ExpectationPair& a) {
    return {a.first.simplified(), a.second.simplified()};
}

PairResult cwp_rec(const Stmt& s, const ExpectationPair& post, unsigned unroll) {
    switch (s.kind) {
    case Stmt::Kind::Skip: return {post, true, 0};
    case Stmt::Kind::Abort:
        return {{Expectation::zero(), Expectation::one()}, true, 0};
    case Stmt::Kind::Assign:
        return {pair_simplified({post.first.substituted(s.var, *s.expr),
                                 post.second.substituted(s.var, *s.expr)}),
                true, 0};
    case Stmt::Kind::Observe: {
        GuardPtr g = from_bexp(*s.guard);
        return {pair_simplified(pair_guard(g, post)), true, 0};
    }
    case Stmt::Kind::Seq: {
        PairResult inner = cwp_rec(*s.second, post, unroll);
        PairResult outer = cwp_rec(*s.first, inner.value, unroll);
        return {outer.value, inner.exact && outer.exact,
                std::max(inner.unroll_used, outer.unroll_used)};
    }
    case Stmt::Kind::Ite: {
        GuardPtr g = from_bexp(*s.guard);
        PairResult t = cwp_rec(*s.first, post, unroll);
        PairResult e = cwp_rec(*s.second, post, unroll);
        return {pair_simplified(pair_add(pair_guard(g, t.value),
                                         pair_guard(gnegate(g), e.value))),
                t.exact && e.exact, std::max(t.unroll_used, e.unroll_used)};
    }
    case Stmt::Kind::PChoice: {
        Rational p = const_prob(s.prob);
        PairResult a = cwp_rec(*s.first, post, unroll);
        PairResult b = cwp_rec(*s.second, post, unroll);
        return {pair_simplified(pair_add(pair_scale(p, a.value),
                                         pair_scale(Rational(1) - p, b.value))),
                a.exact && b.exact, std::max(a.unroll_used, b.unroll_used)};
    }
    case Stmt::Kind::NDChoice:
        throw NondeterminismUnsupported("by the conditional transformer");
    case Stmt::Kind::While: {
        GuardPtr g = from_bexp(*s.guard);
        GuardPtr ng = gnegate(g);
        ExpectationPair exit_part = pair_simplified(pair_guard(ng, post));
        // least fixed point w.r.t. the product order that is reversed in the
        // second component: iterate the pair functional from (0, 1)
        ExpectationPair x = {Expectation::zero(), Expectation::one()};
        for (unsigned k = 0; k < unroll; ++k) {
            PairResult sub = cwp_rec(*s.first, x, unroll);
            ExpectationPair next =
                pair_simplified(pair_add(pair_guard(g, sub.value), exit_part));
            if (sub.exact && next.first.equals(x.first) && next.second.equals(x.second))
                return {x, true, 0};
            if (next.first.size() + next.second.size() > kMaxIterateTerms)
                return {x, false, k};
            x = std::move(next);
        }
        return {x, false, unroll};
    }
    }
    throw EvaluationError("corrupt statement");
}

} // namespace

CwpPairResult cwp_pair(const Stmt& s, const Expectation& f, const Expectation& g,
                       unsigned unroll_depth) {
    PairResult r = cwp_rec(s, pair_simplified({f, g}), unroll_depth);
    return {{r.value.first, r.exact, r.unroll_used},
            {r.value.second, r.exact, r.unroll_used}};
}

// ---------------------------------------------------------------------------
// Conditional quotients
// ---------------------------------------------------------------------------

AnalysisValue cwp(const Program& p, const Expectation& f, const State& sigma,
                  unsigned unroll_depth, std::optional<Rational> post_bound) {
    if (!p.fully_probabilistic())
        throw NondeterminismUnsupported("by the conditional transformer");
    PreExpectationResult num = wp(*p.body, f, unroll_depth);
    PreExpectationResult den = wlp(*p.body, Expectation::one(), unroll_depth);

    if (num.exact && den.exact) {
        Rational n = num.value.eval_finite(sigma);
        Rational d = den.value.eval_finite(sigma);
        if (d.is_zero()) return AnalysisValue::undefined(); // program infeasible here
        return AnalysisValue::exact(n / d);
    }

    if (!post_bound)
        throw NonConvergent(
            "loop iteration found no fixpoint within depth " +
            std::to_string(unroll_depth) +
            "; supply a bound on the post-expectation for a sound interval");

    // Bounds: the wp iterate underapproximates the numerator, the wlp
    // iterate overapproximates the denominator, and the termination mass
    // wp[P](1) bounds the denominator from below. Unresolved mass may add
    // at most post_bound to the numerator.
    const Rational& bound = *post_bound;
    Rational num_lo = num.value.eval_finite(sigma);
    Rational den_hi = den.value.eval_finite(sigma);
    PreExpectationResult term = wp(*p.body, Expectation::one(), unroll_depth);
    Rational term_lo = term.value.eval_finite(sigma);
    Rational num_hi = num.exact ? num_lo : num_lo + (Rational(1) - term_lo) * bound;
    Rational den_lo = term_lo;

    if (den_hi.is_zero()) return AnalysisValue::undefined();
    Rational lo = num_lo / den_hi;
    Rational hi = den_lo > Rational(0) ? std::min(num_hi / den_lo, bound) : bound;
    if (hi < lo) hi = lo;
    return AnalysisValue::interval(lo, hi);
}

AnalysisValue cwlp(const Program& p, const Expectation& f, const State& sigma,
                   unsigned unroll_depth) {
    if (!p.fully_probabilistic())
        throw NondeterminismUnsupported("by the conditional transformer");
    PreExpectationResult num = wlp(*p.body, f, unroll_depth);
    PreExpectationResult den = wlp(*p.body, Expectation::one(), unroll_depth);
    if (!(num.exact && den.exact))
        throw NonConvergent("loop iteration found no fixpoint within depth " +
                            std::to_string(unroll_depth));
    Rational n = num.value.eval_finite(sigma);
    Rational d = den.value.eval_finite(sigma);
    if (n > Rational(1))
        throw BoundExceeded("liberal numerator " + n.str() +
                            " exceeds 1; the post-expectation is not bounded by 1");
    if (d.is_zero()) return AnalysisValue::undefined();
    return AnalysisValue::exact(n / d);
}

QuotientTable quotient_table(const Program& p, const Expectation& f, const State& sigma,
                             unsigned unroll_depth) {
    if (!p.fully_probabilistic())
        throw NondeterminismUnsupported("by the conditional transformer");
    Expectation one = Expectation::one();
    PreExpectationResult wpf = wp(*p.body, f, unroll_depth);
    PreExpectationResult wlpf = wlp(*p.body, f, unroll_depth);
    PreExpectationResult wp1 = wp(*p.body, one, unroll_depth);
    PreExpectationResult wlp1 = wlp(*p.body, one, unroll_depth);
    if (!(wpf.exact && wlpf.exact && wp1.exact && wlp1.exact))
        throw NonConvergent("loop iteration found no fixpoint within depth " +
                            std::to_string(unroll_depth));

    Rational vwpf = wpf.value.eval_finite(sigma);
    Rational vwlpf = wlpf.value.eval_finite(sigma);
    Rational vwp1 = wp1.value.eval_finite(sigma);
    Rational vwlp1 = wlp1.value.eval_finite(sigma);
    if (vwlpf > Rational(1))
        throw BoundExceeded("liberal numerator " + vwlpf.str() +
                            " exceeds 1; the post-expectation is not bounded by 1");

    QuotientTable t;
    const Rational nums[4] = {vwpf, vwlpf, vwpf, vwlpf};
    const Rational dens[4] = {vwlp1, vwlp1, vwp1, vwp1};
    for (int i = 0; i < 4; ++i) {
        if (dens[i].is_zero()) {
            t.values[i] = AnalysisValue::undefined();
            continue;
        }
        Rational v = nums[i] / dens[i];
        t.not_a_probability[i] = v > Rational(1);
        t.values[i] = AnalysisValue::exact(std::move(v));
    }
    return t;
}

} // namespace cpgcl
