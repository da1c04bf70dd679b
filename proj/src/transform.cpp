// SPDX-License-Identifier: Apache-2.0
#include "cpgcl/transform.hpp"

#include "cpgcl/errors.hpp"

#include <algorithm>
#include <map>

namespace cpgcl {

// ---------------------------------------------------------------------------
// Observation hoisting
// ---------------------------------------------------------------------------

namespace {

ProbExp make_updated_prob(const Expectation& num, const Expectation& den) {
    auto nc = num.constant_value();
    auto dc = den.constant_value();
    if (nc && dc && !dc->is_zero()) return ProbExp::constant(*nc / *dc);
    return ProbExp::quotient(std::make_shared<Expectation>(num),
                             std::make_shared<Expectation>(den));
}

HoistResult hoist_rec(const Stmt& s, const Expectation& f, unsigned max_loop_iters) {
    switch (s.kind) {
    case Stmt::Kind::Skip: return {sskip(), f};
    case Stmt::Kind::Abort: return {sabort(), Expectation::one()};
    case Stmt::Kind::Assign:
        return {sassign(s.var, s.expr), f.substituted(s.var, *s.expr).simplified()};
    case Stmt::Kind::Observe:
        return {sskip(),
                Expectation::guard_mul(from_bexp(*s.guard), f).simplified()};
    case Stmt::Kind::Seq: {
        HoistResult q = hoist_rec(*s.second, f, max_loop_iters);
        HoistResult p = hoist_rec(*s.first, q.h, max_loop_iters);
        return {sseq(p.program, q.program), p.h};
    }
    case Stmt::Kind::Ite: {
        HoistResult t = hoist_rec(*s.first, f, max_loop_iters);
        HoistResult e = hoist_rec(*s.second, f, max_loop_iters);
        GuardPtr g = from_bexp(*s.guard);
        Expectation h = Expectation::add(Expectation::guard_mul(g, t.h),
                                         Expectation::guard_mul(gnegate(g), e.h))
                            .simplified();
        return {site(s.guard, t.program, e.program), h};
    }
    case Stmt::Kind::PChoice: {
        Rational p;
        switch (s.prob.kind) {
        case ProbExp::Kind::Const: p = s.prob.value; break;
        case ProbExp::Kind::Param: throw UninstantiatedParameter(s.prob.param);
        case ProbExp::Kind::Quotient: throw QuotientProbabilityUnsupported();
        }
        HoistResult a = hoist_rec(*s.first, f, max_loop_iters);
        HoistResult b = hoist_rec(*s.second, f, max_loop_iters);
        Expectation num = Expectation::scale(p, a.h).simplified();
        Expectation den =
            Expectation::add(num, Expectation::scale(Rational(1) - p, b.h)).simplified();
        return {spchoice(a.program, make_updated_prob(num, den), b.program), den};
    }
    case Stmt::Kind::NDChoice:
        throw NondeterminismUnsupported("by observation hoisting");
    case Stmt::Kind::While: {
        // side expectation of the loop: greatest fixed point of
        // X -> [G] * hoist(body, X).h + [!G] * f, iterated from 1
        GuardPtr g = from_bexp(*s.guard);
        Expectation exit_part =
            Expectation::guard_mul(gnegate(g), f).simplified();
        Expectation x = Expectation::one();
        bool found = false;
        for (unsigned k = 0; k < max_loop_iters; ++k) {
            HoistResult body = hoist_rec(*s.first, x, max_loop_iters);
            Expectation next =
                Expectation::add(Expectation::guard_mul(g, body.h), exit_part).simplified();
            if (next.equals(x)) {
                found = true;
                break;
            }
            if (next.size() > 4096) break; // iterates keep growing; give up
            x = std::move(next);
        }
        if (!found)
            throw LoopFixpointNotFound("while (" + to_string(*s.guard) + ") {...}");
        HoistResult body = hoist_rec(*s.first, x, max_loop_iters);
        return {swhile(s.guard, body.program), x};
    }
    }
    throw EvaluationError("corrupt statement");
}

} // namespace

HoistResult hoist(const Stmt& s, const Expectation& f, unsigned max_loop_iters) {
    return hoist_rec(s, f.simplified(), max_loop_iters);
}

HoistProgramResult hoist_program(const Program& p, unsigned max_loop_iters) {
    if (!p.params.empty())
        throw UninstantiatedParameter(*p.params.begin());
    HoistResult r = hoist(*p.body, Expectation::one(), max_loop_iters);
    return {make_program(r.program), r.h};
}

// ---------------------------------------------------------------------------
// Observations to a restarting loop
// ---------------------------------------------------------------------------

namespace {

AExpPtr int_lit(long v) { return aconst(BigInt(v)); }

struct FreshNames {
    std::string rerun;
    std::string save_prefix;

    /// Picks reserved names that do not collide with existing ones, so the
    /// rewrite can be applied to its own output.
    explicit FreshNames(const Program& p) {
        std::set<std::string> taken(p.declared_vars.begin(), p.declared_vars.end());
        rerun = "__rerun";
        save_prefix = "__s_";
        for (unsigned n = 2; true; ++n) {
            bool clash = taken.count(rerun) != 0;
            for (const auto& v : p.declared_vars)
                clash |= taken.count(save_prefix + v) != 0;
            if (!clash) break;
            rerun = "__rerun" + std::to_string(n);
            save_prefix = "__s" + std::to_string(n) + "_";
        }
    }

    BExpPtr rerun_is(long v) const { return bcmp(CmpOp::Eq, avar(rerun), int_lit(v)); }
};

StmtPtr deobserve_rec(const Stmt& s, const FreshNames& names) {
    switch (s.kind) {
    case Stmt::Kind::Skip:
    case Stmt::Kind::Assign:
        return std::make_shared<Stmt>(s);
    case Stmt::Kind::Abort:
        // a flagged run must not diverge; it has to reach the retry
        return site(names.rerun_is(0), sabort(), sskip());
    case Stmt::Kind::Observe:
        return site(bnot(s.guard), sassign(names.rerun, int_lit(1)), sskip());
    case Stmt::Kind::Seq:
        return sseq(deobserve_rec(*s.first, names), deobserve_rec(*s.second, names));
    case Stmt::Kind::Ite:
        return site(s.guard, deobserve_rec(*s.first, names),
                    deobserve_rec(*s.second, names));
    case Stmt::Kind::PChoice:
        return spchoice(deobserve_rec(*s.first, names), s.prob,
                        deobserve_rec(*s.second, names));
    case Stmt::Kind::NDChoice:
        return sndchoice(deobserve_rec(*s.first, names), deobserve_rec(*s.second, names));
    case Stmt::Kind::While:
        return swhile(band(s.guard, names.rerun_is(0)), deobserve_rec(*s.first, names));
    }
    throw EvaluationError("corrupt statement");
}

/// Simultaneous assignment, desugared. Plain sequencing suffices unless a
/// right-hand side reads a variable assigned earlier in the list; then the
/// crossing values detour through fresh "__tmp" variables.
StmtPtr simultaneous_assign(const std::vector<std::string>& lhs,
                            const std::vector<AExpPtr>& rhs) {
    std::vector<StmtPtr> parts;
    std::set<std::string> assigned;
    bool interference = false;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        std::set<std::string> reads;
        collect_vars(*rhs[i], reads);
        for (const auto& r : reads)
            if (assigned.count(r)) interference = true;
        assigned.insert(lhs[i]);
    }
    if (!interference) {
        for (std::size_t i = 0; i < lhs.size(); ++i)
            parts.push_back(sassign(lhs[i], rhs[i]));
        return sseq(parts);
    }
    for (std::size_t i = 0; i < lhs.size(); ++i)
        parts.push_back(sassign("__tmp_" + lhs[i], rhs[i]));
    for (std::size_t i = 0; i < lhs.size(); ++i)
        parts.push_back(sassign(lhs[i], avar("__tmp_" + lhs[i])));
    return sseq(parts);
}

} // namespace

Program observe_to_loop(const Program& p) {
    FreshNames names(p);
    StmtPtr rewritten = deobserve_rec(*p.body, names);

    std::vector<StmtPtr> prologue;
    std::vector<std::string> saves;
    std::vector<AExpPtr> save_sources;
    std::vector<std::string> restores;
    std::vector<AExpPtr> restore_sources;
    for (const auto& v : p.declared_vars) {
        saves.push_back(names.save_prefix + v);
        save_sources.push_back(avar(v));
        restores.push_back(v);
        restore_sources.push_back(avar(names.save_prefix + v));
    }
    if (!saves.empty()) prologue.push_back(simultaneous_assign(saves, save_sources));
    prologue.push_back(sassign(names.rerun, int_lit(1)));

    std::vector<StmtPtr> body;
    if (!restores.empty())
        body.push_back(simultaneous_assign(restores, restore_sources));
    // reset before the retry runs; without it the wrapper loop cannot exit
    body.push_back(sassign(names.rerun, int_lit(0)));
    body.push_back(rewritten);

    prologue.push_back(swhile(names.rerun_is(1), sseq(body)));
    return make_program(sseq(prologue));
}

// ---------------------------------------------------------------------------
// iid loops to observations
// ---------------------------------------------------------------------------

namespace {

/// Definite-assignment lattice per variable: true = assigned this iteration
/// from iteration-independent values. Reading a variable that is not fresh
/// is the data flow the criterion forbids.
struct IidAnalysis {
    std::set<std::string> violations;

    using Fresh = std::map<std::string, bool>;

    static Fresh join(const Fresh& a, const Fresh& b) {
        Fresh out;
        for (const auto& [v, fa] : a) {
            auto it = b.find(v);
            out[v] = fa && it != b.end() && it->second;
        }
        return out;
    }

    void check_reads(const std::set<std::string>& reads, const Fresh& in) {
        for (const auto& v : reads) {
            auto it = in.find(v);
            if (it == in.end() || !it->second) violations.insert(v);
        }
    }

    Fresh run(const Stmt& s, Fresh in) {
        switch (s.kind) {
        case Stmt::Kind::Skip:
        case Stmt::Kind::Abort: return in;
        case Stmt::Kind::Assign: {
            std::set<std::string> reads;
            collect_vars(*s.expr, reads);
            check_reads(reads, in);
            bool fresh = true;
            for (const auto& v : reads)
                if (!in[v]) fresh = false;
            in[s.var] = fresh;
            return in;
        }
        case Stmt::Kind::Observe: {
            std::set<std::string> reads;
            collect_vars(*s.guard, reads);
            check_reads(reads, in);
            return in;
        }
        case Stmt::Kind::Seq: return run(*s.second, run(*s.first, in));
        case Stmt::Kind::Ite: {
            std::set<std::string> reads;
            collect_vars(*s.guard, reads);
            check_reads(reads, in);
            return join(run(*s.first, in), run(*s.second, in));
        }
        case Stmt::Kind::PChoice: {
            if (s.prob.kind == ProbExp::Kind::Quotient) {
                std::set<std::string> reads;
                collect_vars(*s.prob.num, reads);
                collect_vars(*s.prob.den, reads);
                check_reads(reads, in);
            }
            return join(run(*s.first, in), run(*s.second, in));
        }
        case Stmt::Kind::NDChoice:
            return join(run(*s.first, in), run(*s.second, in));
        case Stmt::Kind::While: {
            // inner loop: iterate to a fixed point of the join
            std::set<std::string> reads;
            collect_vars(*s.guard, reads);
            Fresh state = in;
            while (true) {
                check_reads(reads, state);
                Fresh next = join(state, run(*s.first, state));
                if (next == state) break;
                state = std::move(next);
            }
            return state;
        }
        }
        throw EvaluationError("corrupt statement");
    }
};

bool guard_is_constant(const BExp& g) {
    GuardPtr c = from_bexp(g); // folds x = x and friends
    return c->kind == Guard::Kind::True || c->kind == Guard::Kind::False;
}

} // namespace

bool iid_check(const Stmt& while_stmt, std::string* offending) {
    if (while_stmt.kind != Stmt::Kind::While)
        throw EvaluationError("iid check applies to while loops");
    // degenerate loops: a constant guard decouples the loop from the body
    // valuations, so the body-plus-observation reading is wrong for them
    if (guard_is_constant(*while_stmt.guard)) {
        if (offending) *offending = "<constant guard>";
        return false;
    }
    // an observation inside the body drops violating mass without
    // renormalizing, whereas the rewritten program renormalizes it; the
    // two readings disagree, so such loops are out
    if (contains_kind(*while_stmt.first, Stmt::Kind::Observe)) {
        if (offending) *offending = "<observation in body>";
        return false;
    }
    if (contains_kind(*while_stmt.first, Stmt::Kind::NDChoice)) {
        if (offending) *offending = "<nondeterministic body>";
        return false;
    }
    IidAnalysis analysis;
    IidAnalysis::Fresh in;
    std::set<std::string> vars;
    collect_vars(while_stmt, vars);
    for (const auto& v : vars) in[v] = false;
    IidAnalysis::Fresh out = analysis.run(*while_stmt.first, in);
    if (!analysis.violations.empty()) {
        if (offending) *offending = *analysis.violations.begin();
        return false;
    }
    std::set<std::string> guard_vars;
    collect_vars(*while_stmt.guard, guard_vars);
    for (const auto& v : guard_vars) {
        auto it = out.find(v);
        if (it == out.end() || !it->second) {
            if (offending) *offending = v;
            return false;
        }
    }
    return true;
}

StmtPtr loop_to_observe(const Stmt& while_stmt) {
    std::string offending;
    if (!iid_check(while_stmt, &offending)) throw NotIid(offending);
    return sseq(while_stmt.first, sobserve(bnot(while_stmt.guard)));
}

// ---------------------------------------------------------------------------
// Cleanup pass
// ---------------------------------------------------------------------------

StmtPtr simplify_stmt(const StmtPtr& s) {
    switch (s->kind) {
    case Stmt::Kind::Skip:
    case Stmt::Kind::Abort:
    case Stmt::Kind::Assign:
    case Stmt::Kind::Observe: return s;
    case Stmt::Kind::Seq: {
        StmtPtr a = simplify_stmt(s->first);
        StmtPtr b = simplify_stmt(s->second);
        if (a->kind == Stmt::Kind::Skip) return b;
        if (b->kind == Stmt::Kind::Skip) return a;
        return sseq(a, b);
    }
    case Stmt::Kind::Ite: {
        StmtPtr a = simplify_stmt(s->first);
        StmtPtr b = simplify_stmt(s->second);
        if (equal(*a, *b)) return a; // branches coalesce
        return site(s->guard, a, b);
    }
    case Stmt::Kind::PChoice: {
        StmtPtr a = simplify_stmt(s->first);
        StmtPtr b = simplify_stmt(s->second);
        if (s->prob.kind == ProbExp::Kind::Const) {
            if (s->prob.value == Rational(1)) return a; // dead right branch
            if (s->prob.value == Rational(0)) return b; // dead left branch
        }
        return spchoice(a, s->prob, b);
    }
    case Stmt::Kind::NDChoice: {
        StmtPtr a = simplify_stmt(s->first);
        StmtPtr b = simplify_stmt(s->second);
        if (equal(*a, *b)) return a;
        return sndchoice(a, b);
    }
    case Stmt::Kind::While:
        return swhile(s->guard, simplify_stmt(s->first));
    }
    throw EvaluationError("corrupt statement");
}

} // namespace cpgcl
