// SPDX-License-Identifier: Apache-2.0
#include "cpgcl/checks.hpp"

#include "cpgcl/errors.hpp"
#include "cpgcl/parser.hpp"
#include "cpgcl/randgen.hpp"
#include "cpgcl/rmdp.hpp"
#include "cpgcl/solver.hpp"
#include "cpgcl/transform.hpp"
#include "cpgcl/transformer.hpp"

#include <sstream>

namespace cpgcl {

std::string CheckResult::summary() const {
    std::ostringstream os;
    os << (pass() ? "pass" : "FAIL") << " " << name << ": " << tested << " checked";
    if (skipped) os << ", " << skipped << " skipped";
    if (failed) os << ", " << failed << " failed\n" << first_failure;
    return os.str();
}

namespace {

constexpr std::size_t kModelLimit = 200000;

void record_failure(CheckResult& r, const Program& p, const std::string& detail) {
    ++r.failed;
    if (r.first_failure.empty())
        r.first_failure = "counterexample program:\n" + pretty_print(p) + "\n" + detail;
}

GenOptions loop_free_opts() {
    GenOptions o;
    o.loops = false;
    o.nondet = false;
    o.observe = true;
    return o;
}

} // namespace

CheckResult check_correspondence(std::uint64_t seed, std::size_t n) {
    CheckResult r;
    r.name = "correspondence";
    Rng rng(seed);
    GenOptions o = loop_free_opts();
    for (std::size_t i = 0; i < n; ++i) {
        Program p = gen_program(rng, o);
        State sigma = gen_state(rng, o);
        Expectation f = gen_post(rng, o, false);
        ++r.tested;

        Rational wp_val = wp(*p.body, f).value.eval_finite(sigma);
        Rmdp m = build(p, sigma, f, kModelLimit);
        Rational op_val = expected_reward(m);
        if (!(wp_val == op_val)) {
            record_failure(r, p,
                           "expected value: transformer " + wp_val.str() +
                               " vs model " + op_val.str() + " at {" + sigma.str() + "}");
            continue;
        }
        AnalysisValue cv = cwp(p, f, sigma);
        AnalysisValue ov = conditional_expected_reward(m);
        if (!(cv == ov))
            record_failure(r, p, "conditional value: transformer " + cv.str() +
                                     " vs model " + ov.str());
    }
    return r;
}

CheckResult check_decoupling(std::uint64_t seed, std::size_t n) {
    CheckResult r;
    r.name = "decoupling";
    Rng rng(seed);
    GenOptions o = loop_free_opts();
    for (std::size_t i = 0; i < n; ++i) {
        Program p = gen_program(rng, o);
        Expectation f = gen_post(rng, o, false);
        Expectation g = gen_post(rng, o, true);
        ++r.tested;

        CwpPairResult pair = cwp_pair(*p.body, f, g);
        Expectation wp_f = wp(*p.body, f).value;
        Expectation wlp_g = wlp(*p.body, g).value;
        bool ok = true;
        for (int k = 0; k < 20 && ok; ++k) {
            State sigma = gen_state(rng, o);
            ok = pair.first.value.eval_finite(sigma) == wp_f.eval_finite(sigma) &&
                 pair.second.value.eval_finite(sigma) == wlp_g.eval_finite(sigma);
            if (!ok)
                record_failure(r, p, "pair transformer deviates at {" + sigma.str() + "}");
        }
    }
    return r;
}

CheckResult check_wlp_bad(std::uint64_t seed, std::size_t n) {
    CheckResult r;
    r.name = "wlp-bad";
    Rng rng(seed);
    GenOptions o = loop_free_opts();
    for (std::size_t i = 0; i < n; ++i) {
        Program p = gen_program(rng, o);
        State sigma = gen_state(rng, o);
        ++r.tested;

        Rational den = wlp(*p.body, Expectation::one()).value.eval_finite(sigma);
        Rmdp m = build(p, sigma, Expectation::one(), kModelLimit);
        Rational not_bad = Rational(1) - reach_prob(m, kLabelBad);
        if (!(den == not_bad))
            record_failure(r, p, "liberal mass " + den.str() + " vs model " +
                                     not_bad.str() + " at {" + sigma.str() + "}");
    }
    return r;
}

CheckResult check_linearity(std::uint64_t seed, std::size_t n) {
    CheckResult r;
    r.name = "linearity";
    Rng rng(seed);
    GenOptions o = loop_free_opts();
    std::size_t produced = 0;
    for (std::size_t i = 0; i < 4 * n && produced < n; ++i) {
        Program p = gen_program(rng, o);
        State sigma = gen_state(rng, o);
        Expectation f = gen_post(rng, o, false);
        Expectation g = gen_post(rng, o, false);
        Rational alpha = Rational(rng.range(0, 3));
        Rational beta = Rational(rng.range(0, 3));

        if (wlp(*p.body, Expectation::one()).value.eval_finite(sigma).is_zero()) {
            ++r.skipped; // linearity is stated for feasible programs only
            continue;
        }
        ++produced;
        ++r.tested;

        Expectation combo = Expectation::add(Expectation::scale(alpha, f),
                                             Expectation::scale(beta, g));
        AnalysisValue lhs = cwp(p, combo, sigma);
        AnalysisValue vf = cwp(p, f, sigma);
        AnalysisValue vg = cwp(p, g, sigma);
        if (lhs.is_undefined() || vf.is_undefined() || vg.is_undefined()) {
            record_failure(r, p, "feasible program produced an undefined value");
            continue;
        }
        if (!(lhs.value() == alpha * vf.value() + beta * vg.value())) {
            record_failure(r, p, "linearity violated");
            continue;
        }
        // f is pointwise below f + g, so the conditional value is monotone
        AnalysisValue vfg = cwp(p, Expectation::add(f, g), sigma);
        if (vfg.is_undefined() || vf.value() > vfg.value())
            record_failure(r, p, "monotonicity violated");
    }
    return r;
}

CheckResult check_deobserve(std::uint64_t seed, std::size_t n) {
    CheckResult r;
    r.name = "deobserve";
    Rng rng(seed);
    GenOptions o = loop_free_opts();
    for (std::size_t i = 0; i < n; ++i) {
        Program p = gen_program(rng, o);
        State sigma = gen_state(rng, o);
        Expectation f = gen_post(rng, o, false);
        ++r.tested;

        Program rewritten = observe_to_loop(p);
        State sigma2 = total_state(rewritten, sigma);
        AnalysisValue cv = cwp(p, f, sigma);
        if (cv.is_undefined()) {
            // an infeasible source program turns into a never-exiting loop
            Rmdp m1 = build(rewritten, sigma2, Expectation::one(), kModelLimit);
            if (!expected_reward(m1).is_zero())
                record_failure(r, p, "undefined value but the rerun loop can exit");
            continue;
        }
        Rmdp m = build(rewritten, sigma2, f, kModelLimit);
        Rational v = expected_reward(m);
        if (!(v == cv.value()))
            record_failure(r, p, "conditional value " + cv.str() +
                                     " vs rerun-loop value " + v.str());
    }
    return r;
}

CheckResult check_unrolling(std::uint64_t seed, std::size_t n) {
    CheckResult r;
    r.name = "unroll";
    Rng rng(seed);
    GenOptions o = loop_free_opts();
    o.loops = true;
    for (std::size_t i = 0; i < n; ++i) {
        Program p = gen_program(rng, o);
        State sigma = gen_state(rng, o);
        Expectation f = gen_post(rng, o, false);
        Expectation g = gen_post(rng, o, true);
        ++r.tested;

        Rational prev_lo(0), prev_hi(1);
        for (unsigned k = 0; k <= 4; ++k) {
            Rational lo = wp(*p.body, f, k).value.eval_finite(sigma);
            Rational hi = wlp(*p.body, g, k).value.eval_finite(sigma);
            if (k > 0 && (lo < prev_lo || hi > prev_hi)) {
                record_failure(r, p, "bound sequence not monotone at depth " +
                                         std::to_string(k));
                break;
            }
            prev_lo = lo;
            prev_hi = hi;
        }
    }
    return r;
}

CheckResult check_hoist(std::uint64_t seed, std::size_t n) {
    CheckResult r;
    r.name = "hoist";
    Rng rng(seed);
    GenOptions o = loop_free_opts();
    std::size_t produced = 0;
    for (std::size_t i = 0; i < 4 * n && produced < n; ++i) {
        Program p = gen_program(rng, o);
        State sigma = gen_state(rng, o);
        Expectation f = gen_post(rng, o, false);

        Expectation wlp1 = wlp(*p.body, Expectation::one()).value;
        if (wlp1.eval_finite(sigma).is_zero()) {
            ++r.skipped; // hoisting correctness needs a feasible run
            continue;
        }
        HoistProgramResult hoisted = hoist_program(p);
        if (contains_kind(*hoisted.program.body, Stmt::Kind::Observe)) {
            ++produced;
            ++r.tested;
            record_failure(r, p, "hoisted program still contains an observation");
            continue;
        }
        ++produced;
        ++r.tested;

        // side expectation agrees with the liberal mass of 1, pointwise
        bool h_ok = true;
        for (int k = 0; k < 10 && h_ok; ++k) {
            State probe = gen_state(rng, o);
            h_ok = hoisted.h.eval_finite(probe) == wlp1.eval_finite(probe);
        }
        if (!h_ok) {
            record_failure(r, p, "side expectation deviates from the liberal mass");
            continue;
        }
        AnalysisValue cv = cwp(p, f, sigma);
        try {
            State sigma2 = total_state(hoisted.program, sigma);
            Rmdp m = build(hoisted.program, sigma2, f, kModelLimit);
            Rational v = expected_reward(m);
            if (cv.is_undefined() || !(v == cv.value()))
                record_failure(r, p, "conditional value " + cv.str() +
                                         " vs hoisted value " + v.str());
        } catch (const EvaluationError&) {
            // quotient probability hit a 0/0 in a region the source program
            // renders unreachable under conditioning
            ++r.skipped;
            --r.tested;
            --produced;
        }
    }
    return r;
}

CheckResult check_conservativity(std::uint64_t seed, std::size_t n) {
    CheckResult r;
    r.name = "conservativity";
    Rng rng(seed);
    GenOptions o = loop_free_opts();
    o.observe = false;
    o.abort = false;
    for (std::size_t i = 0; i < n; ++i) {
        Program p = gen_program(rng, o);
        State sigma = gen_state(rng, o);
        Expectation f = gen_post(rng, o, false);
        ++r.tested;

        Rational mass = wlp(*p.body, Expectation::one()).value.eval_finite(sigma);
        if (!(mass == Rational(1))) {
            record_failure(r, p, "terminating observation-free program has mass " +
                                     mass.str());
            continue;
        }
        AnalysisValue cv = cwp(p, f, sigma);
        Rational direct = wp(*p.body, f).value.eval_finite(sigma);
        if (cv.is_undefined() || !(cv.value() == direct))
            record_failure(r, p, "conditional value deviates from the plain value");
    }
    return r;
}

CheckResult check_parser_roundtrip(std::uint64_t seed, std::size_t n) {
    CheckResult r;
    r.name = "roundtrip";
    Rng rng(seed);
    GenOptions o = loop_free_opts();
    o.loops = true;
    o.nondet = true;
    o.max_depth = 8;
    for (std::size_t i = 0; i < n; ++i) {
        Program p = gen_program(rng, o);
        if (rng.chance(10)) {
            // quotient probabilities appear in transformation output;
            // their printed form must survive the round trip too
            auto num = std::make_shared<Expectation>(gen_post(rng, o, true));
            auto den = std::make_shared<Expectation>(
                Expectation::add(*num, gen_post(rng, o, true)).simplified());
            p = make_program(
                spchoice(p.body, ProbExp::quotient(num, den), sskip()));
        }
        ++r.tested;
        std::string text = pretty_print(p);
        try {
            Program back = parse_program(text);
            if (!equal(*back.body, *p.body))
                record_failure(r, p, "reparsed tree differs");
        } catch (const CpgclError& e) {
            record_failure(r, p, std::string("reparse failed: ") + e.what());
        }
    }
    return r;
}

CheckResult check_model_roundtrip(std::uint64_t seed, std::size_t n) {
    CheckResult r;
    r.name = "model-roundtrip";
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        ++r.tested;
        // random shape: a handful of internal states plus terminal ones
        std::size_t internal = static_cast<std::size_t>(rng.range(2, 7));
        Rmdp m;
        std::size_t total = internal + 2; // + term + bad
        for (std::size_t s = 0; s < total; ++s) {
            Rmdp::StateInfo st;
            st.name = "s" + std::to_string(s);
            st.reward = Rational(0);
            st.expanded = false;
            m.states.push_back(std::move(st));
        }
        std::uint32_t term = static_cast<std::uint32_t>(internal);
        std::uint32_t bad = static_cast<std::uint32_t>(internal + 1);
        m.states[term].labels = kLabelTerm;
        m.states[term].reward = Rational(rng.range(0, 5));
        m.states[bad].labels = kLabelBad;
        m.initial = 0;
        for (std::uint32_t s = 0; s < internal; ++s) {
            unsigned actions = rng.chance(25) ? 2 : 1;
            for (unsigned a = 0; a < actions; ++a) {
                Rmdp::Choice c;
                c.action = actions == 2 ? (a == 0 ? Action::Left : Action::Right)
                                        : Action::Unique;
                std::size_t fanout = static_cast<std::size_t>(rng.range(1, 3));
                std::vector<std::pair<std::uint32_t, long>> picks;
                long sum = 0;
                for (std::size_t k = 0; k < fanout; ++k) {
                    std::uint32_t t = static_cast<std::uint32_t>(rng.below(total));
                    long w = rng.range(1, 4);
                    picks.emplace_back(t, w);
                    sum += w;
                }
                std::map<std::uint32_t, Rational> merged;
                for (auto& [t, w] : picks) merged[t] += Rational(w, sum);
                for (auto& [t, pr] : merged) c.successors.emplace_back(t, pr);
                m.states[s].choices.push_back(std::move(c));
                m.states[s].expanded = true;
            }
        }
        try {
            std::string t0 = save_explicit(m);
            std::string c1 = save_explicit(load_explicit(t0));
            std::string c2 = save_explicit(load_explicit(c1));
            if (c1 != c2) {
                ++r.failed;
                if (r.first_failure.empty())
                    r.first_failure = "canonical form is not idempotent:\n" + t0;
            }
        } catch (const CpgclError& e) {
            ++r.failed;
            if (r.first_failure.empty())
                r.first_failure = std::string("round trip failed: ") + e.what();
        }
    }
    return r;
}

CheckResult check_loop_bounds(std::uint64_t seed, std::size_t n) {
    CheckResult r;
    r.name = "loop-bounds";
    Rng rng(seed);
    GenOptions o = loop_free_opts();
    o.loops = true;
    std::size_t produced = 0;
    for (std::size_t i = 0; i < 6 * n && produced < n; ++i) {
        Program p = gen_program(rng, o);
        State sigma = gen_state(rng, o);
        Expectation f = gen_post(rng, o, true);

        Rmdp m = build(p, sigma, f, 800);
        if (m.has_frontier()) {
            ++r.skipped; // the unfolding did not close; bounds-only territory
            continue;
        }
        ++produced;
        ++r.tested;
        AnalysisValue exact = conditional_expected_reward(m);
        AnalysisValue sym = cwp(p, f, sigma, 8, Rational(1));
        switch (sym.kind) {
        case AnalysisValue::Kind::Exact:
            if (exact.is_undefined() || !(sym.value() == exact.value()))
                record_failure(r, p, "closed-form transformer value " + sym.str() +
                                         " vs model " + exact.str());
            break;
        case AnalysisValue::Kind::Undefined:
            if (!exact.is_undefined())
                record_failure(r, p, "transformer reports 0/0 but the model gives " +
                                         exact.str());
            break;
        case AnalysisValue::Kind::Interval:
            if (exact.is_undefined()) {
                // no value exists; the sound lower bound must sit at 0
                if (!sym.lo.is_zero())
                    record_failure(r, p, "interval " + sym.str() +
                                             " despite an undefined value");
            } else if (sym.lo > exact.value() || exact.value() > sym.hi) {
                record_failure(r, p, "exact value " + exact.str() +
                                         " escapes the interval " + sym.str());
            }
            break;
        }
    }
    return r;
}

CheckResult check_parallel_enumeration(std::uint64_t seed, std::size_t n) {
    CheckResult r;
    r.name = "parallel-enumeration";
    Rng rng(seed);
    GenOptions o = loop_free_opts();
    o.nondet = true;
    o.max_depth = 4; // keeps the assignment count enumerable
    for (std::size_t i = 0; i < n; ++i) {
        Program p = gen_program(rng, o);
        State sigma = gen_state(rng, o);
        Expectation f = gen_post(rng, o, false);
        ++r.tested;

        Rmdp m = build(p, sigma, f, kModelLimit);
        try {
            MinConditionalResult serial = min_conditional(m, 14, false, false);
            MinConditionalResult par = min_conditional(m, 14, false, true);
            if (!(serial.value == par.value) || serial.scheduler != par.scheduler ||
                serial.enumerated.size() != par.enumerated.size())
                record_failure(r, p, "parallel enumeration deviates from serial");
        } catch (const BudgetExceeded&) {
            ++r.skipped;
            --r.tested;
        }
    }
    return r;
}

std::vector<CheckResult> run_all_checks(std::uint64_t seed) {
    return {
        check_correspondence(seed + 1, 300),
        check_decoupling(seed + 2, 300),
        check_wlp_bad(seed + 3, 200),
        check_linearity(seed + 4, 200),
        check_deobserve(seed + 5, 200),
        check_unrolling(seed + 6, 50),
        check_hoist(seed + 7, 200),
        check_conservativity(seed + 8, 200),
        check_parser_roundtrip(seed + 9, 1000),
        check_model_roundtrip(seed + 10, 100),
        check_parallel_enumeration(seed + 11, 50),
        check_loop_bounds(seed + 12, 100),
    };
}

CheckResult run_check(const std::string& property, std::uint64_t seed, std::size_t n) {
    if (property == "correspondence") return check_correspondence(seed, n);
    if (property == "decoupling") return check_decoupling(seed, n);
    if (property == "wlp-bad") return check_wlp_bad(seed, n);
    if (property == "linearity") return check_linearity(seed, n);
    if (property == "deobserve") return check_deobserve(seed, n);
    if (property == "unroll") return check_unrolling(seed, n);
    if (property == "hoist") return check_hoist(seed, n);
    if (property == "conservativity") return check_conservativity(seed, n);
    if (property == "roundtrip") return check_parser_roundtrip(seed, n);
    if (property == "model-roundtrip") return check_model_roundtrip(seed, n);
    if (property == "parallel-enumeration") return check_parallel_enumeration(seed, n);
    if (property == "loop-bounds") return check_loop_bounds(seed, n);
    throw ParameterError("unknown property '" + property + "'");
}

std::vector<std::string> check_names() {
    return {"correspondence",  "decoupling",     "wlp-bad",
            "linearity",       "deobserve",      "unroll",
            "hoist",           "conservativity", "roundtrip",
            "model-roundtrip", "parallel-enumeration", "loop-bounds"};
}

} // namespace cpgcl
