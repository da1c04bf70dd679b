// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "cpgcl/errors.hpp"
#include "cpgcl/parser.hpp"
#include "cpgcl/randgen.hpp"
#include "cpgcl/transformer.hpp"

#include "helpers.hpp"

using namespace cpgcl;
using testutil::load_corpus;
using testutil::state_of;

TEST_CASE("expected value of the conditioned coin flip is one half before scaling") {
    Program p = load_corpus("p_obs1.cpgcl");
    PreExpectationResult r = wp(*p.body, parse_expectation("x"));
    REQUIRE(r.exact);
    CHECK(r.value.constant_value() == Rational(1, 2));
}

TEST_CASE("skip and abort rules") {
    Rng rng(77);
    GenOptions o;
    for (int i = 0; i < 20; ++i) {
        Expectation f = gen_post(rng, o, false);
        CHECK(wp(*sskip(), f).value.equals(f.simplified()));
        CHECK(wp(*sabort(), f).value.is_zero());
        Expectation g = gen_post(rng, o, true);
        CHECK(wlp(*sabort(), g).value.constant_value() == Rational(1));
    }
}

TEST_CASE("two-coin program with conditional branches") {
    Program p = load_corpus("example2.cpgcl");
    Expectation f = parse_expectation("10 + x");

    PreExpectationResult num = wp(*p.body, f);
    CHECK(num.value.constant_value() == Rational(27, 4));
    PreExpectationResult den = wlp(*p.body, Expectation::one());
    CHECK(den.value.constant_value() == Rational(13, 20));
    CHECK(wlp(*p.body, f).exact);

    CwpPairResult pair = cwp_pair(*p.body, f, Expectation::one());
    CHECK(pair.first.value.constant_value() == Rational(27, 4));
    CHECK(pair.second.value.constant_value() == Rational(13, 20));

    AnalysisValue v = cwp(p, f, state_of({{"x", 0}, {"y", 0}}));
    CHECK(v == AnalysisValue::exact(Rational(135, 13)));
}

TEST_CASE("liberal mass of the abort-coin program") {
    Program p = load_corpus("abort_coin.cpgcl");
    PreExpectationResult r = wlp(*p.body, Expectation::one());
    CHECK(r.value.constant_value() == Rational(7, 8));
}

TEST_CASE("quotient table of the abort-coin program") {
    Program p = load_corpus("abort_coin.cpgcl");
    QuotientTable t =
        quotient_table(p, parse_expectation("[y = 0]"), state_of({{"x", 0}, {"y", 0}}));
    CHECK(t.values[0] == AnalysisValue::exact(Rational(2, 7)));
    CHECK(t.values[1] == AnalysisValue::exact(Rational(6, 7)));
    CHECK(t.values[2] == AnalysisValue::exact(Rational(2, 3)));
    CHECK(t.values[3] == AnalysisValue::exact(Rational(2)));
    CHECK(t.not_a_probability[3]);
    CHECK_FALSE(t.not_a_probability[0]);
}

TEST_CASE("liberal quotient counts diverging mass") {
    Program p = load_corpus("abort_coin.cpgcl");
    State sigma = state_of({{"x", 0}, {"y", 0}});
    CHECK(cwlp(p, parse_expectation("[y = 0]"), sigma) ==
          AnalysisValue::exact(Rational(6, 7)));
    CHECK_THROWS_AS(cwlp(p, parse_expectation("10 + x"), sigma), BoundExceeded);
}

TEST_CASE("observation-free programs have coinciding quotients") {
    Program p = parse_program("{ x := 0 } [1/3] { x := 1 }");
    State sigma = state_of({{"x", 0}});
    Expectation f = parse_expectation("[x = 0]");
    QuotientTable t = quotient_table(p, f, sigma);
    Rational direct = wp(*p.body, f).value.eval_finite(sigma);
    for (int i = 0; i < 4; ++i) CHECK(t.values[i] == AnalysisValue::exact(direct));
}

TEST_CASE("diverging loop: zero value, full liberal mass") {
    Program p = load_corpus("p_div.cpgcl");
    State sigma = state_of({{"x", 0}});
    PreExpectationResult num = wp(*p.body, parse_expectation("[true]"));
    REQUIRE(num.exact);
    CHECK(num.value.eval_finite(sigma) == Rational(0));
    PreExpectationResult den = wlp(*p.body, Expectation::one());
    REQUIRE(den.exact);
    CHECK(den.value.eval_finite(sigma) == Rational(1));
    CHECK(cwp(p, parse_expectation("[true]"), sigma) == AnalysisValue::exact(Rational(0)));

    QuotientTable t = quotient_table(p, parse_expectation("[true]"), sigma);
    CHECK(t.values[0] == AnalysisValue::exact(Rational(0)));
    CHECK(t.values[1] == AnalysisValue::exact(Rational(1)));
    CHECK(t.values[2].is_undefined());
    CHECK(t.values[3].is_undefined());
}

TEST_CASE("loop without a syntactic fixpoint degrades to bounds") {
    Program p = load_corpus("p_andiv.cpgcl");
    State sigma = state_of({{"x", 0}});
    CHECK_THROWS_AS(cwp(p, parse_expectation("x"), sigma, 16), NonConvergent);
    AnalysisValue v = cwp(p, parse_expectation("[x = 0]"), sigma, 16, Rational(1));
    REQUIRE(v.kind == AnalysisValue::Kind::Interval);
    CHECK(v.lo == Rational(0)); // the true conditional value is undefined
}

TEST_CASE("nondeterministic choice takes the pointwise minimum under wp") {
    Program p = parse_program("{ x := 5 } [] { x := 2 }");
    Expectation f = parse_expectation("x");
    State sigma = state_of({{"x", 0}});
    CHECK(wp(*p.body, f).value.eval_finite(sigma) == Rational(2));
    CHECK_THROWS_AS(cwp_pair(*p.body, f, Expectation::one()), NondeterminismUnsupported);
    CHECK_THROWS_AS(cwp(p, f, sigma), NondeterminismUnsupported);
}

TEST_CASE("parameters must be instantiated before transformation") {
    Program p = load_corpus("example1.cpgcl");
    CHECK_THROWS_AS(wp(*p.body, parse_expectation("x")), UninstantiatedParameter);
}

TEST_CASE("observation-free baseline: the left pair program keeps probability p") {
    Program p = load_corpus("section3_left.cpgcl");
    Expectation f = parse_expectation("[x = 0]");
    State sigma = state_of({{"x", 0}, {"y", 0}});
    for (Rational pv : {Rational(1, 2), Rational(2, 7)}) {
        Program inst = instantiate_params(p, {{"p", pv}, {"q", Rational(1, 3)}});
        CHECK(wp(*inst.body, f).value.eval_finite(sigma) == pv);
        // no observations, so conditioning changes nothing
        CHECK(cwp(inst, f, sigma) == AnalysisValue::exact(pv));
    }
}

TEST_CASE("conditioned pair program matches the closed form at two instantiations") {
    Program p = load_corpus("section3_right.cpgcl");
    Expectation f = parse_expectation("[x = 0]");
    State sigma = state_of({{"x", 0}, {"y", 0}});
    auto closed = [](Rational pv, Rational qv) {
        Rational n = pv * qv;
        return n / (n + (Rational(1) - pv) * (Rational(1) - qv));
    };
    {
        Program inst = instantiate_params(p, {{"p", Rational(1, 2)}, {"q", Rational(1, 2)}});
        AnalysisValue v = cwp(inst, f, sigma);
        CHECK(v == AnalysisValue::exact(closed(Rational(1, 2), Rational(1, 2))));
        CHECK(v == AnalysisValue::exact(Rational(1, 2)));
    }
    {
        Program inst = instantiate_params(p, {{"p", Rational(1, 3)}, {"q", Rational(1, 4)}});
        AnalysisValue v = cwp(inst, f, sigma);
        CHECK(v == AnalysisValue::exact(closed(Rational(1, 3), Rational(1, 4))));
        CHECK(v == AnalysisValue::exact(Rational(1, 7)));
    }
}

TEST_CASE("loop iteration: monotone bounds, and fixpoints where iterates close") {
    // geometric loop: iterates 1/2, 3/4, ... never close syntactically
    Program geo = parse_program("c := 0; while (c = 0) { { c := 1 } [1/2] { c := 0 } }");
    State sigma = state_of({{"c", 0}});
    Expectation f = parse_expectation("[c = 1]");
    Rational prev(0);
    for (unsigned k = 1; k <= 8; ++k) {
        PreExpectationResult r = wp(*geo.body, f, k);
        Rational v = r.value.eval_finite(sigma);
        CHECK(v >= prev);
        CHECK_FALSE(r.exact);
        prev = v;
    }
    CHECK(prev == Rational(127, 128));
    // with a declared bound the conditional value still gets a sound interval
    AnalysisValue iv = cwp(geo, f, sigma, 8, Rational(1));
    REQUIRE(iv.kind == AnalysisValue::Kind::Interval);
    CHECK(iv.lo <= Rational(1));
    CHECK(iv.hi >= Rational(1)); // true value 1 lies inside

    // a loop whose body empties the guard closes after two rounds
    Program once = parse_program("while (x = 1) { x := 0 }");
    PreExpectationResult r = wp(*once.body, parse_expectation("x + 2"), 64);
    REQUIRE(r.exact);
    CHECK(r.value.eval_finite(state_of({{"x", 1}})) == Rational(2));
    CHECK(r.value.eval_finite(state_of({{"x", 5}})) == Rational(7));
}
