// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "cpgcl/errors.hpp"
#include "cpgcl/parser.hpp"
#include "cpgcl/randgen.hpp"

#include "helpers.hpp"

using namespace cpgcl;
using testutil::state_of;

namespace {

Expectation exp_of(const std::string& text) { return parse_expectation(text); }

} // namespace

TEST_CASE("pointwise evaluation of guarded sums") {
    CHECK(exp_of("[x = 1]").eval_finite(state_of({{"x", 1}})) == Rational(1));
    CHECK(exp_of("[x = 1]").eval_finite(state_of({{"x", 0}})) == Rational(0));
    CHECK(exp_of("10 + x").eval_finite(state_of({{"x", 0}, {"y", 0}})) == Rational(10));
    // min of an indicator branch (0 here) and 2 + x = 3
    CHECK(exp_of("min([x < 0]*5, 2 + x)").eval_finite(state_of({{"x", 1}})) == Rational(0));
    CHECK(exp_of("inf").eval(state_of({})) == std::nullopt);
}

TEST_CASE("negative contributions are rejected at evaluation") {
    CHECK_THROWS_AS(exp_of("x").eval_finite(state_of({{"x", -2}})), NegativeExpectation);
    // symbolically indefinite weights are fine while nonnegative at the state
    CHECK(exp_of("10 - x").eval_finite(state_of({{"x", 3}})) == Rational(7));
}

TEST_CASE("substitution: textbook cases") {
    Expectation e = exp_of("[x = 1]").substituted("x", *aconst(BigInt(1))).simplified();
    CHECK(e.constant_value() == Rational(1));
    Expectation c = exp_of("10 + x").substituted("x", *aconst(BigInt(0))).simplified();
    CHECK(c.constant_value() == Rational(10));
}

TEST_CASE("substitution commutes with evaluation") {
    Rng rng(0xAB5EED);
    GenOptions o;
    for (int i = 0; i < 500; ++i) {
        Expectation f = gen_post(rng, o, false);
        auto vars = gen_var_names(o);
        std::string x = vars[rng.below(vars.size())];
        AExpPtr e = gen_aexp(rng, o, 2);
        State sigma = gen_state(rng, o);
        State updated = sigma.updated(x, eval(*e, sigma));
        REQUIRE(f.substituted(x, *e).eval_finite(sigma) == f.eval_finite(updated));
    }
}

TEST_CASE("algebra constructors evaluate pointwise") {
    Expectation f = exp_of("10 + x");
    GuardPtr g = from_bexp(*parse_bexp_text("y = 0"));
    CHECK(Expectation::guard_mul(g, f).eval_finite(state_of({{"x", 1}, {"y", 0}})) ==
          Rational(11));
    CHECK(Expectation::guard_mul(g, f).eval_finite(state_of({{"x", 1}, {"y", 2}})) ==
          Rational(0));
    CHECK(Expectation::scale(Rational(0), f).is_zero());

    Rng rng(0x5CA1E);
    GenOptions o;
    for (int i = 0; i < 200; ++i) {
        Expectation a = gen_post(rng, o, false);
        Expectation b = gen_post(rng, o, false);
        State sigma = gen_state(rng, o);
        Rational va = a.eval_finite(sigma), vb = b.eval_finite(sigma);
        CHECK(Expectation::add(a, b).eval_finite(sigma) == va + vb);
        CHECK(Expectation::min_of(a, b).eval_finite(sigma) == std::min(va, vb));
        CHECK(Expectation::scale(Rational(1, 2), a).eval_finite(sigma) ==
              va * Rational(1, 2));
        // half + half equals the whole
        Expectation halves = Expectation::add(Expectation::scale(Rational(1, 2), a),
                                              Expectation::scale(Rational(1, 2), a));
        CHECK(halves.eval_finite(sigma) == va);
    }
}

TEST_CASE("simplification merges guards and drops dead terms") {
    Expectation e = exp_of("[true]*2 + [true]*3").simplified();
    CHECK(e.constant_value() == Rational(5));
    Expectation d = exp_of("[x = 1]*0 + [x != 1]*7").simplified();
    REQUIRE(d.terms().size() == 1);
    CHECK(d.terms()[0].weight.constant_value() == Rational(7));
    // complementary guards with equal weight cover every state
    Expectation c = exp_of("[x = 1]*5 + [x != 1]*5").simplified();
    CHECK(c.constant_value() == Rational(5));
}

TEST_CASE("simplification preserves evaluation") {
    Rng rng(0xF1DE);
    GenOptions o;
    for (int i = 0; i < 500; ++i) {
        Expectation f = gen_post(rng, o, false);
        Expectation combo = Expectation::add(
            Expectation::scale(Rational(rng.range(0, 2)), f), gen_post(rng, o, true));
        State sigma = gen_state(rng, o);
        REQUIRE(combo.simplified().eval_finite(sigma) == combo.eval_finite(sigma));
    }
}

TEST_CASE("surface syntax round-trips through the printer") {
    Rng rng(0xD07);
    GenOptions o;
    for (int i = 0; i < 200; ++i) {
        Expectation f = Expectation::add(gen_post(rng, o, false),
                                         gen_post(rng, o, true)).simplified();
        if (rng.chance(25)) f = Expectation::min_of(f, gen_post(rng, o, false)).simplified();
        Expectation back = parse_expectation(f.str());
        State sigma = gen_state(rng, o);
        REQUIRE(back.eval_finite(sigma) == f.eval_finite(sigma));
        CHECK(back.simplified().equals(f));
    }
}

TEST_CASE("expectation reader is total on arbitrary input") {
    Rng rng(0x70F0);
    const char alphabet[] = "xy01[]()*+-/,= <minf";
    for (int i = 0; i < 1500; ++i) {
        std::string junk;
        std::size_t len = rng.below(30);
        for (std::size_t k = 0; k < len; ++k)
            junk += alphabet[rng.below(sizeof(alphabet) - 1)];
        try {
            (void)parse_expectation(junk);
        } catch (const SyntaxError&) {
        } catch (const ValidationError&) {
        }
    }
    CHECK(true);
}

TEST_CASE("guarding the infinite expectation is rejected") {
    GuardPtr g = from_bexp(*parse_bexp_text("x = 0"));
    CHECK_THROWS_AS(Expectation::guard_mul(g, Expectation::infinity()), EvaluationError);
    CHECK(Expectation::add(Expectation::one(), Expectation::infinity()).is_infinity());
}
