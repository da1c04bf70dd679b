// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "cpgcl/errors.hpp"
#include "cpgcl/parser.hpp"
#include "cpgcl/rmdp.hpp"
#include "cpgcl/solver.hpp"

#include "helpers.hpp"

using namespace cpgcl;
using testutil::load_corpus;
using testutil::state_of;

namespace {

Rmdp model_of(const std::string& corpus_name, const Expectation& f,
              std::map<std::string, Rational> params = {},
              State extra = State()) {
    Program p = load_corpus(corpus_name);
    Program inst = p.params.empty() ? p : instantiate_params(p, params);
    return build(inst, total_state(inst, extra), f);
}

/// Closed form for the anonymity protocol: probability that no collaborator
/// ever sees the message, conditioned on at most k hops.
Rational crowds_closed_form(const Rational& p, const Rational& c, unsigned k) {
    Rational one(1);
    Rational pc = p * (one - c);
    Rational num = (one - c) * (one - p) * (one - pc.pow(k)) / (one - pc);
    Rational den = one - p.pow(k);
    return num / den;
}

} // namespace

TEST_CASE("reachability probabilities of the small corpus") {
    Rmdp obs1 = model_of("p_obs1.cpgcl", parse_expectation("x"));
    CHECK(reach_prob(obs1, kLabelBad) == Rational(1, 2));
    CHECK(Rational(1) - reach_prob(obs1, kLabelBad) == Rational(1, 2));

    Rmdp skip = build(parse_program("skip"), State(), parse_expectation("1"));
    CHECK(reach_prob(skip, kLabelSink) == Rational(1));

    // the diverging feasible run has measure zero
    Rmdp andiv = model_of("p_andiv.cpgcl", parse_expectation("x"));
    CHECK(reach_prob(andiv, kLabelBad) == Rational(1));
}

TEST_CASE("expected rewards") {
    Rmdp ex2 = model_of("example2.cpgcl", parse_expectation("10 + x"));
    CHECK(expected_reward(ex2) == Rational(27, 4));

    Rmdp ab = build(parse_program("abort"), State(), parse_expectation("1"));
    CHECK(expected_reward(ab) == Rational(0));

    Rmdp obs1 = model_of("p_obs1.cpgcl", parse_expectation("x"));
    CHECK(expected_reward(obs1) == Rational(1, 2));
}

TEST_CASE("liberal expected rewards") {
    Rmdp ab = build(parse_program("abort"), State(), parse_expectation("1"));
    CHECK(liberal_expected_reward(ab) == Rational(1));

    Rmdp coin = model_of("abort_coin.cpgcl", parse_expectation("1"));
    CHECK(liberal_expected_reward(coin) == Rational(7, 8));

    Rmdp ex2 = model_of("example2.cpgcl", parse_expectation("1"));
    CHECK(liberal_expected_reward(ex2) == Rational(13, 20));

    Rmdp big = model_of("example2.cpgcl", parse_expectation("10 + x"));
    CHECK_THROWS_AS(liberal_expected_reward(big), BoundExceeded);
}

TEST_CASE("conditional expected rewards on the named corpus") {
    Rmdp coin = model_of("abort_coin.cpgcl", parse_expectation("[y = 0]"));
    CHECK(conditional_expected_reward(coin) == AnalysisValue::exact(Rational(2, 7)));
    CHECK(conditional_expected_reward(coin, /*liberal=*/true) ==
          AnalysisValue::exact(Rational(6, 7)));

    Rmdp div = model_of("p_div.cpgcl", parse_expectation("[true]"));
    CHECK(conditional_expected_reward(div) == AnalysisValue::exact(Rational(0)));

    Rmdp andiv = model_of("p_andiv.cpgcl", parse_expectation("x"));
    CHECK(conditional_expected_reward(andiv).is_undefined());

    Rmdp ex2 = model_of("example2.cpgcl", parse_expectation("10 + x"));
    CHECK(conditional_expected_reward(ex2) == AnalysisValue::exact(Rational(135, 13)));
}

TEST_CASE("divergent reward accumulation is reported, not fabricated") {
    // reward on a state that loops forever without reaching the sink
    Rmdp m = load_explicit("states 3 initial 0\n"
                           "state 0 labels {} reward 1\n"
                           "state 1 labels {term} reward 0\n"
                           "state 2 labels {} reward 0\n"
                           "trans 0 unique { 0:1/2, 1:1/2 }\n" // escapes: fine
                           "trans 2 unique { 2:1 }\n");
    CHECK(expected_reward(m) == Rational(2)); // geometric visits, then term
    Rmdp bad = load_explicit("states 2 initial 0\n"
                             "state 0 labels {} reward 1\n"
                             "state 1 labels {term} reward 0\n"
                             "trans 0 unique { 0:1 }\n");
    CHECK_THROWS_AS(expected_reward(bad), NonConvergent);
}

TEST_CASE("interval bounds degenerate to the exact value on resolved models") {
    Rmdp ex2 = model_of("example2.cpgcl", parse_expectation("[y = 0]"));
    BoundedConditional b = bounded_conditional(ex2, Rational(1));
    CHECK(b.unresolved_mass == Rational(0));
    CHECK(b.value.is_exact());
    CHECK(b.value == conditional_expected_reward(ex2));
}

TEST_CASE("liberal interval bounds account for diverging and frontier mass") {
    // fully resolved: degenerates to the exact liberal value
    Rmdp coin = model_of("abort_coin.cpgcl", parse_expectation("[y = 0]"));
    BoundedConditional b = bounded_conditional(coin, Rational(1), /*liberal=*/true);
    CHECK(b.value == AnalysisValue::exact(Rational(6, 7)));

    // partial unfolding: the exact value stays inside the liberal interval
    Program p = load_corpus("crowds.cpgcl");
    Program inst = instantiate_params(p, {{"p", Rational(1, 2)}, {"c", Rational(1, 2)}});
    State sigma = total_state(inst, state_of({{"k", 2}}));
    Expectation f = parse_expectation("[intercepted = 0]");
    Rmdp full_enough = build(inst, sigma, f, 4096);
    Rmdp partial = build(inst, sigma, f, 96);
    REQUIRE(partial.has_frontier());
    BoundedConditional wide = bounded_conditional(partial, Rational(1), true);
    BoundedConditional tight = bounded_conditional(full_enough, Rational(1), true);
    CHECK(wide.value.lo <= tight.value.lo);
    CHECK(tight.value.hi <= wide.value.hi);
    CHECK_THROWS_AS(bounded_conditional(partial, Rational(2), true), BoundExceeded);
}

TEST_CASE("interval bounds converge on the anonymity protocol") {
    Program p = load_corpus("crowds.cpgcl");
    Program inst = instantiate_params(p, {{"p", Rational(1, 2)}, {"c", Rational(1, 2)}});
    State sigma = total_state(inst, state_of({{"k", 2}}));
    Expectation f = parse_expectation("[intercepted = 0]");
    Rational expected = crowds_closed_form(Rational(1, 2), Rational(1, 2), 2);
    CHECK(expected == Rational(5, 12));

    Rational prev_width(2);
    for (std::size_t states : {64, 256, 1024}) {
        Rmdp m = build(inst, sigma, f, states);
        REQUIRE(m.has_frontier());
        BoundedConditional b = bounded_conditional(m, Rational(1));
        // sound: the exact value always lies inside, and intervals shrink
        CHECK(b.value.lo <= expected);
        CHECK(expected <= b.value.hi);
        CHECK(b.value.width() <= prev_width);
        prev_width = b.value.width();
    }
    CHECK(prev_width < Rational(1, 1000));
}

TEST_CASE("grid of protocol instantiations matches the closed form") {
    Program src = load_corpus("crowds.cpgcl");
    Expectation f = parse_expectation("[intercepted = 0]");
    Rational tol(1, 1000000);
    for (Rational p : {Rational(3, 5), Rational(4, 5)}) {
        for (Rational c : {Rational(1, 10), Rational(1, 5)}) {
            for (unsigned k : {1u, 2u, 5u}) {
                Program inst = instantiate_params(src, {{"p", p}, {"c", c}});
                State sigma = total_state(inst);
                sigma.set("k", BigInt(static_cast<long>(k)));
                Rational want = crowds_closed_form(p, c, k);
                std::size_t states = 512;
                while (true) {
                    Rmdp m = build(inst, sigma, f, states);
                    BoundedConditional b = bounded_conditional(m, Rational(1));
                    REQUIRE(b.value.lo <= want);
                    REQUIRE(want <= b.value.hi);
                    if (b.value.width() < tol) break;
                    states *= 2;
                    REQUIRE(states < 2000000);
                }
            }
        }
    }
}

TEST_CASE("fixed-probability nondeterministic program prefers the undefined branch") {
    Program p = load_corpus("p_nondet.cpgcl");
    Rmdp m = build(p, total_state(p), parse_expectation("x"));
    MinConditionalResult r = min_conditional(m);
    REQUIRE(r.enumerated.size() == 2);
    CHECK(r.enumerated[0] == AnalysisValue::exact(Rational(5)));
    CHECK(r.enumerated[1].is_undefined());
    CHECK(r.value.is_undefined());
}

TEST_CASE("scheduler enumeration on the counterexample model") {
    Rmdp m = load_explicit(testutil::read_file(testutil::corpus_path("fig4.rmdp")));
    MinConditionalResult r = min_conditional(m);
    REQUIRE(r.enumerated.size() == 2);
    CHECK(r.enumerated[0] == AnalysisValue::exact(Rational(3, 2))); // left
    CHECK(r.enumerated[1] == AnalysisValue::exact(Rational(7, 5))); // right
    CHECK(r.value == AnalysisValue::exact(Rational(7, 5)));
    CHECK(r.scheduler.at(2) == Action::Right);

    // the sub-model rooted at the nondeterministic state flips the choice
    MinConditionalResult sub = min_conditional(reroot(m, 2));
    CHECK(sub.enumerated[0] == AnalysisValue::exact(Rational(2)));
    CHECK(sub.enumerated[1] == AnalysisValue::exact(Rational(11, 5)));
    CHECK(sub.value == AnalysisValue::exact(Rational(2)));
    CHECK(sub.scheduler.at(2) == Action::Left);
}

TEST_CASE("demonic minimum prefers the undefined quotient") {
    Program p = instantiate_params(load_corpus("example1.cpgcl"), {{"q", Rational(1, 2)}});
    Rmdp m = build(p, state_of({{"x", 0}}), parse_expectation("x"));
    MinConditionalResult r = min_conditional(m);
    REQUIRE(r.enumerated.size() == 2);
    CHECK(r.enumerated[0] == AnalysisValue::exact(Rational(5)));
    CHECK(r.enumerated[1].is_undefined());
    CHECK(r.value.is_undefined());
    REQUIRE(r.scheduler.size() == 1);
    CHECK(r.scheduler.begin()->second == Action::Right);
}

TEST_CASE("enumeration without nondeterminism returns the plain value") {
    Rmdp m = model_of("example2.cpgcl", parse_expectation("10 + x"));
    MinConditionalResult r = min_conditional(m);
    CHECK(r.enumerated.size() == 1);
    CHECK(r.scheduler.empty());
    CHECK(r.value == conditional_expected_reward(m));
}

TEST_CASE("enumeration guards: budget and cyclic nondeterminism") {
    Rmdp m = load_explicit(testutil::read_file(testutil::corpus_path("fig4.rmdp")));
    CHECK_THROWS_AS(min_conditional(m, 0), BudgetExceeded);

    Rmdp cyc = load_explicit("states 2 initial 0\n"
                             "state 0 labels {} reward 0\n"
                             "state 1 labels {term} reward 1\n"
                             "trans 0 left { 0:1 }\n"
                             "trans 0 right { 1:1 }\n");
    CHECK_THROWS_AS(min_conditional(cyc), CyclicNondeterminism);
}
