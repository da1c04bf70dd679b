// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "cpgcl/errors.hpp"
#include "cpgcl/parser.hpp"
#include "cpgcl/randgen.hpp"
#include "cpgcl/rmdp.hpp"
#include "cpgcl/solver.hpp"

#include "helpers.hpp"

using namespace cpgcl;
using testutil::load_corpus;
using testutil::state_of;

namespace {

std::size_t edge_count(const Rmdp& m) {
    std::size_t n = 0;
    for (const auto& s : m.states)
        for (const auto& c : s.choices) n += c.successors.size();
    return n;
}

} // namespace

TEST_CASE("skip unfolds into the three-state chain") {
    Program p = parse_program("skip");
    State sigma;
    Rmdp m = build(p, sigma, parse_expectation("7"));
    REQUIRE(m.states.size() == 3);
    CHECK(m.states[0].labels == kLabelNone);
    CHECK(m.states[1].labels == kLabelTerm);
    CHECK(m.states[1].reward == Rational(7)); // f at the final valuation
    CHECK(m.states[2].labels == kLabelSink);
    CHECK(edge_count(m) == 3); // skip -> term -> sink -> sink
    CHECK_FALSE(m.has_frontier());
}

TEST_CASE("nondeterministic example unfolds to the hand-derived shape") {
    Program p = instantiate_params(load_corpus("example1.cpgcl"), {{"q", Rational(1, 2)}});
    State sigma = state_of({{"x", 0}});
    Rmdp m = build(p, sigma, parse_expectation("x"));
    // hand unfolding: init, two choice branches, the left assignment branch,
    // two mid-assignment states, two observation states, one final valuation,
    // bad, sink
    CHECK(m.states.size() == 11);
    CHECK(edge_count(m) == 13); // including the sink self-loop
    auto nd = m.nondeterministic_states();
    REQUIRE(nd.size() == 1);
    const auto& cs = m.states[nd[0]].choices;
    REQUIRE(cs.size() == 2);
    CHECK(cs[0].action == Action::Left);
    CHECK(cs[1].action == Action::Right);
    // reward 5 sits on the only successful final valuation
    int rewarded = 0;
    for (const auto& s : m.states)
        if (s.reward > Rational(0)) {
            ++rewarded;
            CHECK(s.reward == Rational(5));
            CHECK(s.labels == kLabelTerm);
        }
    CHECK(rewarded == 1);
}

TEST_CASE("conditioned coin flip: one bad path, one rewarded path") {
    Program p = load_corpus("p_obs1.cpgcl");
    State sigma = state_of({{"x", 0}});
    Rmdp m = build(p, sigma, parse_expectation("x"));
    CHECK_FALSE(m.has_frontier());
    CHECK(m.fully_probabilistic());
    CHECK(reach_prob(m, kLabelBad) == Rational(1, 2));
    CHECK(expected_reward(m) == Rational(1, 2));
}

TEST_CASE("aborting program self-loops and never terminates") {
    Program p = parse_program("abort");
    Rmdp m = build(p, State(), parse_expectation("1"));
    REQUIRE(m.states.size() == 1);
    REQUIRE(m.states[0].choices.size() == 1);
    CHECK(m.states[0].choices[0].successors[0].first == 0);
    CHECK(expected_reward(m) == Rational(0));
}

TEST_CASE("diverging loops close into finite chains") {
    Program p = load_corpus("p_div.cpgcl");
    Rmdp m = build(p, state_of({{"x", 0}}), parse_expectation("1"));
    CHECK_FALSE(m.has_frontier());
    CHECK(m.states.size() < 10);
    Program q = load_corpus("p_andiv.cpgcl");
    Rmdp mq = build(q, state_of({{"x", 0}}), parse_expectation("1"));
    CHECK_FALSE(mq.has_frontier());
    CHECK(reach_prob(mq, kLabelBad) == Rational(1));
}

TEST_CASE("exploration limit leaves a frontier; larger limits extend the prefix") {
    Program p = load_corpus("crowds.cpgcl");
    Program inst = instantiate_params(p, {{"p", Rational(1, 2)}, {"c", Rational(1, 2)}});
    State sigma = total_state(inst, state_of({{"k", 2}}));
    Rmdp small = build(inst, sigma, parse_expectation("1"), 40);
    REQUIRE(small.has_frontier());
    Rmdp larger = build(inst, sigma, parse_expectation("1"), 80);
    // breadth-first order makes the smaller exploration a prefix of the larger
    for (std::size_t i = 0; i < small.states.size(); ++i) {
        CHECK(small.states[i].name == larger.states[i].name);
        if (small.states[i].expanded) {
            REQUIRE(larger.states[i].expanded);
            CHECK(small.states[i].choices.size() == larger.states[i].choices.size());
        }
    }
}

TEST_CASE("path-class invariants of built models") {
    Rng rng(0xBEEF);
    GenOptions o;
    o.nondet = true;
    for (int i = 0; i < 60; ++i) {
        Program p = gen_program(rng, o);
        Rmdp m = build(p, gen_state(rng, o), gen_post(rng, o, false), 50000);
        std::size_t sinks = 0;
        for (std::uint32_t s = 0; s < m.states.size(); ++s) {
            const auto& st = m.states[s];
            // no state carries both the success and the violation label
            CHECK((st.labels & (kLabelTerm | kLabelBad)) != (kLabelTerm | kLabelBad));
            if (st.labels & kLabelSink) ++sinks;
            // reward positivity only on successful terminal states
            if (st.reward > Rational(0)) CHECK(st.labels == kLabelTerm);
            if (st.labels & (kLabelTerm | kLabelBad)) {
                REQUIRE(st.choices.size() == 1);
                REQUIRE(st.choices[0].successors.size() == 1);
                CHECK((m.states[st.choices[0].successors[0].first].labels & kLabelSink));
            }
            for (const auto& c : st.choices) {
                Rational sum(0);
                for (const auto& [t, pr] : c.successors) {
                    CHECK(pr > Rational(0));
                    sum += pr;
                }
                CHECK(sum == Rational(1));
            }
            // enabled actions: exactly two iff the head is a nondeterministic choice
            CHECK(st.choices.size() <= 2);
        }
        CHECK(sinks <= 1);
    }
}

TEST_CASE("dot export is deterministic and reflects the model") {
    Program p = load_corpus("example2.cpgcl");
    State sigma = state_of({{"x", 0}, {"y", 0}});
    Rmdp m1 = build(p, sigma, parse_expectation("10 + x"));
    Rmdp m2 = build(p, sigma, parse_expectation("10 + x"));
    std::string d1 = export_dot(m1), d2 = export_dot(m2);
    CHECK(d1 == d2);
    CHECK(d1.find("digraph") == 0);
    CHECK(d1.find("reward") != std::string::npos);

    Program e1 = instantiate_params(load_corpus("example1.cpgcl"), {{"q", Rational(1, 2)}});
    Rmdp m3 = build(e1, state_of({{"x", 0}}), parse_expectation("x"));
    std::string d3 = export_dot(m3);
    CHECK(d3.find("left") != std::string::npos);
    CHECK(d3.find("right") != std::string::npos);
}

TEST_CASE("explicit format: counterexample model loads, validates, round-trips") {
    std::string text = testutil::read_file(testutil::corpus_path("fig4.rmdp"));
    Rmdp m = load_explicit(text);
    CHECK(m.states.size() == 8); // sink appended by terminal completion
    CHECK(m.initial == 0);
    CHECK(m.states[5].reward == Rational(11, 5));
    auto nd = m.nondeterministic_states();
    REQUIRE(nd.size() == 1);
    CHECK(nd[0] == 2);
    std::string canon = save_explicit(m);
    CHECK(save_explicit(load_explicit(canon)) == canon);
}

TEST_CASE("explicit format survives operational state names") {
    // configuration names contain braces, brackets and pipes; the format
    // must carry them through a full round trip
    Program p = load_corpus("example2.cpgcl");
    Rmdp m = build(p, state_of({{"x", 0}, {"y", 0}}), parse_expectation("10 + x"));
    std::string t1 = save_explicit(m);
    Rmdp back = load_explicit(t1);
    REQUIRE(back.states.size() == m.states.size());
    for (std::size_t i = 0; i < m.states.size(); ++i) {
        CHECK(back.states[i].name == m.states[i].name);
        CHECK(back.states[i].labels == m.states[i].labels);
        CHECK(back.states[i].reward == m.states[i].reward);
    }
    CHECK(save_explicit(back) == t1);
    CHECK(conditional_expected_reward(back) == conditional_expected_reward(m));
}

TEST_CASE("explicit format rejects broken models") {
    CHECK_THROWS_AS(load_explicit("states 2 initial 0\n"
                                  "state 0 labels {} reward 0\n"
                                  "state 1 labels {term} reward 1\n"
                                  "trans 0 unique { 1:9/10 }\n"),
                    InvariantError);
    CHECK_THROWS_AS(load_explicit("states 1 initial 0\n"
                                  "trans 0 unique { 3:1 }\n"),
                    InvariantError);
    CHECK_THROWS_AS(load_explicit("states 1 initial 0\nstate x labels {} reward 0\n"),
                    FormatError);
    try {
        load_explicit("states 1 initial 0\nbogus line\n");
        FAIL("expected a format error");
    } catch (const FormatError& e) {
        CHECK(e.line == 2);
    }
}

TEST_CASE("solver agrees with brute-force path enumeration on loop-free models") {
    Rng rng(0x0ACE);
    GenOptions o;
    o.max_depth = 4; // keeps the path count enumerable
    for (int i = 0; i < 80; ++i) {
        Program p = gen_program(rng, o);
        Rmdp m = build(p, gen_state(rng, o), gen_post(rng, o, false), 50000);
        testutil::PathSums oracle = testutil::path_oracle(m);
        CHECK(reach_prob(m, kLabelSink) == oracle.reach_sink);
        CHECK(reach_prob(m, kLabelBad) == oracle.reach_bad);
        CHECK(expected_reward(m) == oracle.reward);
    }
}
