// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "cpgcl/errors.hpp"
#include "cpgcl/parser.hpp"
#include "cpgcl/randgen.hpp"
#include "cpgcl/validate.hpp"

#include "helpers.hpp"

using namespace cpgcl;

TEST_CASE("coin flip with observation parses to the expected tree") {
    Program p = parse_program("{x := 0} [1/2] {x := 1}; observe (x = 1)");
    REQUIRE(p.body->kind == Stmt::Kind::Seq);
    const Stmt& pc = *p.body->first;
    CHECK(pc.kind == Stmt::Kind::PChoice);
    CHECK(pc.prob.kind == ProbExp::Kind::Const);
    CHECK(pc.prob.value == Rational(1, 2));
    CHECK(pc.first->kind == Stmt::Kind::Assign);
    const Stmt& obs = *p.body->second;
    CHECK(obs.kind == Stmt::Kind::Observe);
    CHECK(p.declared_vars == std::vector<std::string>{"x"});
    CHECK(p.params.empty());
}

TEST_CASE("smallest program") {
    Program p = parse_program("skip");
    CHECK(p.body->kind == Stmt::Kind::Skip);
    CHECK(p.declared_vars.empty());
    CHECK(pretty_print(p) == "skip");
}

TEST_CASE("probability constants outside the unit interval are rejected") {
    CHECK_THROWS_AS(parse_program("{x := 0} [3/2] {x := 1}"), ValidationError);
    CHECK_THROWS_AS(parse_program("{x := 0} [2] {x := 1}"), ValidationError);
}

TEST_CASE("malformed input raises a located syntax error") {
    try {
        parse_program("x := ;");
        FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
        CHECK(e.line == 1);
        CHECK(e.column == 6);
    }
    CHECK_THROWS_AS(parse_program("while x { skip }"), SyntaxError);
    CHECK_THROWS_AS(parse_program("if (x = 1) { skip }"), SyntaxError);
}

TEST_CASE("decimal probabilities convert exactly") {
    Program p = parse_program("{x := 0} [0.25] {x := 1}");
    CHECK(p.body->prob.value == Rational(1, 4));
}

TEST_CASE("parameters are collected from probability position") {
    Program p = testutil::load_corpus("crowds.cpgcl");
    CHECK(p.params == std::set<std::string>{"c", "p"});
    // k only occurs in an arithmetic position, so it is a variable
    bool has_k = false;
    for (const auto& v : p.declared_vars) has_k |= v == "k";
    CHECK(has_k);
    CHECK(validate(p).empty());
}

TEST_CASE("validation reports undeclared variables") {
    Program p = parse_program("x := y + 1");
    p.declared_vars = {"x"}; // drop y as if built programmatically
    auto vs = validate(p);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].kind == Violation::Kind::Scope);
    CHECK(vs[0].subject == "y");
}

TEST_CASE("validation reports reserved names and range violations") {
    Program p = parse_program("__rerun := 1");
    auto vs = validate(p);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].kind == Violation::Kind::Reserved);
    CHECK(validate(p, /*allow_reserved=*/true).empty());

    Program q = parse_program("{x := 0} [1/2] {x := 1}");
    auto* raw = const_cast<Stmt*>(q.body.get());
    raw->prob = ProbExp::constant(Rational(-1, 2));
    auto ws = validate(q);
    REQUIRE(ws.size() == 1);
    CHECK(ws[0].kind == Violation::Kind::Range);
}

TEST_CASE("pretty printer round-trips the named corpus") {
    for (const char* name :
         {"p_obs1.cpgcl", "p_obs2.cpgcl", "p_div.cpgcl", "p_andiv.cpgcl",
          "p_nondet.cpgcl", "example1.cpgcl", "example2.cpgcl", "abort_coin.cpgcl",
          "example3_pre.cpgcl", "section3_left.cpgcl", "section3_right.cpgcl",
          "crowds.cpgcl"}) {
        Program p = testutil::load_corpus(name);
        Program back = parse_program(pretty_print(p));
        CHECK_MESSAGE(equal(*p.body, *back.body), name);
    }
}

TEST_CASE("pretty printer round-trips generated trees") {
    Rng rng(0xC0FFEE);
    GenOptions o;
    o.loops = true;
    o.nondet = true;
    o.max_depth = 8;
    for (int i = 0; i < 300; ++i) {
        Program p = gen_program(rng, o);
        Program back = parse_program(pretty_print(p));
        REQUIRE(equal(*p.body, *back.body));
    }
}

TEST_CASE("rational literal forms") {
    CHECK(Rational::parse("3/6") == Rational(1, 2));
    CHECK(Rational::parse("0.25") == Rational(1, 4));
    CHECK(Rational::parse("-1.5") == Rational(-3, 2));
    CHECK(Rational::parse("1e-6") == Rational(1, 1000000));
    CHECK(Rational::parse("2.5e2") == Rational(250));
    CHECK(Rational::parse("+7") == Rational(7));
    CHECK(Rational::parse("1/-2") == Rational(-1, 2)); // canonicalized sign
    CHECK_THROWS_AS(Rational::parse("1/0"), EvaluationError);
    CHECK_THROWS_AS(Rational::parse("abc"), EvaluationError);
    CHECK_THROWS_AS(Rational::parse(""), EvaluationError);
    CHECK(Rational(3, 6).num() == BigInt(1));
    CHECK(Rational(3, 6).den() == BigInt(2));
    CHECK(Rational(2, -4) == Rational(-1, 2));
}

TEST_CASE("parser is total on arbitrary input") {
    Rng rng(0xFA22);
    const char alphabet[] = "abxy01 (){}[]:=;<>!&|+-*/.\n\"observewhile";
    for (int i = 0; i < 2000; ++i) {
        std::string junk;
        std::size_t len = rng.below(40);
        for (std::size_t k = 0; k < len; ++k)
            junk += alphabet[rng.below(sizeof(alphabet) - 1)];
        try {
            (void)parse_program(junk);
        } catch (const SyntaxError&) {
        } catch (const ValidationError&) {
        }
    }
    CHECK(true); // no other outcome escaped
}

TEST_CASE("sequencing binds looser than choice blocks") {
    Program p = parse_program("{ skip; x := 1 } [1/2] { skip }; x := 2");
    REQUIRE(p.body->kind == Stmt::Kind::Seq);
    CHECK(p.body->first->kind == Stmt::Kind::PChoice);
    CHECK(p.body->first->first->kind == Stmt::Kind::Seq);
}

TEST_CASE("comparison precedence: conjunction binds tighter than disjunction") {
    Program p = parse_program("observe (x = 0 || y = 0 && z = 0)");
    const BExp& g = *p.body->guard;
    REQUIRE(g.kind == BExp::Kind::Or);
    CHECK(g.b->kind == BExp::Kind::And);
}

TEST_CASE("parameter instantiation replaces and validates") {
    Program p = testutil::load_corpus("example3_pre.cpgcl");
    Program inst = instantiate_params(p, {{"p", Rational(1, 3)}});
    CHECK(inst.params.empty());
    CHECK(inst.body->first->prob.kind == ProbExp::Kind::Const);
    CHECK_THROWS_AS(instantiate_params(p, {}), UninstantiatedParameter);
    CHECK_THROWS_AS(instantiate_params(p, {{"p", Rational(1, 3)}, {"zz", Rational(1)}}),
                    ParameterError);
    CHECK_THROWS_AS(instantiate_params(p, {{"p", Rational(3, 2)}}), ValidationError);
}
