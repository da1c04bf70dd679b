// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cpgcl/rational.hpp"
#include "cpgcl/state.hpp"

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace cpgcl {

class Expectation; // expectation.hpp; referenced by handle only

// ---------------------------------------------------------------------------
// Arithmetic expressions over program variables (integer valued).
// ---------------------------------------------------------------------------

struct AExp;
using AExpPtr = std::shared_ptr<const AExp>;

enum class AOp { Add, Sub, Mul };

struct AExp {
    enum class Kind { Const, Var, Bin };
    Kind kind;
    BigInt value;       // Const
    std::string var;    // Var
    AOp op = AOp::Add;  // Bin
    AExpPtr lhs, rhs;   // Bin
};

AExpPtr aconst(BigInt v);
AExpPtr avar(std::string name);
AExpPtr abin(AOp op, AExpPtr l, AExpPtr r);

BigInt eval(const AExp& e, const State& sigma);
bool equal(const AExp& a, const AExp& b);
void collect_vars(const AExp& e, std::set<std::string>& out);
std::string to_string(const AExp& e);

// ---------------------------------------------------------------------------
// Boolean expressions.
// ---------------------------------------------------------------------------

struct BExp;
using BExpPtr = std::shared_ptr<const BExp>;

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

struct BExp {
    enum class Kind { True, False, Cmp, And, Or, Not };
    Kind kind;
    CmpOp cmp = CmpOp::Eq;  // Cmp
    AExpPtr lhs, rhs;       // Cmp
    BExpPtr a, b;           // And/Or (a,b), Not (a)
};

BExpPtr btrue();
BExpPtr bfalse();
BExpPtr bcmp(CmpOp op, AExpPtr l, AExpPtr r);
BExpPtr band(BExpPtr a, BExpPtr b);
BExpPtr bor(BExpPtr a, BExpPtr b);
BExpPtr bnot(BExpPtr a);

bool eval(const BExp& e, const State& sigma);
bool equal(const BExp& a, const BExp& b);
void collect_vars(const BExp& e, std::set<std::string>& out);
std::string to_string(const BExp& e);

// ---------------------------------------------------------------------------
// Probability annotations of probabilistic choices.
// ---------------------------------------------------------------------------

/// A probability is a rational constant in [0,1], a named parameter to be
/// instantiated later, or a state-dependent quotient of two expectations
/// (produced by observation hoisting).
struct ProbExp {
    enum class Kind { Const, Param, Quotient };
    Kind kind = Kind::Const;
    Rational value;      // Const
    std::string param;   // Param
    std::shared_ptr<const Expectation> num, den;  // Quotient

    static ProbExp constant(Rational r);
    static ProbExp parameter(std::string name);
    static ProbExp quotient(std::shared_ptr<const Expectation> num,
                            std::shared_ptr<const Expectation> den);
};

bool equal(const ProbExp& a, const ProbExp& b);
std::string to_string(const ProbExp& p);

// ---------------------------------------------------------------------------
// Statements.
// ---------------------------------------------------------------------------

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Stmt {
    enum class Kind { Skip, Abort, Assign, Seq, Ite, PChoice, NDChoice, While, Observe };
    Kind kind;
    std::string var;      // Assign
    AExpPtr expr;         // Assign
    BExpPtr guard;        // Ite/While/Observe
    ProbExp prob;         // PChoice
    StmtPtr first;        // Seq/Ite/PChoice/NDChoice lhs, While body
    StmtPtr second;       // Seq/Ite/PChoice/NDChoice rhs
};

StmtPtr sskip();
StmtPtr sabort();
StmtPtr sassign(std::string var, AExpPtr e);
StmtPtr sseq(StmtPtr a, StmtPtr b);
StmtPtr sseq(const std::vector<StmtPtr>& parts); // right-nested; empty -> skip
StmtPtr site(BExpPtr g, StmtPtr then_branch, StmtPtr else_branch);
StmtPtr spchoice(StmtPtr a, ProbExp p, StmtPtr b);
StmtPtr sndchoice(StmtPtr a, StmtPtr b);
StmtPtr swhile(BExpPtr g, StmtPtr body);
StmtPtr sobserve(BExpPtr g);

bool equal(const Stmt& a, const Stmt& b);
bool contains_kind(const Stmt& s, Stmt::Kind k);
void collect_vars(const Stmt& s, std::set<std::string>& out);
void collect_params(const Stmt& s, std::set<std::string>& out);

/// Multi-line pretty-printer; the output parses back to a structurally
/// identical tree.
std::string pretty_print(const Stmt& s);

// ---------------------------------------------------------------------------
// Programs.
// ---------------------------------------------------------------------------

struct Program {
    StmtPtr body;
    std::vector<std::string> declared_vars;  // first-occurrence order
    std::set<std::string> params;

    bool fully_probabilistic() const { return !contains_kind(*body, Stmt::Kind::NDChoice); }
    bool observe_free() const { return !contains_kind(*body, Stmt::Kind::Observe); }
};

/// Builds a program from a statement, collecting variables (first-occurrence
/// order) and parameter names.
Program make_program(StmtPtr body);

std::string pretty_print(const Program& p);

/// Replaces every Param node by the bound rational constant. Every program
/// parameter must be bound; unknown names are rejected.
Program instantiate_params(const Program& p, const std::map<std::string, Rational>& bindings);

} // namespace cpgcl
