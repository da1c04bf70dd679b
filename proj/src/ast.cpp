// SPDX-License-Identifier: Apache-2.0
#include "cpgcl/ast.hpp"

#include "cpgcl/errors.hpp"
#include "cpgcl/expectation.hpp"

#include <sstream>

namespace cpgcl {

// --------------------------------------------------------------------------
// AExp
// --------------------------------------------------------------------------

AExpPtr aconst(BigInt v) {
    auto e = std::make_shared<AExp>();
    e->kind = AExp::Kind::Const;
    e->value = std::move(v);
    return e;
}

AExpPtr avar(std::string name) {
    auto e = std::make_shared<AExp>();
    e->kind = AExp::Kind::Var;
    e->var = std::move(name);
    return e;
}

AExpPtr abin(AOp op, AExpPtr l, AExpPtr r) {
    auto e = std::make_shared<AExp>();
    e->kind = AExp::Kind::Bin;
    e->op = op;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    return e;
}

BigInt eval(const AExp& e, const State& sigma) {
    switch (e.kind) {
    case AExp::Kind::Const: return e.value;
    case AExp::Kind::Var: return sigma.get(e.var);
    case AExp::Kind::Bin: {
        BigInt l = eval(*e.lhs, sigma), r = eval(*e.rhs, sigma);
        switch (e.op) {
        case AOp::Add: return l + r;
        case AOp::Sub: return l - r;
        case AOp::Mul: return l * r;
        }
    }
    }
    throw EvaluationError("corrupt arithmetic expression");
}

bool equal(const AExp& a, const AExp& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case AExp::Kind::Const: return a.value == b.value;
    case AExp::Kind::Var: return a.var == b.var;
    case AExp::Kind::Bin:
        return a.op == b.op && equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
    }
    return false;
}

void collect_vars(const AExp& e, std::set<std::string>& out) {
    switch (e.kind) {
    case AExp::Kind::Const: return;
    case AExp::Kind::Var: out.insert(e.var); return;
    case AExp::Kind::Bin:
        collect_vars(*e.lhs, out);
        collect_vars(*e.rhs, out);
        return;
    }
}

namespace {

int aprec(const AExp& e) {
    if (e.kind != AExp::Kind::Bin) return 3;
    return e.op == AOp::Mul ? 2 : 1;
}

void print_aexp(const AExp& e, std::ostream& os, int parent_prec, bool right_child) {
    int p = aprec(e);
    bool parens = p < parent_prec || (p == parent_prec && right_child && p < 3);
    if (parens) os << "(";
    switch (e.kind) {
    case AExp::Kind::Const: os << e.value.get_str(); break;
    case AExp::Kind::Var: os << e.var; break;
    case AExp::Kind::Bin: {
        const char* op = e.op == AOp::Add ? " + " : e.op == AOp::Sub ? " - " : " * ";
        print_aexp(*e.lhs, os, p, false);
        os << op;
        print_aexp(*e.rhs, os, p, true);
        break;
    }
    }
    if (parens) os << ")";
}

} // namespace

std::string to_string(const AExp& e) {
    std::ostringstream os;
    print_aexp(e, os, 0, false);
    return os.str();
}

// --------------------------------------------------------------------------
// BExp
// --------------------------------------------------------------------------

BExpPtr btrue() {
    auto e = std::make_shared<BExp>();
    e->kind = BExp::Kind::True;
    return e;
}

BExpPtr bfalse() {
    auto e = std::make_shared<BExp>();
    e->kind = BExp::Kind::False;
    return e;
}

BExpPtr bcmp(CmpOp op, AExpPtr l, AExpPtr r) {
    auto e = std::make_shared<BExp>();
    e->kind = BExp::Kind::Cmp;
    e->cmp = op;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    return e;
}

BExpPtr band(BExpPtr a, BExpPtr b) {
    auto e = std::make_shared<BExp>();
    e->kind = BExp::Kind::And;
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
}

BExpPtr bor(BExpPtr a, BExpPtr b) {
    auto e = std::make_shared<BExp>();
    e->kind = BExp::Kind::Or;
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
}

BExpPtr bnot(BExpPtr a) {
    auto e = std::make_shared<BExp>();
    e->kind = BExp::Kind::Not;
    e->a = std::move(a);
    return e;
}

bool eval(const BExp& e, const State& sigma) {
    switch (e.kind) {
    case BExp::Kind::True: return true;
    case BExp::Kind::False: return false;
    case BExp::Kind::Cmp: {
        BigInt l = eval(*e.lhs, sigma), r = eval(*e.rhs, sigma);
        switch (e.cmp) {
        case CmpOp::Eq: return l == r;
        case CmpOp::Ne: return l != r;
        case CmpOp::Lt: return l < r;
        case CmpOp::Le: return l <= r;
        case CmpOp::Gt: return l > r;
        case CmpOp::Ge: return l >= r;
        }
        break;
    }
    case BExp::Kind::And: return eval(*e.a, sigma) && eval(*e.b, sigma);
    case BExp::Kind::Or: return eval(*e.a, sigma) || eval(*e.b, sigma);
    case BExp::Kind::Not: return !eval(*e.a, sigma);
    }
    throw EvaluationError("corrupt boolean expression");
}

bool equal(const BExp& a, const BExp& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case BExp::Kind::True:
    case BExp::Kind::False: return true;
    case BExp::Kind::Cmp:
        return a.cmp == b.cmp && equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
    case BExp::Kind::And:
    case BExp::Kind::Or: return equal(*a.a, *b.a) && equal(*a.b, *b.b);
    case BExp::Kind::Not: return equal(*a.a, *b.a);
    }
    return false;
}

void collect_vars(const BExp& e, std::set<std::string>& out) {
    switch (e.kind) {
    case BExp::Kind::True:
    case BExp::Kind::False: return;
    case BExp::Kind::Cmp:
        collect_vars(*e.lhs, out);
        collect_vars(*e.rhs, out);
        return;
    case BExp::Kind::And:
    case BExp::Kind::Or:
        collect_vars(*e.a, out);
        collect_vars(*e.b, out);
        return;
    case BExp::Kind::Not: collect_vars(*e.a, out); return;
    }
}

namespace {

const char* cmp_text(CmpOp op) {
    switch (op) {
    case CmpOp::Eq: return " = ";
    case CmpOp::Ne: return " != ";
    case CmpOp::Lt: return " < ";
    case CmpOp::Le: return " <= ";
    case CmpOp::Gt: return " > ";
    case CmpOp::Ge: return " >= ";
    }
    return " = ";
}

int bprec(const BExp& e) {
    switch (e.kind) {
    case BExp::Kind::Or: return 1;
    case BExp::Kind::And: return 2;
    case BExp::Kind::Not: return 3;
    default: return 4;
    }
}

void print_bexp(const BExp& e, std::ostream& os, int parent_prec, bool right_child) {
    int p = bprec(e);
    bool parens = p < parent_prec || (p == parent_prec && right_child && p < 3);
    if (parens) os << "(";
    switch (e.kind) {
    case BExp::Kind::True: os << "true"; break;
    case BExp::Kind::False: os << "false"; break;
    case BExp::Kind::Cmp:
        os << to_string(*e.lhs) << cmp_text(e.cmp) << to_string(*e.rhs);
        break;
    case BExp::Kind::And:
        print_bexp(*e.a, os, p, false);
        os << " && ";
        print_bexp(*e.b, os, p, true);
        break;
    case BExp::Kind::Or:
        print_bexp(*e.a, os, p, false);
        os << " || ";
        print_bexp(*e.b, os, p, true);
        break;
    case BExp::Kind::Not:
        os << "!";
        if (e.a->kind == BExp::Kind::True || e.a->kind == BExp::Kind::False) {
            os << to_string(*e.a);
        } else {
            os << "(" << to_string(*e.a) << ")";
        }
        break;
    }
    if (parens) os << ")";
}

} // namespace

std::string to_string(const BExp& e) {
    std::ostringstream os;
    print_bexp(e, os, 0, false);
    return os.str();
}

// --------------------------------------------------------------------------
// ProbExp
// --------------------------------------------------------------------------

ProbExp ProbExp::constant(Rational r) {
    ProbExp p;
    p.kind = Kind::Const;
    p.value = std::move(r);
    return p;
}

ProbExp ProbExp::parameter(std::string name) {
    ProbExp p;
    p.kind = Kind::Param;
    p.param = std::move(name);
    return p;
}

ProbExp ProbExp::quotient(std::shared_ptr<const Expectation> num,
                          std::shared_ptr<const Expectation> den) {
    ProbExp p;
    p.kind = Kind::Quotient;
    p.num = std::move(num);
    p.den = std::move(den);
    return p;
}

bool equal(const ProbExp& a, const ProbExp& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case ProbExp::Kind::Const: return a.value == b.value;
    case ProbExp::Kind::Param: return a.param == b.param;
    case ProbExp::Kind::Quotient:
        return a.num->equals(*b.num) && a.den->equals(*b.den);
    }
    return false;
}

std::string to_string(const ProbExp& p) {
    switch (p.kind) {
    case ProbExp::Kind::Const: return p.value.str();
    case ProbExp::Kind::Param: return p.param;
    case ProbExp::Kind::Quotient:
        return "(" + p.num->str() + ") / (" + p.den->str() + ")";
    }
    return "";
}

// --------------------------------------------------------------------------
// Stmt
// --------------------------------------------------------------------------

namespace {

StmtPtr mk(Stmt::Kind k) {
    auto s = std::make_shared<Stmt>();
    s->kind = k;
    return s;
}

} // namespace

StmtPtr sskip() { return mk(Stmt::Kind::Skip); }
StmtPtr sabort() { return mk(Stmt::Kind::Abort); }

StmtPtr sassign(std::string var, AExpPtr e) {
    auto s = std::make_shared<Stmt>();
    s->kind = Stmt::Kind::Assign;
    s->var = std::move(var);
    s->expr = std::move(e);
    return s;
}

StmtPtr sseq(StmtPtr a, StmtPtr b) {
    // sequencing is kept right-nested so that printing and reparsing
    // reproduce the tree shape
    if (a->kind == Stmt::Kind::Seq) return sseq(a->first, sseq(a->second, std::move(b)));
    auto s = std::make_shared<Stmt>();
    s->kind = Stmt::Kind::Seq;
    s->first = std::move(a);
    s->second = std::move(b);
    return s;
}

StmtPtr sseq(const std::vector<StmtPtr>& parts) {
    if (parts.empty()) return sskip();
    StmtPtr acc = parts.back();
    for (std::size_t i = parts.size() - 1; i-- > 0;) acc = sseq(parts[i], acc);
    return acc;
}

StmtPtr site(BExpPtr g, StmtPtr then_branch, StmtPtr else_branch) {
    auto s = std::make_shared<Stmt>();
    s->kind = Stmt::Kind::Ite;
    s->guard = std::move(g);
    s->first = std::move(then_branch);
    s->second = std::move(else_branch);
    return s;
}

StmtPtr spchoice(StmtPtr a, ProbExp p, StmtPtr b) {
    auto s = std::make_shared<Stmt>();
    s->kind = Stmt::Kind::PChoice;
    s->prob = std::move(p);
    s->first = std::move(a);
    s->second = std::move(b);
    return s;
}

StmtPtr sndchoice(StmtPtr a, StmtPtr b) {
    auto s = std::make_shared<Stmt>();
    s->kind = Stmt::Kind::NDChoice;
    s->first = std::move(a);
    s->second = std::move(b);
    return s;
}

StmtPtr swhile(BExpPtr g, StmtPtr body) {
    auto s = std::make_shared<Stmt>();
    s->kind = Stmt::Kind::While;
    s->guard = std::move(g);
    s->first = std::move(body);
    return s;
}

StmtPtr sobserve(BExpPtr g) {
    auto s = std::make_shared<Stmt>();
    s->kind = Stmt::Kind::Observe;
    s->guard = std::move(g);
    return s;
}

bool equal(const Stmt& a, const Stmt& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case Stmt::Kind::Skip:
    case Stmt::Kind::Abort: return true;
    case Stmt::Kind::Assign: return a.var == b.var && equal(*a.expr, *b.expr);
    case Stmt::Kind::Seq:
    case Stmt::Kind::NDChoice:
        return equal(*a.first, *b.first) && equal(*a.second, *b.second);
    case Stmt::Kind::Ite:
        return equal(*a.guard, *b.guard) && equal(*a.first, *b.first) &&
               equal(*a.second, *b.second);
    case Stmt::Kind::PChoice:
        return equal(a.prob, b.prob) && equal(*a.first, *b.first) &&
               equal(*a.second, *b.second);
    case Stmt::Kind::While:
        return equal(*a.guard, *b.guard) && equal(*a.first, *b.first);
    case Stmt::Kind::Observe: return equal(*a.guard, *b.guard);
    }
    return false;
}

bool contains_kind(const Stmt& s, Stmt::Kind k) {
    if (s.kind == k) return true;
    if (s.first && contains_kind(*s.first, k)) return true;
    if (s.second && contains_kind(*s.second, k)) return true;
    return false;
}

void collect_vars(const Stmt& s, std::set<std::string>& out) {
    switch (s.kind) {
    case Stmt::Kind::Skip:
    case Stmt::Kind::Abort: return;
    case Stmt::Kind::Assign:
        out.insert(s.var);
        collect_vars(*s.expr, out);
        return;
    case Stmt::Kind::Seq:
    case Stmt::Kind::NDChoice:
        collect_vars(*s.first, out);
        collect_vars(*s.second, out);
        return;
    case Stmt::Kind::Ite:
        collect_vars(*s.guard, out);
        collect_vars(*s.first, out);
        collect_vars(*s.second, out);
        return;
    case Stmt::Kind::PChoice:
        if (s.prob.kind == ProbExp::Kind::Quotient) {
            collect_vars(*s.prob.num, out);
            collect_vars(*s.prob.den, out);
        }
        collect_vars(*s.first, out);
        collect_vars(*s.second, out);
        return;
    case Stmt::Kind::While:
        collect_vars(*s.guard, out);
        collect_vars(*s.first, out);
        return;
    case Stmt::Kind::Observe: collect_vars(*s.guard, out); return;
    }
}

void collect_params(const Stmt& s, std::set<std::string>& out) {
    if (s.kind == Stmt::Kind::PChoice && s.prob.kind == ProbExp::Kind::Param)
        out.insert(s.prob.param);
    if (s.first) collect_params(*s.first, out);
    if (s.second) collect_params(*s.second, out);
}

// --------------------------------------------------------------------------
// Pretty-printing
// --------------------------------------------------------------------------

namespace {

bool inline_simple(const Stmt& s) {
    switch (s.kind) {
    case Stmt::Kind::Skip:
    case Stmt::Kind::Abort:
    case Stmt::Kind::Assign:
    case Stmt::Kind::Observe: return true;
    default: return false;
    }
}

void print_stmt(const Stmt& s, std::ostream& os, int indent);

void print_block(const Stmt& s, std::ostream& os, int indent) {
    if (inline_simple(s)) {
        os << "{ ";
        print_stmt(s, os, 0);
        os << " }";
        return;
    }
    std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    os << "{\n" << pad << "  ";
    print_stmt(s, os, indent + 1);
    os << "\n" << pad << "}";
}

void print_stmt(const Stmt& s, std::ostream& os, int indent) {
    std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    switch (s.kind) {
    case Stmt::Kind::Skip: os << "skip"; return;
    case Stmt::Kind::Abort: os << "abort"; return;
    case Stmt::Kind::Assign:
        os << s.var << " := " << to_string(*s.expr);
        return;
    case Stmt::Kind::Seq:
        print_stmt(*s.first, os, indent);
        os << ";\n" << pad;
        print_stmt(*s.second, os, indent);
        return;
    case Stmt::Kind::Ite:
        os << "if (" << to_string(*s.guard) << ") ";
        print_block(*s.first, os, indent);
        os << " else ";
        print_block(*s.second, os, indent);
        return;
    case Stmt::Kind::PChoice:
        print_block(*s.first, os, indent);
        os << " [" << to_string(s.prob) << "] ";
        print_block(*s.second, os, indent);
        return;
    case Stmt::Kind::NDChoice:
        print_block(*s.first, os, indent);
        os << " [] ";
        print_block(*s.second, os, indent);
        return;
    case Stmt::Kind::While:
        os << "while (" << to_string(*s.guard) << ") ";
        print_block(*s.first, os, indent);
        return;
    case Stmt::Kind::Observe:
        os << "observe (" << to_string(*s.guard) << ")";
        return;
    }
}

void ordered_vars(const AExp& e, std::vector<std::string>& out, std::set<std::string>& seen) {
    switch (e.kind) {
    case AExp::Kind::Const: return;
    case AExp::Kind::Var:
        if (seen.insert(e.var).second) out.push_back(e.var);
        return;
    case AExp::Kind::Bin:
        ordered_vars(*e.lhs, out, seen);
        ordered_vars(*e.rhs, out, seen);
        return;
    }
}

void ordered_vars(const BExp& e, std::vector<std::string>& out, std::set<std::string>& seen) {
    switch (e.kind) {
    case BExp::Kind::True:
    case BExp::Kind::False: return;
    case BExp::Kind::Cmp:
        ordered_vars(*e.lhs, out, seen);
        ordered_vars(*e.rhs, out, seen);
        return;
    case BExp::Kind::And:
    case BExp::Kind::Or:
        ordered_vars(*e.a, out, seen);
        ordered_vars(*e.b, out, seen);
        return;
    case BExp::Kind::Not: ordered_vars(*e.a, out, seen); return;
    }
}

void ordered_vars(const Stmt& s, std::vector<std::string>& out, std::set<std::string>& seen) {
    switch (s.kind) {
    case Stmt::Kind::Skip:
    case Stmt::Kind::Abort: return;
    case Stmt::Kind::Assign:
        if (seen.insert(s.var).second) out.push_back(s.var);
        ordered_vars(*s.expr, out, seen);
        return;
    case Stmt::Kind::Seq:
    case Stmt::Kind::NDChoice:
        ordered_vars(*s.first, out, seen);
        ordered_vars(*s.second, out, seen);
        return;
    case Stmt::Kind::Ite:
        ordered_vars(*s.guard, out, seen);
        ordered_vars(*s.first, out, seen);
        ordered_vars(*s.second, out, seen);
        return;
    case Stmt::Kind::PChoice: {
        if (s.prob.kind == ProbExp::Kind::Quotient) {
            std::set<std::string> qv;
            collect_vars(*s.prob.num, qv);
            collect_vars(*s.prob.den, qv);
            for (const auto& v : qv)
                if (seen.insert(v).second) out.push_back(v);
        }
        ordered_vars(*s.first, out, seen);
        ordered_vars(*s.second, out, seen);
        return;
    }
    case Stmt::Kind::While:
        ordered_vars(*s.guard, out, seen);
        ordered_vars(*s.first, out, seen);
        return;
    case Stmt::Kind::Observe: ordered_vars(*s.guard, out, seen); return;
    }
}

} // namespace

std::string pretty_print(const Stmt& s) {
    std::ostringstream os;
    print_stmt(s, os, 0);
    return os.str();
}

std::string pretty_print(const Program& p) {
    return pretty_print(*p.body);
}

// --------------------------------------------------------------------------
// Program
// --------------------------------------------------------------------------

Program make_program(StmtPtr body) {
    Program p;
    p.body = std::move(body);
    std::set<std::string> seen;
    ordered_vars(*p.body, p.declared_vars, seen);
    collect_params(*p.body, p.params);
    return p;
}

namespace {

StmtPtr instantiate_stmt(const Stmt& s, const std::map<std::string, Rational>& b) {
    switch (s.kind) {
    case Stmt::Kind::Skip:
    case Stmt::Kind::Abort:
    case Stmt::Kind::Assign:
    case Stmt::Kind::Observe:
        return std::make_shared<Stmt>(s);
    case Stmt::Kind::Seq:
        return sseq(instantiate_stmt(*s.first, b), instantiate_stmt(*s.second, b));
    case Stmt::Kind::Ite:
        return site(s.guard, instantiate_stmt(*s.first, b), instantiate_stmt(*s.second, b));
    case Stmt::Kind::NDChoice:
        return sndchoice(instantiate_stmt(*s.first, b), instantiate_stmt(*s.second, b));
    case Stmt::Kind::While:
        return swhile(s.guard, instantiate_stmt(*s.first, b));
    case Stmt::Kind::PChoice: {
        ProbExp p = s.prob;
        if (p.kind == ProbExp::Kind::Param) {
            auto it = b.find(p.param);
            if (it == b.end()) throw UninstantiatedParameter(p.param);
            if (it->second < Rational(0) || it->second > Rational(1))
                throw ValidationError("parameter '" + p.param + "' = " +
                                      it->second.str() + " lies outside [0,1]");
            p = ProbExp::constant(it->second);
        }
        return spchoice(instantiate_stmt(*s.first, b), std::move(p),
                        instantiate_stmt(*s.second, b));
    }
    }
    throw EvaluationError("corrupt statement");
}

} // namespace

Program instantiate_params(const Program& p, const std::map<std::string, Rational>& bindings) {
    for (const auto& [name, value] : bindings) {
        (void)value;
        if (p.params.count(name) == 0)
            throw ParameterError("'" + name + "' is not a parameter of the program");
    }
    for (const auto& name : p.params)
        if (bindings.count(name) == 0) throw UninstantiatedParameter(name);
    Program out;
    out.body = instantiate_stmt(*p.body, bindings);
    out.declared_vars = p.declared_vars;
    out.params.clear();
    return out;
}

} // namespace cpgcl
