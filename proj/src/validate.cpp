// SPDX-License-Identifier: Apache-2.0
#include "cpgcl/validate.hpp"

#include "cpgcl/expectation.hpp"

#include <set>

namespace cpgcl {

namespace {

void walk(const Stmt& s, const Program& p, bool allow_reserved,
          std::vector<Violation>& out) {
    auto declared = [&](const std::string& v) {
        for (const auto& d : p.declared_vars)
            if (d == v) return true;
        return false;
    };
    auto check_vars = [&](const std::set<std::string>& vars) {
        for (const auto& v : vars) {
            if (!declared(v))
                out.push_back({Violation::Kind::Scope, v,
                               "variable '" + v + "' is not declared in the program"});
            if (!allow_reserved && v.rfind("__", 0) == 0)
                out.push_back({Violation::Kind::Reserved, v,
                               "name '" + v + "' uses the reserved '__' prefix"});
        }
    };

    switch (s.kind) {
    case Stmt::Kind::Skip:
    case Stmt::Kind::Abort: return;
    case Stmt::Kind::Assign: {
        std::set<std::string> vars{s.var};
        collect_vars(*s.expr, vars);
        check_vars(vars);
        return;
    }
    case Stmt::Kind::Seq:
    case Stmt::Kind::NDChoice:
        walk(*s.first, p, allow_reserved, out);
        walk(*s.second, p, allow_reserved, out);
        return;
    case Stmt::Kind::Ite:
    case Stmt::Kind::While:
    case Stmt::Kind::Observe: {
        std::set<std::string> vars;
        collect_vars(*s.guard, vars);
        check_vars(vars);
        if (s.first) walk(*s.first, p, allow_reserved, out);
        if (s.second) walk(*s.second, p, allow_reserved, out);
        return;
    }
    case Stmt::Kind::PChoice: {
        switch (s.prob.kind) {
        case ProbExp::Kind::Const:
            if (s.prob.value < Rational(0) || s.prob.value > Rational(1))
                out.push_back({Violation::Kind::Range, s.prob.value.str(),
                               "probability " + s.prob.value.str() + " lies outside [0,1]"});
            break;
        case ProbExp::Kind::Param:
            if (p.params.count(s.prob.param) == 0)
                out.push_back({Violation::Kind::ParamScope, s.prob.param,
                               "parameter '" + s.prob.param + "' is not declared"});
            break;
        case ProbExp::Kind::Quotient: {
            std::set<std::string> vars;
            collect_vars(*s.prob.num, vars);
            collect_vars(*s.prob.den, vars);
            check_vars(vars);
            break;
        }
        }
        walk(*s.first, p, allow_reserved, out);
        walk(*s.second, p, allow_reserved, out);
        return;
    }
    }
}

} // namespace

std::vector<Violation> validate(const Program& p, bool allow_reserved) {
    std::vector<Violation> out;
    for (const auto& name : p.params) {
        for (const auto& v : p.declared_vars)
            if (v == name)
                out.push_back({Violation::Kind::ParamVarClash, name,
                               "'" + name + "' is used both as a variable and a parameter"});
        if (!allow_reserved && name.rfind("__", 0) == 0)
            out.push_back({Violation::Kind::Reserved, name,
                           "parameter '" + name + "' uses the reserved '__' prefix"});
    }
    walk(*p.body, p, allow_reserved, out);
    return out;
}

std::string describe(const std::vector<Violation>& vs) {
    std::string out;
    for (const auto& v : vs) {
        if (!out.empty()) out += "\n";
        out += v.message;
    }
    return out;
}

} // namespace cpgcl
