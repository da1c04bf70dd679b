// SPDX-License-Identifier: Apache-2.0
#include "cpgcl/guard.hpp"

#include "cpgcl/errors.hpp"

#include <algorithm>
#include <sstream>

namespace cpgcl {

namespace {

GuardPtr mk(Guard::Kind k) {
    auto g = std::make_shared<Guard>();
    g->kind = k;
    return g;
}

const GuardPtr kTrue = mk(Guard::Kind::True);
const GuardPtr kFalse = mk(Guard::Kind::False);

bool rel_holds(Rel rel, const Rational& v) {
    switch (rel) {
    case Rel::Eq: return v == Rational(0);
    case Rel::Ne: return v != Rational(0);
    case Rel::Lt: return v < Rational(0);
    case Rel::Le: return v <= Rational(0);
    }
    return false;
}

} // namespace

GuardPtr gtrue() { return kTrue; }
GuardPtr gfalse() { return kFalse; }

GuardPtr gatom(Rel rel, Poly p) {
    if (p.is_constant())
        return rel_holds(rel, p.constant_value()) ? kTrue : kFalse;
    p.normalize_integer();
    if (rel == Rel::Eq || rel == Rel::Ne) {
        // p = 0 and -p = 0 are the same atom; pin the sign
        if (p.leading_coefficient() < Rational(0)) p = p.negated();
    }
    auto g = std::make_shared<Guard>();
    g->kind = Guard::Kind::Atom;
    g->rel = rel;
    g->poly = std::move(p);
    return g;
}

int compare(const Guard& a, const Guard& b) {
    if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
    switch (a.kind) {
    case Guard::Kind::True:
    case Guard::Kind::False: return 0;
    case Guard::Kind::Atom:
        if (a.rel != b.rel) return a.rel < b.rel ? -1 : 1;
        if (a.poly == b.poly) return 0;
        return a.poly < b.poly ? -1 : 1;
    case Guard::Kind::And:
    case Guard::Kind::Or: {
        if (a.kids.size() != b.kids.size())
            return a.kids.size() < b.kids.size() ? -1 : 1;
        for (std::size_t i = 0; i < a.kids.size(); ++i) {
            int c = compare(*a.kids[i], *b.kids[i]);
            if (c != 0) return c;
        }
        return 0;
    }
    }
    return 0;
}

namespace {

/// Shared machinery of gand/gor: flatten, fold constants, sort, dedup,
/// and collapse complementary pairs.
GuardPtr gjunction(std::vector<GuardPtr> kids, Guard::Kind kind) {
    const bool is_and = kind == Guard::Kind::And;
    const GuardPtr neutral = is_and ? kTrue : kFalse;
    const GuardPtr absorbing = is_and ? kFalse : kTrue;

    std::vector<GuardPtr> flat;
    for (auto& k : kids) {
        if (k->kind == kind) {
            flat.insert(flat.end(), k->kids.begin(), k->kids.end());
        } else if (k->kind == neutral->kind) {
            continue;
        } else if (k->kind == absorbing->kind) {
            return absorbing;
        } else {
            flat.push_back(std::move(k));
        }
    }
    std::sort(flat.begin(), flat.end(),
              [](const GuardPtr& x, const GuardPtr& y) { return compare(*x, *y) < 0; });
    flat.erase(std::unique(flat.begin(), flat.end(),
                           [](const GuardPtr& x, const GuardPtr& y) {
                               return compare(*x, *y) == 0;
                           }),
               flat.end());
    // complementary pair: G && !G = false, G || !G = true
    for (const auto& k : flat) {
        GuardPtr n = gnegate(k);
        for (const auto& other : flat)
            if (compare(*n, *other) == 0) return absorbing;
    }
    if (flat.empty()) return neutral;
    if (flat.size() == 1) return flat[0];
    auto g = std::make_shared<Guard>();
    g->kind = kind;
    g->kids = std::move(flat);
    return g;
}

} // namespace

GuardPtr gand(std::vector<GuardPtr> kids) {
    return gjunction(std::move(kids), Guard::Kind::And);
}

GuardPtr gor(std::vector<GuardPtr> kids) {
    return gjunction(std::move(kids), Guard::Kind::Or);
}

GuardPtr gnegate(const GuardPtr& g) {
    switch (g->kind) {
    case Guard::Kind::True: return kFalse;
    case Guard::Kind::False: return kTrue;
    case Guard::Kind::Atom:
        switch (g->rel) {
        case Rel::Eq: return gatom(Rel::Ne, g->poly);
        case Rel::Ne: return gatom(Rel::Eq, g->poly);
        case Rel::Lt: return gatom(Rel::Le, g->poly.negated()); // !(p<0) is -p<=0
        case Rel::Le: return gatom(Rel::Lt, g->poly.negated()); // !(p<=0) is -p<0
        }
        break;
    case Guard::Kind::And: {
        std::vector<GuardPtr> kids;
        kids.reserve(g->kids.size());
        for (const auto& k : g->kids) kids.push_back(gnegate(k));
        return gor(std::move(kids));
    }
    case Guard::Kind::Or: {
        std::vector<GuardPtr> kids;
        kids.reserve(g->kids.size());
        for (const auto& k : g->kids) kids.push_back(gnegate(k));
        return gand(std::move(kids));
    }
    }
    throw EvaluationError("corrupt guard");
}

GuardPtr from_bexp(const BExp& b) {
    switch (b.kind) {
    case BExp::Kind::True: return kTrue;
    case BExp::Kind::False: return kFalse;
    case BExp::Kind::Cmp: {
        Poly l = Poly::from_aexp(*b.lhs), r = Poly::from_aexp(*b.rhs);
        switch (b.cmp) {
        case CmpOp::Eq: return gatom(Rel::Eq, l - r);
        case CmpOp::Ne: return gatom(Rel::Ne, l - r);
        case CmpOp::Lt: return gatom(Rel::Lt, l - r);
        case CmpOp::Le: return gatom(Rel::Le, l - r);
        case CmpOp::Gt: return gatom(Rel::Lt, r - l);
        case CmpOp::Ge: return gatom(Rel::Le, r - l);
        }
        break;
    }
    case BExp::Kind::And: return gand({from_bexp(*b.a), from_bexp(*b.b)});
    case BExp::Kind::Or: return gor({from_bexp(*b.a), from_bexp(*b.b)});
    case BExp::Kind::Not: return gnegate(from_bexp(*b.a));
    }
    throw EvaluationError("corrupt boolean expression");
}

bool eval(const Guard& g, const State& sigma) {
    switch (g.kind) {
    case Guard::Kind::True: return true;
    case Guard::Kind::False: return false;
    case Guard::Kind::Atom: return rel_holds(g.rel, g.poly.eval(sigma));
    case Guard::Kind::And:
        for (const auto& k : g.kids)
            if (!eval(*k, sigma)) return false;
        return true;
    case Guard::Kind::Or:
        for (const auto& k : g.kids)
            if (eval(*k, sigma)) return true;
        return false;
    }
    throw EvaluationError("corrupt guard");
}

GuardPtr substituted(const Guard& g, const std::string& var, const Poly& replacement) {
    switch (g.kind) {
    case Guard::Kind::True: return kTrue;
    case Guard::Kind::False: return kFalse;
    case Guard::Kind::Atom: return gatom(g.rel, g.poly.substituted(var, replacement));
    case Guard::Kind::And:
    case Guard::Kind::Or: {
        std::vector<GuardPtr> kids;
        kids.reserve(g.kids.size());
        for (const auto& k : g.kids) kids.push_back(substituted(*k, var, replacement));
        return g.kind == Guard::Kind::And ? gand(std::move(kids)) : gor(std::move(kids));
    }
    }
    throw EvaluationError("corrupt guard");
}

void collect_vars(const Guard& g, std::set<std::string>& out) {
    switch (g.kind) {
    case Guard::Kind::True:
    case Guard::Kind::False: return;
    case Guard::Kind::Atom: g.poly.collect_vars(out); return;
    case Guard::Kind::And:
    case Guard::Kind::Or:
        for (const auto& k : g.kids) collect_vars(*k, out);
        return;
    }
}

std::string to_string(const Guard& g) {
    switch (g.kind) {
    case Guard::Kind::True: return "true";
    case Guard::Kind::False: return "false";
    case Guard::Kind::Atom: {
        const char* rel = g.rel == Rel::Eq ? " = 0"
                        : g.rel == Rel::Ne ? " != 0"
                        : g.rel == Rel::Lt ? " < 0"
                                           : " <= 0";
        return g.poly.str() + rel;
    }
    case Guard::Kind::And:
    case Guard::Kind::Or: {
        std::ostringstream os;
        const char* sep = g.kind == Guard::Kind::And ? " && " : " || ";
        for (std::size_t i = 0; i < g.kids.size(); ++i) {
            if (i) os << sep;
            os << "(" << to_string(*g.kids[i]) << ")";
        }
        return os.str();
    }
    }
    throw EvaluationError("corrupt guard");
}

} // namespace cpgcl
