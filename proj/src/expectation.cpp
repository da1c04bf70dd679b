// SPDX-License-Identifier: Apache-2.0
#include "cpgcl/expectation.hpp"

#include "cpgcl/errors.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace cpgcl {

Expectation Expectation::constant(Rational c) {
    Expectation e;
    if (!c.is_zero()) e.terms_.push_back({gtrue(), Poly::constant(std::move(c))});
    return e;
}

Expectation Expectation::infinity() {
    Expectation e;
    e.kind_ = Kind::Infinity;
    return e;
}

Expectation Expectation::polynomial(Poly p) {
    Expectation e;
    if (!p.is_zero()) e.terms_.push_back({gtrue(), std::move(p)});
    return e;
}

Expectation Expectation::indicator(GuardPtr g) {
    return term(std::move(g), Poly::constant(Rational(1)));
}

Expectation Expectation::term(GuardPtr g, Poly w) {
    Expectation e;
    if (g->kind != Guard::Kind::False && !w.is_zero())
        e.terms_.push_back({std::move(g), std::move(w)});
    return e;
}

Expectation Expectation::add(const Expectation& a, const Expectation& b) {
    if (a.kind_ == Kind::Infinity || b.kind_ == Kind::Infinity) return infinity();
    if (a.kind_ == Kind::Min || b.kind_ == Kind::Min) {
        // addition distributes over pointwise minima
        std::vector<Expectation> lhs =
            a.kind_ == Kind::Min ? a.min_args_ : std::vector<Expectation>{a};
        std::vector<Expectation> rhs =
            b.kind_ == Kind::Min ? b.min_args_ : std::vector<Expectation>{b};
        Expectation r;
        r.kind_ = Kind::Min;
        for (const auto& x : lhs)
            for (const auto& y : rhs) r.min_args_.push_back(add(x, y));
        return r;
    }
    Expectation r = a;
    r.terms_.insert(r.terms_.end(), b.terms_.begin(), b.terms_.end());
    return r;
}

Expectation Expectation::scale(const Rational& c, const Expectation& e) {
    if (c.is_zero()) return zero();
    if (c < Rational(0))
        throw EvaluationError("negative scaling factor " + c.str());
    switch (e.kind_) {
    case Kind::Infinity: return infinity();
    case Kind::Min: {
        Expectation r;
        r.kind_ = Kind::Min;
        for (const auto& x : e.min_args_) r.min_args_.push_back(scale(c, x));
        return r;
    }
    case Kind::Terms: {
        Expectation r;
        for (const auto& t : e.terms_) r.terms_.push_back({t.guard, t.weight.scaled(c)});
        return r;
    }
    }
    throw EvaluationError("corrupt expectation");
}

Expectation Expectation::guard_mul(const GuardPtr& g, const Expectation& e) {
    if (g->kind == Guard::Kind::False) return zero();
    if (g->kind == Guard::Kind::True) return e;
    switch (e.kind_) {
    case Kind::Infinity:
        // [G]*inf is 0 on !G states, which the total infinity cannot express
        throw EvaluationError("cannot guard the infinite expectation");
    case Kind::Min: {
        // valid for nonnegative expectations: [G]*min(f,g) = min([G]f, [G]g)
        Expectation r;
        r.kind_ = Kind::Min;
        for (const auto& x : e.min_args_) r.min_args_.push_back(guard_mul(g, x));
        return r;
    }
    case Kind::Terms: {
        Expectation r;
        for (const auto& t : e.terms_) {
            GuardPtr conj = gand({g, t.guard});
            if (conj->kind != Guard::Kind::False) r.terms_.push_back({conj, t.weight});
        }
        return r;
    }
    }
    throw EvaluationError("corrupt expectation");
}

Expectation Expectation::min_of(const Expectation& a, const Expectation& b) {
    Expectation r;
    r.kind_ = Kind::Min;
    if (a.kind_ == Kind::Min)
        r.min_args_ = a.min_args_;
    else
        r.min_args_.push_back(a);
    if (b.kind_ == Kind::Min)
        r.min_args_.insert(r.min_args_.end(), b.min_args_.begin(), b.min_args_.end());
    else
        r.min_args_.push_back(b);
    return r;
}

Expectation Expectation::substituted(const std::string& var, const AExp& replacement) const {
    Poly rp = Poly::from_aexp(replacement);
    switch (kind_) {
    case Kind::Infinity: return infinity();
    case Kind::Min: {
        Expectation r;
        r.kind_ = Kind::Min;
        for (const auto& x : min_args_) r.min_args_.push_back(x.substituted(var, replacement));
        return r;
    }
    case Kind::Terms: {
        Expectation r;
        for (const auto& t : terms_) {
            GuardPtr g = cpgcl::substituted(*t.guard, var, rp);
            if (g->kind == Guard::Kind::False) continue;
            r.terms_.push_back({g, t.weight.substituted(var, rp)});
        }
        return r;
    }
    }
    throw EvaluationError("corrupt expectation");
}

namespace {

int compare_terms(const Expectation::Term& a, const Expectation::Term& b) {
    int c = compare(*a.guard, *b.guard);
    if (c != 0) return c;
    if (a.weight == b.weight) return 0;
    return a.weight < b.weight ? -1 : 1;
}

} // namespace

Expectation Expectation::simplified() const {
    switch (kind_) {
    case Kind::Infinity: return infinity();
    case Kind::Min: {
        std::vector<Expectation> args;
        bool saw_infinity = false;
        for (const auto& x : min_args_) {
            Expectation s = x.simplified();
            if (s.kind_ == Kind::Infinity) {
                saw_infinity = true;
                continue; // dominated unless everything is infinite
            }
            if (s.kind_ == Kind::Min)
                args.insert(args.end(), s.min_args_.begin(), s.min_args_.end());
            else
                args.push_back(std::move(s));
        }
        if (args.empty()) return saw_infinity ? infinity() : zero();
        std::sort(args.begin(), args.end(),
                  [](const Expectation& a, const Expectation& b) {
                      return a.compare_to(b) < 0;
                  });
        args.erase(std::unique(args.begin(), args.end(),
                               [](const Expectation& a, const Expectation& b) {
                                   return a.compare_to(b) == 0;
                               }),
                   args.end());
        // min of syntactic constants folds
        bool all_const = true;
        for (const auto& a : args)
            if (!a.constant_value()) { all_const = false; break; }
        if (all_const) {
            Rational m = *args[0].constant_value();
            for (const auto& a : args) m = std::min(m, *a.constant_value());
            return constant(m);
        }
        if (args.size() == 1) return args[0];
        Expectation r;
        r.kind_ = Kind::Min;
        r.min_args_ = std::move(args);
        return r;
    }
    case Kind::Terms: {
        // merge equal guards
        std::map<GuardPtr, Poly, bool (*)(const GuardPtr&, const GuardPtr&)> merged(
            [](const GuardPtr& a, const GuardPtr& b) { return compare(*a, *b) < 0; });
        for (const auto& t : terms_) {
            if (t.guard->kind == Guard::Kind::False) continue;
            auto it = merged.find(t.guard);
            if (it == merged.end())
                merged.emplace(t.guard, t.weight);
            else
                it->second = it->second + t.weight;
        }
        for (auto it = merged.begin(); it != merged.end();)
            it = it->second.is_zero() ? merged.erase(it) : std::next(it);
        // complementary guards with equal weight join into the true guard:
        // [G]*w + [!G]*w covers every state with w
        bool changed = true;
        while (changed) {
            changed = false;
            for (auto it = merged.begin(); it != merged.end(); ++it) {
                if (it->first->kind == Guard::Kind::True) continue;
                GuardPtr neg = gnegate(it->first);
                auto jt = merged.find(neg);
                if (jt == merged.end() || jt == it || !(jt->second == it->second)) continue;
                Poly w = it->second;
                merged.erase(jt);
                merged.erase(it);
                auto kt = merged.find(gtrue());
                if (kt == merged.end())
                    merged.emplace(gtrue(), w);
                else {
                    kt->second = kt->second + w;
                    if (kt->second.is_zero()) merged.erase(kt);
                }
                changed = true;
                break;
            }
        }
        Expectation r;
        for (auto& [g, w] : merged) r.terms_.push_back({g, w});
        std::sort(r.terms_.begin(), r.terms_.end(),
                  [](const Term& a, const Term& b) { return compare_terms(a, b) < 0; });
        return r;
    }
    }
    throw EvaluationError("corrupt expectation");
}

std::optional<Rational> Expectation::eval(const State& sigma) const {
    switch (kind_) {
    case Kind::Infinity: return std::nullopt;
    case Kind::Min: {
        std::optional<Rational> best;
        bool all_infinite = true;
        for (const auto& x : min_args_) {
            auto v = x.eval(sigma);
            if (!v) continue;
            all_infinite = false;
            if (!best || *v < *best) best = v;
        }
        if (all_infinite) return std::nullopt;
        return best;
    }
    case Kind::Terms: {
        Rational total(0);
        for (const auto& t : terms_) {
            if (!cpgcl::eval(*t.guard, sigma)) continue;
            Rational v = t.weight.eval(sigma);
            if (v < Rational(0))
                throw NegativeExpectation("expectation term [" + to_string(*t.guard) +
                                          "]*(" + t.weight.str() + ") evaluates to " +
                                          v.str() + " at state {" + sigma.str() + "}");
            total += v;
        }
        return total;
    }
    }
    throw EvaluationError("corrupt expectation");
}

Rational Expectation::eval_finite(const State& sigma) const {
    auto v = eval(sigma);
    if (!v) throw EvaluationError("expectation is infinite at state {" + sigma.str() + "}");
    return *v;
}

int Expectation::compare_to(const Expectation& o) const {
    if (kind_ != o.kind_) return kind_ < o.kind_ ? -1 : 1;
    switch (kind_) {
    case Kind::Infinity: return 0;
    case Kind::Min: {
        if (min_args_.size() != o.min_args_.size())
            return min_args_.size() < o.min_args_.size() ? -1 : 1;
        for (std::size_t i = 0; i < min_args_.size(); ++i) {
            int c = min_args_[i].compare_to(o.min_args_[i]);
            if (c != 0) return c;
        }
        return 0;
    }
    case Kind::Terms: {
        if (terms_.size() != o.terms_.size())
            return terms_.size() < o.terms_.size() ? -1 : 1;
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            int c = compare_terms(terms_[i], o.terms_[i]);
            if (c != 0) return c;
        }
        return 0;
    }
    }
    return 0;
}

std::optional<Rational> Expectation::constant_value() const {
    if (kind_ != Kind::Terms) return std::nullopt;
    if (terms_.empty()) return Rational(0);
    if (terms_.size() == 1 && terms_[0].guard->kind == Guard::Kind::True &&
        terms_[0].weight.is_constant())
        return terms_[0].weight.constant_value();
    return std::nullopt;
}

void Expectation::collect_vars(std::set<std::string>& out) const {
    switch (kind_) {
    case Kind::Infinity: return;
    case Kind::Min:
        for (const auto& x : min_args_) x.collect_vars(out);
        return;
    case Kind::Terms:
        for (const auto& t : terms_) {
            cpgcl::collect_vars(*t.guard, out);
            t.weight.collect_vars(out);
        }
        return;
    }
}

void collect_vars(const Expectation& e, std::set<std::string>& out) {
    e.collect_vars(out);
}

std::string Expectation::str() const {
    switch (kind_) {
    case Kind::Infinity: return "inf";
    case Kind::Min: {
        std::ostringstream os;
        os << "min(";
        for (std::size_t i = 0; i < min_args_.size(); ++i) {
            if (i) os << ", ";
            os << min_args_[i].str();
        }
        os << ")";
        return os.str();
    }
    case Kind::Terms: {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            if (i) os << " + ";
            const Term& t = terms_[i];
            if (t.guard->kind == Guard::Kind::True) {
                os << "(" << t.weight.str() << ")";
            } else {
                os << "[" << to_string(*t.guard) << "]";
                if (!(t.weight.is_constant() && t.weight.constant_value() == Rational(1)))
                    os << "*(" << t.weight.str() << ")";
            }
        }
        return os.str();
    }
    }
    throw EvaluationError("corrupt expectation");
}

} // namespace cpgcl
