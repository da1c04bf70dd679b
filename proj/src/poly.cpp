// SPDX-License-Identifier: Apache-2.0
#include "cpgcl/poly.hpp"

#include "cpgcl/errors.hpp"

#include <sstream>
#include <utility>
#include <vector>

namespace cpgcl {

Poly Poly::constant(Rational c) {
    Poly p;
    if (!c.is_zero()) p.coeffs_[Monomial{}] = std::move(c);
    return p;
}

Poly Poly::variable(const std::string& name) {
    Poly p;
    p.coeffs_[Monomial{{name, 1}}] = Rational(1);
    return p;
}

Poly Poly::from_aexp(const AExp& e) {
    switch (e.kind) {
    case AExp::Kind::Const: return constant(Rational(e.value));
    case AExp::Kind::Var: return variable(e.var);
    case AExp::Kind::Bin: {
        Poly l = from_aexp(*e.lhs), r = from_aexp(*e.rhs);
        switch (e.op) {
        case AOp::Add: return l + r;
        case AOp::Sub: return l - r;
        case AOp::Mul: return l * r;
        }
    }
    }
    throw EvaluationError("corrupt arithmetic expression");
}

void Poly::prune() {
    for (auto it = coeffs_.begin(); it != coeffs_.end();) {
        if (it->second.is_zero())
            it = coeffs_.erase(it);
        else
            ++it;
    }
}

Poly Poly::operator+(const Poly& o) const {
    Poly r = *this;
    for (const auto& [m, c] : o.coeffs_) {
        auto it = r.coeffs_.find(m);
        if (it == r.coeffs_.end())
            r.coeffs_[m] = c;
        else
            it->second += c;
    }
    r.prune();
    return r;
}

Poly Poly::operator-(const Poly& o) const {
    return *this + o.negated();
}

Poly Poly::operator*(const Poly& o) const {
    Poly r;
    for (const auto& [m1, c1] : coeffs_) {
        for (const auto& [m2, c2] : o.coeffs_) {
            Monomial m = m1;
            for (const auto& [v, e] : m2) m[v] += e;
            auto it = r.coeffs_.find(m);
            if (it == r.coeffs_.end())
                r.coeffs_[m] = c1 * c2;
            else
                it->second += c1 * c2;
        }
    }
    r.prune();
    return r;
}

Poly Poly::scaled(const Rational& c) const {
    Poly r;
    if (c.is_zero()) return r;
    for (const auto& [m, k] : coeffs_) r.coeffs_[m] = k * c;
    return r;
}

Poly Poly::pow(unsigned e) const {
    Poly r = constant(Rational(1));
    Poly base = *this;
    while (e > 0) {
        if (e & 1u) r = r * base;
        base = base * base;
        e >>= 1u;
    }
    return r;
}

Poly Poly::substituted(const std::string& var, const Poly& replacement) const {
    Poly r;
    for (const auto& [m, c] : coeffs_) {
        Monomial rest = m;
        unsigned e = 0;
        auto it = rest.find(var);
        if (it != rest.end()) {
            e = it->second;
            rest.erase(it);
        }
        Poly part;
        part.coeffs_[rest] = c;
        if (e > 0) part = part * replacement.pow(e);
        r = r + part;
    }
    return r;
}

Rational Poly::eval(const State& sigma) const {
    Rational total(0);
    for (const auto& [m, c] : coeffs_) {
        Rational v = c;
        for (const auto& [var, e] : m) {
            Rational base(sigma.get(var));
            v *= base.pow(e);
        }
        total += v;
    }
    return total;
}

bool Poly::is_constant() const {
    if (coeffs_.empty()) return true;
    return coeffs_.size() == 1 && coeffs_.begin()->first.empty();
}

Rational Poly::constant_value() const {
    if (coeffs_.empty()) return Rational(0);
    return coeffs_.begin()->second;
}

void Poly::collect_vars(std::set<std::string>& out) const {
    for (const auto& [m, c] : coeffs_)
        for (const auto& [v, e] : m) out.insert(v);
}

Rational Poly::normalize_integer() {
    if (coeffs_.empty()) return Rational(1);
    BigInt den_lcm = 1;
    for (const auto& [m, c] : coeffs_) {
        BigInt d = c.den();
        BigInt g;
        mpz_gcd(g.get_mpz_t(), den_lcm.get_mpz_t(), d.get_mpz_t());
        den_lcm = den_lcm / g * d;
    }
    BigInt num_gcd = 0;
    for (const auto& [m, c] : coeffs_) {
        BigInt n = c.num() * (den_lcm / c.den());
        mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), n.get_mpz_t());
    }
    if (num_gcd == 0) num_gcd = 1;
    Rational factor(den_lcm, num_gcd);
    for (auto& [m, c] : coeffs_) c *= factor;
    return factor;
}

Rational Poly::leading_coefficient() const {
    if (coeffs_.empty()) return Rational(0);
    return coeffs_.begin()->second;
}

bool Poly::operator<(const Poly& o) const {
    auto a = coeffs_.begin(), b = o.coeffs_.begin();
    for (; a != coeffs_.end() && b != o.coeffs_.end(); ++a, ++b) {
        if (a->first != b->first) return a->first < b->first;
        if (a->second != b->second) return a->second < b->second;
    }
    return a == coeffs_.end() && b != o.coeffs_.end();
}

std::string Poly::str() const {
    if (coeffs_.empty()) return "0";
    // non-constant monomials first, the constant term last
    std::vector<std::pair<const Monomial*, const Rational*>> order;
    order.reserve(coeffs_.size());
    for (const auto& [m, c] : coeffs_)
        if (!m.empty()) order.emplace_back(&m, &c);
    for (const auto& [m, c] : coeffs_)
        if (m.empty()) order.emplace_back(&m, &c);
    std::ostringstream os;
    bool first = true;
    for (const auto& [mp, cp] : order) {
        const Monomial& m = *mp;
        const Rational& c = *cp;
        Rational coeff = c;
        if (first) {
            if (coeff < Rational(0)) {
                os << "-";
                coeff = -coeff;
            }
        } else {
            os << (coeff < Rational(0) ? " - " : " + ");
            if (coeff < Rational(0)) coeff = -coeff;
        }
        first = false;
        bool coeff_one = coeff == Rational(1);
        if (!coeff_one || m.empty()) os << coeff.str();
        bool need_star = !coeff_one && !m.empty();
        for (const auto& [v, e] : m) {
            for (unsigned i = 0; i < e; ++i) {
                if (need_star) os << "*";
                need_star = true;
                os << v;
            }
        }
    }
    return os.str();
}

} // namespace cpgcl
