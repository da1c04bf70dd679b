// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cpgcl/ast.hpp"
#include "cpgcl/rational.hpp"
#include "cpgcl/state.hpp"

#include <map>
#include <set>
#include <string>

namespace cpgcl {

/// Monomial: variable name -> exponent (> 0).
using Monomial = std::map<std::string, unsigned>;

/// Multivariate polynomial with rational coefficients in canonical form
/// (no zero coefficients, monomials ordered by the map). Used both for
/// expectation weights and for comparison atoms of canonical guards.
class Poly {
public:
    Poly() = default;
    static Poly constant(Rational c);
    static Poly variable(const std::string& name);
    static Poly from_aexp(const AExp& e);

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly scaled(const Rational& c) const;
    Poly pow(unsigned e) const;

    /// Substitutes `var := replacement` and renormalizes.
    Poly substituted(const std::string& var, const Poly& replacement) const;

    Rational eval(const State& sigma) const;

    bool is_zero() const { return coeffs_.empty(); }
    bool is_constant() const;
    /// Only valid when is_constant().
    Rational constant_value() const;

    void collect_vars(std::set<std::string>& out) const;

    /// Multiplies by the positive rational that makes all coefficients
    /// integers with content 1. Returns the applied factor.
    Rational normalize_integer();
    /// First (map-order) coefficient; Rational(0) for the zero polynomial.
    Rational leading_coefficient() const;
    Poly negated() const { return scaled(Rational(-1)); }

    bool operator==(const Poly& o) const { return coeffs_ == o.coeffs_; }
    bool operator<(const Poly& o) const;

    const std::map<Monomial, Rational>& terms() const { return coeffs_; }

    /// "2*x*x - 1/2*y + 3"; parses back via the expectation reader.
    std::string str() const;

private:
    void prune();
    std::map<Monomial, Rational> coeffs_;
};

} // namespace cpgcl
