// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cpgcl/ast.hpp"
#include "cpgcl/guard.hpp"
#include "cpgcl/poly.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cpgcl {

/// Symbolic expectation: a guarded sum of polynomials, a pointwise minimum
/// of such sums, or the top value infinity. Semantics of the sum form is
/// plain summation over the terms whose guard holds; the transformer rules
/// are responsible for producing partitions where one is intended.
///
/// All constructors keep the value simplified enough for use; simplified()
/// produces the canonical form whose syntactic equality is the official
/// (sound, incomplete) semantic-equality test.
class Expectation {
public:
    struct Term {
        GuardPtr guard;
        Poly weight;
    };

    enum class Kind { Terms, Min, Infinity };

    Expectation() : kind_(Kind::Terms) {}

    static Expectation zero() { return Expectation(); }
    static Expectation one() { return constant(Rational(1)); }
    static Expectation constant(Rational c);
    static Expectation infinity();
    static Expectation polynomial(Poly p);
    static Expectation indicator(GuardPtr g);
    static Expectation term(GuardPtr g, Poly w);

    static Expectation add(const Expectation& a, const Expectation& b);
    static Expectation scale(const Rational& c, const Expectation& e);
    static Expectation guard_mul(const GuardPtr& g, const Expectation& e);
    static Expectation min_of(const Expectation& a, const Expectation& b);

    Expectation substituted(const std::string& var, const AExp& replacement) const;

    /// Semantics-preserving normal form: merges syntactically equal guards,
    /// drops zero terms, folds closed guards, collapses complementary
    /// guard pairs with equal weight, orders terms canonically.
    Expectation simplified() const;

    /// Pointwise value; nullopt encodes infinity. Throws NegativeExpectation
    /// if a contributing term is negative at sigma.
    std::optional<Rational> eval(const State& sigma) const;
    /// As eval, but throws EvaluationError on an infinite value.
    Rational eval_finite(const State& sigma) const;

    /// Syntactic equality (use on simplified values).
    bool equals(const Expectation& o) const { return compare_to(o) == 0; }
    int compare_to(const Expectation& o) const;

    Kind kind() const { return kind_; }
    bool is_infinity() const { return kind_ == Kind::Infinity; }
    bool is_zero() const { return kind_ == Kind::Terms && terms_.empty(); }
    /// Total number of guarded terms (summed over minimum arguments).
    std::size_t size() const {
        if (kind_ == Kind::Terms) return terms_.size();
        std::size_t n = 0;
        for (const auto& a : min_args_) n += a.size();
        return n;
    }
    /// Constant value if this is syntactically a constant, else nullopt.
    std::optional<Rational> constant_value() const;

    const std::vector<Term>& terms() const { return terms_; }
    const std::vector<Expectation>& min_args() const { return min_args_; }

    void collect_vars(std::set<std::string>& out) const;

    /// Surface syntax "[G]*(poly) + ... | min(e,e) | inf"; parses back via
    /// parse_expectation.
    std::string str() const;

private:
    Kind kind_;
    std::vector<Term> terms_;           // Kind::Terms
    std::vector<Expectation> min_args_; // Kind::Min; flattened, each Terms/Infinity
};

void collect_vars(const Expectation& e, std::set<std::string>& out);

} // namespace cpgcl
