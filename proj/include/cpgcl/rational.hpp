// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <gmpxx.h>

#include <compare>
#include <string>

namespace cpgcl {

using BigInt = mpz_class;

/// Exact rational number in canonical form (positive denominator, reduced).
/// A thin wrapper over GMP's mpq_class; all arithmetic is exact.
class Rational {
public:
    Rational() : q_(0) {}
    Rational(long n) : q_(n) {}                                // NOLINT(google-explicit-constructor)
    Rational(const BigInt& n) : q_(n) {}                       // NOLINT(google-explicit-constructor)
    Rational(long n, long d);
    Rational(const BigInt& n, const BigInt& d);

    /// Accepts "a", "a/b" and decimal notation "1.25" (converted exactly).
    static Rational parse(const std::string& text);

    BigInt num() const { return q_.get_num(); }
    BigInt den() const { return q_.get_den(); }
    bool is_integer() const { return q_.get_den() == 1; }
    bool is_zero() const { return q_ == 0; }

    Rational operator+(const Rational& o) const { return Rational(q_ + o.q_); }
    Rational operator-(const Rational& o) const { return Rational(q_ - o.q_); }
    Rational operator-() const { return Rational(-q_); }
    Rational operator*(const Rational& o) const { return Rational(q_ * o.q_); }
    Rational operator/(const Rational& o) const;
    Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
    Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
    Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
    Rational& operator/=(const Rational& o) { *this = *this / o; return *this; }

    bool operator==(const Rational& o) const { return q_ == o.q_; }
    bool operator!=(const Rational& o) const { return q_ != o.q_; }
    bool operator<(const Rational& o) const { return q_ < o.q_; }
    bool operator<=(const Rational& o) const { return q_ <= o.q_; }
    bool operator>(const Rational& o) const { return q_ > o.q_; }
    bool operator>=(const Rational& o) const { return q_ >= o.q_; }
    std::strong_ordering operator<=>(const Rational& o) const {
        int c = cmp(q_, o.q_);
        return c < 0 ? std::strong_ordering::less
             : c > 0 ? std::strong_ordering::greater
                     : std::strong_ordering::equal;
    }

    Rational abs() const { return Rational(::abs(q_)); }
    Rational pow(unsigned e) const;

    /// Exact text form "a" or "a/b".
    std::string str() const;
    /// Decimal rendering for display only, `digits` significant digits.
    std::string decimal(int digits = 6) const;

private:
    // GMP arithmetic keeps canonical operands canonical; only the
    // numerator/denominator constructors need an explicit canonicalize.
    explicit Rational(mpq_class q) : q_(std::move(q)) {}
    mpq_class q_;
};

inline Rational operator*(long a, const Rational& b) { return Rational(a) * b; }

} // namespace cpgcl
