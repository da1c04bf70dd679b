// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cpgcl/rational.hpp"

#include <string>

namespace cpgcl {

/// Result of a conditional analysis: an exact rational, a sound interval
/// enclosing the value, or Undefined for the 0/0 quotient of an infeasible
/// program. For demonic minimization Undefined orders below every rational.
struct AnalysisValue {
    enum class Kind { Exact, Interval, Undefined };
    Kind kind = Kind::Undefined;
    Rational lo, hi; // Exact stores the value in both

    static AnalysisValue exact(Rational v) {
        AnalysisValue a;
        a.kind = Kind::Exact;
        a.lo = v;
        a.hi = std::move(v);
        return a;
    }
    static AnalysisValue interval(Rational lo, Rational hi) {
        if (lo == hi) return exact(std::move(lo));
        AnalysisValue a;
        a.kind = Kind::Interval;
        a.lo = std::move(lo);
        a.hi = std::move(hi);
        return a;
    }
    static AnalysisValue undefined() { return AnalysisValue(); }

    bool is_exact() const { return kind == Kind::Exact; }
    bool is_undefined() const { return kind == Kind::Undefined; }
    const Rational& value() const { return lo; }
    Rational width() const { return hi - lo; }

    /// Total order with Undefined below every rational (the 0/0 convention
    /// used by demonic minimization). Intervals compare by lower bound.
    bool less_demonic(const AnalysisValue& o) const {
        if (is_undefined()) return !o.is_undefined();
        if (o.is_undefined()) return false;
        return lo < o.lo;
    }

    std::string str(int digits = 6) const {
        switch (kind) {
        case Kind::Undefined: return "undefined";
        case Kind::Exact:
            if (lo.is_integer()) return lo.str();
            return lo.str() + " (~" + lo.decimal(digits) + ")";
        case Kind::Interval:
            return "[" + lo.str() + ", " + hi.str() + "] (~[" + lo.decimal(digits) +
                   ", " + hi.decimal(digits) + "])";
        }
        return "";
    }

    bool operator==(const AnalysisValue& o) const {
        if (kind != o.kind) return false;
        if (kind == Kind::Undefined) return true;
        return lo == o.lo && hi == o.hi;
    }
};

} // namespace cpgcl
