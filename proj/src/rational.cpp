// SPDX-License-Identifier: Apache-2.0
#include "cpgcl/rational.hpp"

#include "cpgcl/errors.hpp"

#include <cctype>
#include <sstream>

namespace cpgcl {

Rational::Rational(long n, long d) : q_(n, d) {
    if (d == 0) throw EvaluationError("division by zero in rational constant");
    q_.canonicalize();
}

Rational::Rational(const BigInt& n, const BigInt& d) : q_(n, d) {
    if (d == 0) throw EvaluationError("division by zero in rational constant");
    q_.canonicalize();
}

Rational Rational::operator/(const Rational& o) const {
    if (o.q_ == 0) throw EvaluationError("division by zero");
    return Rational(mpq_class(q_ / o.q_));
}

Rational Rational::pow(unsigned e) const {
    mpq_class r(1);
    mpq_class base = q_;
    unsigned k = e;
    while (k > 0) {
        if (k & 1u) r *= base;
        base *= base;
        k >>= 1u;
    }
    return Rational(r);
}

Rational Rational::parse(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw EvaluationError("empty rational literal");

    auto e = s.find_first_of("eE");
    if (e != std::string::npos && s.find('/') == std::string::npos) {
        // scientific notation, converted exactly: 1e-6 -> 1/1000000
        std::string mant = s.substr(0, e), exp = s.substr(e + 1);
        if (mant.empty() || exp.empty())
            throw EvaluationError("malformed literal '" + text + "'");
        bool neg_exp = false;
        if (exp[0] == '-' || exp[0] == '+') {
            neg_exp = exp[0] == '-';
            exp = exp.substr(1);
        }
        for (char c : exp)
            if (!std::isdigit(static_cast<unsigned char>(c)))
                throw EvaluationError("malformed exponent in '" + text + "'");
        unsigned long k = std::stoul(exp);
        Rational base = parse(mant);
        Rational tens = Rational(10).pow(static_cast<unsigned>(k));
        return neg_exp ? base / tens : base * tens;
    }
    auto parse_int = [&text](std::string v) -> BigInt {
        if (!v.empty() && v[0] == '+') v = v.substr(1);
        if (v.empty() || v == "-")
            throw EvaluationError("malformed integer literal '" + text + "'");
        for (std::size_t i = 0; i < v.size(); ++i)
            if (!(std::isdigit(static_cast<unsigned char>(v[i])) || (i == 0 && v[i] == '-')))
                throw EvaluationError("malformed integer literal '" + text + "'");
        return BigInt(v);
    };
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        std::string n = s.substr(0, slash), d = s.substr(slash + 1);
        if (n.empty() || d.empty())
            throw EvaluationError("malformed rational literal '" + text + "'");
        BigInt den = parse_int(d);
        if (den == 0) throw EvaluationError("rational literal with denominator 0");
        return Rational(parse_int(n), den);
    }
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        // decimals convert exactly: 0.25 -> 25/100
        std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
        bool neg = false;
        if (!ip.empty() && (ip[0] == '-' || ip[0] == '+')) {
            neg = ip[0] == '-';
            ip = ip.substr(1);
        }
        if (ip.empty()) ip = "0";
        if (fp.empty()) fp = "0";
        for (char c : ip + fp)
            if (!std::isdigit(static_cast<unsigned char>(c)))
                throw EvaluationError("malformed decimal literal '" + text + "'");
        BigInt scale = 1;
        for (std::size_t i = 0; i < fp.size(); ++i) scale *= 10;
        BigInt n = BigInt(ip) * scale + BigInt(fp);
        if (neg) n = -n;
        return Rational(n, scale);
    }
    return Rational(parse_int(s));
}

std::string Rational::str() const {
    return q_.get_str();
}

std::string Rational::decimal(int digits) const {
    mpf_class f(q_, 128);
    std::ostringstream os;
    os.precision(digits);
    os << f;
    return os.str();
}

} // namespace cpgcl
