// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cpgcl/errors.hpp"
#include "cpgcl/rational.hpp"

#include <map>
#include <string>

namespace cpgcl {

/// Total variable valuation. Lookup of a missing name is an error so that
/// scoping bugs surface instead of silently reading zero.
class State {
public:
    State() = default;
    explicit State(std::map<std::string, BigInt> vals) : vals_(std::move(vals)) {}

    const BigInt& get(const std::string& var) const {
        auto it = vals_.find(var);
        if (it == vals_.end())
            throw EvaluationError("variable '" + var + "' is not bound in the state");
        return it->second;
    }
    void set(const std::string& var, BigInt value) { vals_[var] = std::move(value); }
    bool has(const std::string& var) const { return vals_.count(var) != 0; }

    State updated(const std::string& var, BigInt value) const {
        State s = *this;
        s.set(var, std::move(value));
        return s;
    }

    const std::map<std::string, BigInt>& values() const { return vals_; }

    bool operator==(const State& o) const { return vals_ == o.vals_; }
    bool operator<(const State& o) const { return vals_ < o.vals_; }

    std::string str() const {
        std::string out;
        for (const auto& [k, v] : vals_) {
            if (!out.empty()) out += " ";
            out += k + "=" + v.get_str();
        }
        return out;
    }

private:
    std::map<std::string, BigInt> vals_;
};

} // namespace cpgcl
