// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cpgcl/parser.hpp"
#include "cpgcl/rmdp.hpp"
#include "cpgcl/solver.hpp"
#include "cpgcl/state.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace testutil {

inline std::string corpus_path(const std::string& name) {
    const char* env = std::getenv("CPGCL_EXAMPLES");
    std::string base = env ? env : "corpus";
    std::ifstream probe(base + "/" + name);
    if (!probe && !env) base = "../corpus";
    return base + "/" + name;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline cpgcl::Program load_corpus(const std::string& name) {
    return cpgcl::parse_program(read_file(corpus_path(name)));
}

inline cpgcl::State state_of(std::initializer_list<std::pair<const char*, long>> vals) {
    cpgcl::State s;
    for (const auto& [k, v] : vals) s.set(k, cpgcl::BigInt(v));
    return s;
}

/// Independent oracle for small loop-free models: enumerates every path by
/// depth-first traversal, accumulating probability mass and rewards, instead
/// of solving linear systems. Self-loops (diverging states) contribute
/// nothing to reach/reward mass.
struct PathSums {
    cpgcl::Rational reach_sink{0};
    cpgcl::Rational reach_bad{0};
    cpgcl::Rational reward{0}; // over sink-reaching paths
    cpgcl::Rational reward_avoiding_bad{0};
};

inline void enumerate_paths(const cpgcl::Rmdp& m, std::uint32_t s,
                            const cpgcl::Rational& prob, const cpgcl::Rational& acc,
                            bool saw_bad, PathSums& out) {
    using cpgcl::Rational;
    const auto& st = m.states[s];
    if (st.labels & cpgcl::kLabelSink) {
        out.reach_sink += prob;
        out.reward += prob * acc;
        if (!saw_bad) out.reward_avoiding_bad += prob * acc;
        return;
    }
    if (st.labels & cpgcl::kLabelBad) saw_bad = true;
    if (st.labels & cpgcl::kLabelBad) out.reach_bad += prob;
    REQUIRE(st.choices.size() <= 1);
    if (st.choices.empty()) return; // frontier
    const auto& succ = st.choices[0].successors;
    if (succ.size() == 1 && succ[0].first == s) return; // diverging self-loop
    for (const auto& [t, pr] : succ)
        enumerate_paths(m, t, prob * pr, acc + st.reward, saw_bad, out);
}

inline PathSums path_oracle(const cpgcl::Rmdp& m) {
    PathSums out;
    enumerate_paths(m, m.initial, cpgcl::Rational(1), cpgcl::Rational(0), false, out);
    return out;
}

} // namespace testutil
