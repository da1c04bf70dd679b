// SPDX-License-Identifier: Apache-2.0
//
// Times the serial reference against the OpenMP path for the two
// embarrassingly parallel workloads: scheduler enumeration and parameter
// sweeps over immutable models.

#include "cpgcl/parser.hpp"
#include "cpgcl/randgen.hpp"
#include "cpgcl/rmdp.hpp"
#include "cpgcl/solver.hpp"
#include "cpgcl/transformer.hpp"

#include <chrono>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace cpgcl;

namespace {

double seconds(std::chrono::steady_clock::time_point a,
               std::chrono::steady_clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

Rmdp nd_workload(unsigned nd_states) {
    // chain of n nondeterministic states; the safe action moves on, the
    // risky one trades observation-violation risk for reward. Every
    // assignment induces a distinct RMC over the shared state space.
    std::ostringstream os;
    unsigned n = nd_states;
    std::uint32_t term = 2 * n, bad = 2 * n + 1;
    os << "states " << 2 * n + 2 << " initial 0\n";
    for (unsigned i = 0; i < n; ++i) {
        os << "state " << 2 * i << " labels {} reward 0\n";
        os << "state " << 2 * i + 1 << " labels {} reward " << i + 1 << "\n";
    }
    os << "state " << term << " labels {term} reward 1\n";
    os << "state " << bad << " labels {bad} reward 0\n";
    for (unsigned i = 0; i < n; ++i) {
        std::uint32_t next = i + 1 < n ? 2 * (i + 1) : term;
        os << "trans " << 2 * i << " left { " << next << ":1 }\n";
        os << "trans " << 2 * i << " right { " << 2 * i + 1 << ":1 }\n";
        os << "trans " << 2 * i + 1 << " unique { " << next << ":" << (i + 2) << "/"
           << (i + 3) << ", " << bad << ":1/" << (i + 3) << " }\n";
    }
    return load_explicit(os.str());
}

void bench_enumeration() {
    for (unsigned nd : {10u, 14u}) {
        Rmdp m = nd_workload(nd);
        auto t0 = std::chrono::steady_clock::now();
        auto serial = min_conditional(m, 20, false, false);
        auto t1 = std::chrono::steady_clock::now();
        auto parallel = min_conditional(m, 20, false, true);
        auto t2 = std::chrono::steady_clock::now();
        bool agree = serial.value == parallel.value &&
                     serial.scheduler == parallel.scheduler;
        std::cout << "enumeration nd=" << nd << " assignments=" << (1u << nd)
                  << " states=" << m.states.size() << ": serial " << seconds(t0, t1)
                  << "s, parallel " << seconds(t1, t2) << "s, speedup "
                  << seconds(t0, t1) / seconds(t1, t2) << (agree ? "" : " MISMATCH")
                  << "\n";
    }
}

void bench_sweep() {
    // independent conditional analyses across a parameter grid
    Program p = parse_program(
        "{ x := 0 } [p] { x := 1 };\n{ y := 0 } [p] { y := 1 };\nobserve (x != y)");
    std::vector<Rational> ps;
    for (long i = 1; i < 200; ++i) ps.emplace_back(i, 200);
    Expectation f = parse_expectation("[x = 0]");

    auto run = [&](bool parallel) {
        std::vector<AnalysisValue> out(ps.size());
        auto row = [&](std::size_t i) {
            Program inst = instantiate_params(p, {{"p", ps[i]}});
            Rmdp m = build(inst, total_state(inst), f, 100000);
            out[i] = conditional_expected_reward(m);
        };
#ifdef _OPENMP
        if (parallel) {
#pragma omp parallel for schedule(dynamic)
            for (long long i = 0; i < static_cast<long long>(ps.size()); ++i)
                row(static_cast<std::size_t>(i));
            return out;
        }
#endif
        (void)parallel;
        for (std::size_t i = 0; i < ps.size(); ++i) row(i);
        return out;
    };

    auto t0 = std::chrono::steady_clock::now();
    auto a = run(false);
    auto t1 = std::chrono::steady_clock::now();
    auto b = run(true);
    auto t2 = std::chrono::steady_clock::now();
    bool agree = true;
    for (std::size_t i = 0; i < a.size(); ++i) agree &= a[i] == b[i];
    std::cout << "sweep rows=" << ps.size() << ": serial " << seconds(t0, t1)
              << "s, parallel " << seconds(t1, t2) << "s, speedup "
              << seconds(t0, t1) / seconds(t1, t2) << (agree ? "" : " MISMATCH") << "\n";
}

} // namespace

int main() {
#ifdef _OPENMP
    std::cout << "openmp threads: " << omp_get_max_threads() << "\n";
#else
    std::cout << "built without openmp; both paths run serially\n";
#endif
    bench_enumeration();
    bench_sweep();
    return 0;
}
