// SPDX-License-Identifier: Apache-2.0
#include "cpgcl/solver.hpp"

#include "cpgcl/errors.hpp"

#include <algorithm>
#include <exception>
#include <stack>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cpgcl {

namespace {

using Succ = std::vector<std::pair<std::uint32_t, Rational>>;

// Per-state unique distribution of a fully probabilistic model; absorbing
// and frontier states map to the shared empty list.
std::vector<const Succ*> chain_of(const Rmdp& m) {
    static const Succ kEmpty;
    std::vector<const Succ*> chain(m.states.size(), &kEmpty);
    for (std::size_t i = 0; i < m.states.size(); ++i) {
        const auto& cs = m.states[i].choices;
        if (cs.size() > 1)
            throw InvariantError("model is not fully probabilistic (state " +
                                 std::to_string(i) + ")");
        if (cs.size() == 1) chain[i] = &cs[0].successors;
    }
    return chain;
}

std::vector<char> mask_states(const Rmdp& m, std::uint8_t mask) {
    std::vector<char> out(m.states.size(), 0);
    for (std::size_t i = 0; i < m.states.size(); ++i)
        if (m.states[i].labels & mask) out[i] = 1;
    return out;
}

std::vector<char> backward_reach(const std::vector<const Succ*>& chain,
                                 const std::vector<char>& target) {
    std::size_t n = chain.size();
    std::vector<std::vector<std::uint32_t>> rev(n);
    for (std::uint32_t s = 0; s < n; ++s)
        for (const auto& [t, pr] : *chain[s]) rev[t].push_back(s);
    std::vector<char> reach = target;
    std::vector<std::uint32_t> stack;
    for (std::uint32_t s = 0; s < n; ++s)
        if (target[s]) stack.push_back(s);
    while (!stack.empty()) {
        std::uint32_t s = stack.back();
        stack.pop_back();
        for (std::uint32_t p : rev[s]) {
            if (!reach[p]) {
                reach[p] = 1;
                stack.push_back(p);
            }
        }
    }
    return reach;
}

std::vector<char> forward_reach(const std::vector<const Succ*>& chain, std::uint32_t from) {
    std::vector<char> seen(chain.size(), 0);
    std::vector<std::uint32_t> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
        std::uint32_t s = stack.back();
        stack.pop_back();
        for (const auto& [t, pr] : *chain[s]) {
            if (!seen[t]) {
                seen[t] = 1;
                stack.push_back(t);
            }
        }
    }
    return seen;
}

// Iterative Tarjan; components are emitted successors-first, which is the
// order the block solver wants.
std::vector<std::vector<std::uint32_t>> scc_decompose(const std::vector<const Succ*>& chain) {
    std::size_t n = chain.size();
    std::vector<std::int64_t> index(n, -1), low(n, 0);
    std::vector<char> onstack(n, 0);
    std::vector<std::uint32_t> stack;
    std::vector<std::vector<std::uint32_t>> sccs;
    std::int64_t counter = 0;

    struct Frame {
        std::uint32_t v;
        std::size_t child;
    };
    for (std::uint32_t root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        std::vector<Frame> frames{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        onstack[root] = 1;
        while (!frames.empty()) {
            Frame& f = frames.back();
            const Succ& succ = *chain[f.v];
            if (f.child < succ.size()) {
                std::uint32_t w = succ[f.child].first;
                ++f.child;
                if (index[w] == -1) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    onstack[w] = 1;
                    frames.push_back({w, 0});
                } else if (onstack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
            } else {
                std::uint32_t v = f.v;
                if (low[v] == index[v]) {
                    std::vector<std::uint32_t> comp;
                    while (true) {
                        std::uint32_t w = stack.back();
                        stack.pop_back();
                        onstack[w] = 0;
                        comp.push_back(w);
                        if (w == v) break;
                    }
                    sccs.push_back(std::move(comp));
                }
                frames.pop_back();
                if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
            }
        }
    }
    return sccs;
}

/// Solves x_s = extra_s + sum P(s,s') x_{s'} for the states marked unknown;
/// all other states take the preset values. Uses the SCC structure: blocks
/// are eliminated densely in successors-first order. The solution is
/// verified by exact substitution.
std::vector<Rational> solve_system(const std::vector<const Succ*>& chain,
                                   const std::vector<char>& unknown,
                                   std::vector<Rational> value,
                                   const std::vector<Rational>& extra) {
    auto sccs = scc_decompose(chain);
    for (const auto& comp : sccs) {
        std::vector<std::uint32_t> vars;
        for (std::uint32_t s : comp)
            if (unknown[s]) vars.push_back(s);
        if (vars.empty()) continue;
        std::sort(vars.begin(), vars.end());
        std::size_t k = vars.size();
        std::vector<std::int64_t> col(chain.size(), -1);
        for (std::size_t i = 0; i < k; ++i) col[vars[i]] = static_cast<std::int64_t>(i);

        // rows of (I - A) x = b
        std::vector<std::vector<Rational>> mat(k, std::vector<Rational>(k, Rational(0)));
        std::vector<Rational> rhs(k, Rational(0));
        for (std::size_t i = 0; i < k; ++i) {
            std::uint32_t s = vars[i];
            mat[i][i] = Rational(1);
            rhs[i] = extra[s];
            for (const auto& [t, pr] : *chain[s]) {
                if (col[t] >= 0)
                    mat[i][static_cast<std::size_t>(col[t])] -= pr;
                else
                    rhs[i] += pr * value[t];
            }
        }
        // Gaussian elimination, first nonzero pivot per column
        for (std::size_t c = 0; c < k; ++c) {
            std::size_t pivot = c;
            while (pivot < k && mat[pivot][c].is_zero()) ++pivot;
            if (pivot == k)
                throw InvariantError("singular linear system despite reachability pre-pass");
            std::swap(mat[pivot], mat[c]);
            std::swap(rhs[pivot], rhs[c]);
            for (std::size_t r = c + 1; r < k; ++r) {
                if (mat[r][c].is_zero()) continue;
                Rational factor = mat[r][c] / mat[c][c];
                mat[r][c] = Rational(0);
                for (std::size_t j = c + 1; j < k; ++j)
                    mat[r][j] -= factor * mat[c][j];
                rhs[r] -= factor * rhs[c];
            }
        }
        for (std::size_t c = k; c-- > 0;) {
            Rational acc = rhs[c];
            for (std::size_t j = c + 1; j < k; ++j) acc -= mat[c][j] * value[vars[j]];
            value[vars[c]] = acc / mat[c][c];
        }
    }
    // exact self-check of every unknown equation
    for (std::uint32_t s = 0; s < chain.size(); ++s) {
        if (!unknown[s]) continue;
        Rational acc = extra[s];
        for (const auto& [t, pr] : *chain[s]) acc += pr * value[t];
        if (!(acc == value[s]))
            throw InvariantError("linear solver self-check failed");
    }
    return value;
}

/// Reach probabilities for every state w.r.t. a target set.
std::vector<Rational> reach_vector(const std::vector<const Succ*>& chain,
                                   const std::vector<char>& target) {
    std::size_t n = chain.size();
    std::vector<char> canreach = backward_reach(chain, target);
    std::vector<Rational> value(n, Rational(0));
    std::vector<Rational> extra(n, Rational(0));
    std::vector<char> unknown(n, 0);
    for (std::uint32_t s = 0; s < n; ++s) {
        if (target[s])
            value[s] = Rational(1);
        else if (canreach[s])
            unknown[s] = 1;
    }
    return solve_system(chain, unknown, std::move(value), extra);
}

/// Expected reward over target-reaching paths, for every state:
/// y_s = r(s) * x_s + sum P(s,s') y_{s'} with y = 0 on targets.
std::vector<Rational> reward_vector(const Rmdp& m, const std::vector<const Succ*>& chain,
                                    const std::vector<char>& target,
                                    const std::vector<Rational>& x) {
    std::size_t n = chain.size();
    std::vector<Rational> value(n, Rational(0));
    std::vector<Rational> extra(n, Rational(0));
    std::vector<char> unknown(n, 0);
    for (std::uint32_t s = 0; s < n; ++s) {
        if (target[s]) continue; // paths end on first hit; the path reward excludes it
        if (x[s].is_zero()) continue;
        unknown[s] = 1;
        extra[s] = m.states[s].reward * x[s];
    }
    return solve_system(chain, unknown, std::move(value), extra);
}

void check_no_frontier(const Rmdp& m) {
    if (m.has_frontier())
        throw InvariantError("model has an unexpanded frontier; "
                             "increase the exploration limit or use bounds");
}

/// Reachable, reward-positive bottom SCC that avoids the target: reward
/// accumulates without bound there under the cumulative reading.
void check_divergence(const Rmdp& m, const std::vector<const Succ*>& chain,
                      const std::vector<char>& target) {
    std::vector<char> reachable = forward_reach(chain, m.initial);
    auto sccs = scc_decompose(chain);
    for (const auto& comp : sccs) {
        bool bottom = true, has_target = false, has_reward = false, is_reachable = false;
        for (std::uint32_t s : comp) {
            if (target[s]) has_target = true;
            if (reachable[s]) is_reachable = true;
            if (m.states[s].reward > Rational(0)) has_reward = true;
            for (const auto& [t, pr] : *chain[s]) {
                bool inside = std::find(comp.begin(), comp.end(), t) != comp.end();
                if (!inside) bottom = false;
            }
            if (chain[s]->empty()) bottom = false; // frontier, not a closed component
        }
        if (bottom && is_reachable && has_reward && !has_target)
            throw NonConvergent("expected reward diverges: a reachable reward-positive "
                                "bottom component never reaches the target");
    }
}

Rmdp absorb_bad(const Rmdp& m) {
    Rmdp r = m;
    for (auto& s : r.states)
        if (s.labels & kLabelBad) s.choices.clear();
    return r;
}

Rational expected_reward_internal(const Rmdp& m, bool tolerate_frontier) {
    if (!tolerate_frontier) check_no_frontier(m);
    auto chain = chain_of(m);
    auto target = mask_states(m, kLabelSink);
    if (!tolerate_frontier) check_divergence(m, chain, target);
    auto x = reach_vector(chain, target);
    auto y = reward_vector(m, chain, target, x);
    return y[m.initial];
}

Rational reach_internal(const Rmdp& m, const std::vector<char>& target) {
    auto chain = chain_of(m);
    return reach_vector(chain, target)[m.initial];
}

void check_reward_bound(const Rmdp& m, const Rational& bound, const char* what) {
    for (std::size_t i = 0; i < m.states.size(); ++i)
        if (m.states[i].reward > bound)
            throw BoundExceeded(std::string(what) + ": reward " +
                                m.states[i].reward.str() + " at state " +
                                std::to_string(i) + " exceeds " + bound.str());
}

} // namespace

Rational reach_prob(const Rmdp& m, std::uint8_t target_mask) {
    check_no_frontier(m);
    return reach_internal(m, mask_states(m, target_mask));
}

Rational expected_reward(const Rmdp& m) {
    return expected_reward_internal(m, false);
}

Rational liberal_expected_reward(const Rmdp& m) {
    check_reward_bound(m, Rational(1), "liberal expected reward");
    return expected_reward(m) + (Rational(1) - reach_prob(m, kLabelSink));
}

AnalysisValue conditional_expected_reward(const Rmdp& m, bool liberal) {
    check_no_frontier(m);
    if (liberal) check_reward_bound(m, Rational(1), "conditional liberal expected reward");
    Rational den = Rational(1) - reach_internal(m, mask_states(m, kLabelBad));
    if (den.is_zero()) return AnalysisValue::undefined();
    Rmdp restricted = absorb_bad(m);
    Rational num = expected_reward_internal(restricted, false);
    if (liberal) {
        // diverging runs never meet an observation violation; they carry
        // their full mass in the liberal reading
        Rational hit = reach_internal(m, mask_states(m, kLabelBad | kLabelSink));
        num += Rational(1) - hit;
    }
    return AnalysisValue::exact(num / den);
}

BoundedConditional bounded_conditional(const Rmdp& m, const Rational& post_bound,
                                       bool liberal) {
    check_reward_bound(m, post_bound, "bounded conditional");
    if (liberal && post_bound > Rational(1))
        throw BoundExceeded("liberal analysis requires a bound of at most 1");

    auto chain = chain_of(m);
    std::size_t n = m.states.size();
    std::vector<char> frontier(n, 0);
    std::size_t frontier_size = 0;
    for (std::uint32_t s = 0; s < n; ++s) {
        if (!m.states[s].expanded) {
            frontier[s] = 1;
            ++frontier_size;
        }
    }

    Rational bad_lo = reach_internal(m, mask_states(m, kLabelBad));
    Rational u = reach_vector(chain, frontier)[m.initial];

    Rmdp restricted = absorb_bad(m);
    Rational num_lo = expected_reward_internal(restricted, true);
    Rational per_unit = liberal ? Rational(1) : post_bound;
    if (liberal) {
        auto hit = mask_states(m, kLabelBad | kLabelSink);
        for (std::uint32_t s = 0; s < n; ++s)
            if (frontier[s]) hit[s] = 1;
        // mass that provably diverges inside the resolved region
        num_lo += Rational(1) - reach_internal(m, hit);
    }
    Rational num_hi = num_lo + u * per_unit;

    Rational den_hi = Rational(1) - bad_lo;
    Rational den_lo = den_hi - u;

    BoundedConditional out;
    out.unresolved_mass = u;
    out.frontier_size = frontier_size;
    if (den_hi.is_zero()) {
        out.value = AnalysisValue::undefined();
        return out;
    }
    Rational cap = liberal ? Rational(1) : post_bound;
    Rational lo = num_lo / den_hi;
    Rational hi = den_lo > Rational(0) ? std::min(num_hi / den_lo, cap) : cap;
    if (hi < lo) hi = lo;
    out.value = AnalysisValue::interval(std::move(lo), std::move(hi));
    return out;
}

Rmdp induce(const Rmdp& m, const SchedulerAssignment& sched) {
    Rmdp r = m;
    for (auto& [idx, action] : sched) {
        if (idx >= r.states.size())
            throw InvariantError("scheduler assigns an undefined state");
        auto& cs = r.states[idx].choices;
        bool found = false;
        for (const auto& c : cs) {
            if (c.action == action) {
                r.states[idx].choices = {c};
                found = true;
                break;
            }
        }
        if (!found)
            throw InvariantError("scheduler assigns an unavailable action");
    }
    return r;
}

MinConditionalResult min_conditional(const Rmdp& m, std::size_t budget, bool liberal,
                                     bool parallel) {
    check_no_frontier(m);
    auto nd = m.nondeterministic_states();
    if (nd.size() > budget) throw BudgetExceeded(nd.size(), budget);

    // cycles through nondeterministic states defeat positional enumeration
    {
        std::vector<const Succ*> all_edges(m.states.size());
        std::vector<Succ> storage(m.states.size());
        for (std::uint32_t s = 0; s < m.states.size(); ++s) {
            for (const auto& c : m.states[s].choices)
                storage[s].insert(storage[s].end(), c.successors.begin(),
                                  c.successors.end());
            all_edges[s] = &storage[s];
        }
        auto sccs = scc_decompose(all_edges);
        for (const auto& comp : sccs) {
            bool cyclic = comp.size() > 1;
            if (!cyclic) {
                for (const auto& [t, pr] : *all_edges[comp[0]])
                    if (t == comp[0]) cyclic = true;
            }
            if (!cyclic) continue;
            for (std::uint32_t s : comp)
                if (m.states[s].choices.size() > 1) throw CyclicNondeterminism();
        }
    }

    std::size_t count = std::size_t(1) << nd.size();
    std::vector<AnalysisValue> values(count);
    std::exception_ptr error;

    auto eval_assignment = [&](std::size_t bits) {
        SchedulerAssignment sched;
        for (std::size_t i = 0; i < nd.size(); ++i)
            sched[nd[i]] = (bits >> i) & 1u ? Action::Right : Action::Left;
        values[bits] = conditional_expected_reward(induce(m, sched), liberal);
    };

#ifdef _OPENMP
    if (parallel && count > 1) {
#pragma omp parallel for schedule(dynamic)
        for (long long bits = 0; bits < static_cast<long long>(count); ++bits) {
            if (error) continue;
            try {
                eval_assignment(static_cast<std::size_t>(bits));
            } catch (...) {
#pragma omp critical
                if (!error) error = std::current_exception();
            }
        }
    } else
#endif
    {
        (void)parallel;
        for (std::size_t bits = 0; bits < count; ++bits) eval_assignment(bits);
    }
    if (error) std::rethrow_exception(error);

    std::size_t best = 0;
    for (std::size_t bits = 1; bits < count; ++bits)
        if (values[bits].less_demonic(values[best])) best = bits;

    MinConditionalResult out;
    out.value = values[best];
    for (std::size_t i = 0; i < nd.size(); ++i)
        out.scheduler[nd[i]] = (best >> i) & 1u ? Action::Right : Action::Left;
    out.enumerated = std::move(values);
    return out;
}

} // namespace cpgcl
