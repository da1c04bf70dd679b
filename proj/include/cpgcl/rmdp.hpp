// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cpgcl/ast.hpp"
#include "cpgcl/expectation.hpp"
#include "cpgcl/rational.hpp"
#include "cpgcl/state.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cpgcl {

enum class Action : std::uint8_t { Unique, Left, Right };

/// State labels. A term state carries the final valuation's reward, the
/// bad state marks a violated observation, the sink absorbs all
/// terminating runs.
enum Label : std::uint8_t {
    kLabelNone = 0,
    kLabelTerm = 1,
    kLabelSink = 2,
    kLabelBad = 4,
};

/// Explicit-state reward model. Built operationally from a program or
/// loaded from the explicit text format. Immutable once built; safe for
/// concurrent read-only use.
struct Rmdp {
    struct Choice {
        Action action = Action::Unique;
        std::vector<std::pair<std::uint32_t, Rational>> successors; // sums to 1
    };
    struct StateInfo {
        std::string name;
        std::uint8_t labels = kLabelNone;
        Rational reward;
        std::vector<Choice> choices; // empty and !expanded => frontier
        bool expanded = true;
    };

    std::vector<StateInfo> states;
    std::uint32_t initial = 0;

    bool fully_probabilistic() const {
        for (const auto& s : states)
            if (s.choices.size() > 1) return false;
        return true;
    }
    bool has_frontier() const {
        for (const auto& s : states)
            if (!s.expanded) return true;
        return false;
    }
    std::vector<std::uint32_t> frontier() const {
        std::vector<std::uint32_t> out;
        for (std::uint32_t i = 0; i < states.size(); ++i)
            if (!states[i].expanded) out.push_back(i);
        return out;
    }
    std::vector<std::uint32_t> nondeterministic_states() const {
        std::vector<std::uint32_t> out;
        for (std::uint32_t i = 0; i < states.size(); ++i)
            if (states[i].choices.size() > 1) out.push_back(i);
        return out;
    }
};

/// Unfolds the operational model of a program from an initial state by
/// breadth-first application of the construction rules, merging
/// structurally identical configurations, up to max_states explored
/// configurations. Rewards are f at term states. A partial unfolding has a
/// nonempty frontier; hitting the limit is not an error.
Rmdp build(const Program& p, const State& sigma0, const Expectation& f,
           std::size_t max_states = 100000);

/// Same-initial-valuation convenience: binds every declared variable
/// missing from `partial` to 0.
State total_state(const Program& p, const State& partial = State());

/// Deterministic DOT rendering; byte-identical across runs on equal input.
std::string export_dot(const Rmdp& m);

/// Line-oriented explicit format (see README). Terminal structure is
/// completed on load: term/bad states without transitions are wired to the
/// sink (created if absent) and the sink self-loop is added.
Rmdp load_explicit(const std::string& text);
std::string save_explicit(const Rmdp& m);

/// Copy with a different initial state (sub-model analysis).
Rmdp reroot(const Rmdp& m, std::uint32_t new_initial);

} // namespace cpgcl
