// SPDX-License-Identifier: Apache-2.0
#include "cpgcl/rmdp.hpp"

#include "cpgcl/errors.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <optional>
#include <sstream>

namespace cpgcl {

// ---------------------------------------------------------------------------
// Operational construction
// ---------------------------------------------------------------------------

namespace {

/// A configuration is the remaining program plus the current valuation.
/// The remaining program is kept in a flattened form: an executable head
/// (nullptr encodes the terminated marker) and the list of statements
/// sequenced behind it. Sequencing is decomposed eagerly so that
/// structurally identical configurations merge regardless of association.
struct Config {
    const Stmt* head = nullptr; // nullptr = terminated marker
    std::vector<const Stmt*> tail;
    State sigma;
};

/// Pushes `s` as the new head, unfolding nested sequencing into the tail.
Config make_config(const Stmt* s, std::vector<const Stmt*> tail, State sigma) {
    while (s != nullptr && s->kind == Stmt::Kind::Seq) {
        tail.insert(tail.begin(), s->second.get());
        s = s->first.get();
    }
    return {s, std::move(tail), std::move(sigma)};
}

std::string remaining_text(const Config& c) {
    std::string out = c.head == nullptr ? "|" : pretty_print(*c.head);
    for (const auto* t : c.tail) out += "; " + pretty_print(*t);
    // configurations are compared on this text: collapse layout whitespace
    std::string flat;
    bool ws = false;
    for (char ch : out) {
        if (ch == '\n' || ch == ' ') {
            ws = true;
            continue;
        }
        if (ws && !flat.empty()) flat += ' ';
        ws = false;
        flat += ch;
    }
    return flat;
}

Rational eval_probability(const ProbExp& p, const State& sigma) {
    switch (p.kind) {
    case ProbExp::Kind::Const: return p.value;
    case ProbExp::Kind::Param: throw UninstantiatedParameter(p.param);
    case ProbExp::Kind::Quotient: {
        Rational den = p.den->eval_finite(sigma);
        if (den.is_zero())
            throw EvaluationError("quotient probability has denominator 0 at state {" +
                                  sigma.str() + "}");
        Rational v = p.num->eval_finite(sigma) / den;
        if (v < Rational(0) || v > Rational(1))
            throw EvaluationError("quotient probability " + v.str() +
                                  " lies outside [0,1] at state {" + sigma.str() + "}");
        return v;
    }
    }
    throw EvaluationError("corrupt probability");
}

class Builder {
public:
    Builder(const Expectation& f, std::size_t max_states)
        : f_(f), max_states_(max_states) {}

    Rmdp run(const Program& p, const State& sigma0) {
        std::uint32_t init = conf_state(make_config(p.body.get(), {}, sigma0));
        m_.initial = init;
        while (!queue_.empty() && m_.states.size() < max_states_) {
            std::uint32_t idx = queue_.front();
            queue_.pop_front();
            expand(idx);
        }
        return std::move(m_);
    }

private:
    std::uint32_t new_state(std::string name, std::uint8_t labels, Rational reward,
                            bool expanded) {
        Rmdp::StateInfo s;
        s.name = std::move(name);
        s.labels = labels;
        s.reward = std::move(reward);
        s.expanded = expanded;
        m_.states.push_back(std::move(s));
        return static_cast<std::uint32_t>(m_.states.size() - 1);
    }

    std::uint32_t sink_state() {
        if (!sink_) {
            sink_ = new_state("<sink>", kLabelSink, Rational(0), true);
            m_.states[*sink_].choices = {{Action::Unique, {{*sink_, Rational(1)}}}};
        }
        return *sink_;
    }

    std::uint32_t bad_state() {
        if (!bad_) {
            bad_ = new_state("<bad>", kLabelBad, Rational(0), true);
            m_.states[*bad_].choices = {{Action::Unique, {{sink_state(), Rational(1)}}}};
        }
        return *bad_;
    }

    std::uint32_t term_state(const State& sigma) {
        auto it = terms_.find(sigma);
        if (it != terms_.end()) return it->second;
        Rational reward = f_.eval_finite(sigma);
        if (reward < Rational(0))
            throw NegativeExpectation("reward " + reward.str() + " at state {" +
                                      sigma.str() + "}");
        std::uint32_t idx =
            new_state("<| " + sigma.str() + ">", kLabelTerm, std::move(reward), true);
        m_.states[idx].choices = {{Action::Unique, {{sink_state(), Rational(1)}}}};
        terms_.emplace(sigma, idx);
        return idx;
    }

    std::uint32_t conf_state(const Config& c) {
        if (c.head == nullptr && c.tail.empty()) return term_state(c.sigma);
        auto key = std::make_pair(remaining_text(c), c.sigma);
        auto it = confs_.find(key);
        if (it != confs_.end()) return it->second;
        std::uint32_t idx = new_state("<" + key.first + " | " + c.sigma.str() + ">",
                                      kLabelNone, Rational(0), false);
        confs_.emplace(std::move(key), idx);
        configs_.emplace(idx, c);
        queue_.push_back(idx);
        return idx;
    }

    void add_choice(std::uint32_t from, Action a,
                    std::vector<std::pair<std::uint32_t, Rational>> successors) {
        // merge duplicate targets, drop zero-probability entries
        std::map<std::uint32_t, Rational> merged;
        for (auto& [t, pr] : successors) {
            if (pr.is_zero()) continue;
            merged[t] += pr;
        }
        Rmdp::Choice c;
        c.action = a;
        for (auto& [t, pr] : merged) c.successors.emplace_back(t, pr);
        m_.states[from].choices.push_back(std::move(c));
    }

    void expand(std::uint32_t idx) {
        Config c = configs_.at(idx);
        m_.states[idx].expanded = true;

        if (c.head == nullptr) {
            // terminated head with pending continuation: run the next statement
            std::vector<const Stmt*> tail = c.tail;
            const Stmt* next = tail.front();
            tail.erase(tail.begin());
            std::uint32_t to = conf_state(make_config(next, std::move(tail), c.sigma));
            add_choice(idx, Action::Unique, {{to, Rational(1)}});
            return;
        }

        const Stmt& s = *c.head;
        auto done = [&](State sigma) {
            return conf_state({nullptr, c.tail, std::move(sigma)});
        };
        switch (s.kind) {
        case Stmt::Kind::Skip:
            add_choice(idx, Action::Unique, {{done(c.sigma), Rational(1)}});
            return;
        case Stmt::Kind::Abort:
            add_choice(idx, Action::Unique, {{idx, Rational(1)}}); // diverges
            return;
        case Stmt::Kind::Assign: {
            State next = c.sigma.updated(s.var, eval(*s.expr, c.sigma));
            add_choice(idx, Action::Unique, {{done(std::move(next)), Rational(1)}});
            return;
        }
        case Stmt::Kind::Observe: {
            std::uint32_t to = eval(*s.guard, c.sigma) ? done(c.sigma) : bad_state();
            add_choice(idx, Action::Unique, {{to, Rational(1)}});
            return;
        }
        case Stmt::Kind::Seq:
            throw EvaluationError("unflattened sequencing in configuration");
        case Stmt::Kind::Ite: {
            const Stmt* branch = eval(*s.guard, c.sigma) ? s.first.get() : s.second.get();
            std::uint32_t to = conf_state(make_config(branch, c.tail, c.sigma));
            add_choice(idx, Action::Unique, {{to, Rational(1)}});
            return;
        }
        case Stmt::Kind::While: {
            if (eval(*s.guard, c.sigma)) {
                std::vector<const Stmt*> tail = c.tail;
                tail.insert(tail.begin(), &s); // body; while ...
                std::uint32_t to = conf_state(make_config(s.first.get(), std::move(tail), c.sigma));
                add_choice(idx, Action::Unique, {{to, Rational(1)}});
            } else {
                add_choice(idx, Action::Unique, {{done(c.sigma), Rational(1)}});
            }
            return;
        }
        case Stmt::Kind::PChoice: {
            Rational p = eval_probability(s.prob, c.sigma);
            std::vector<std::pair<std::uint32_t, Rational>> succ;
            if (!p.is_zero())
                succ.emplace_back(conf_state(make_config(s.first.get(), c.tail, c.sigma)), p);
            Rational q = Rational(1) - p;
            if (!q.is_zero())
                succ.emplace_back(conf_state(make_config(s.second.get(), c.tail, c.sigma)), q);
            add_choice(idx, Action::Unique, std::move(succ));
            return;
        }
        case Stmt::Kind::NDChoice: {
            std::uint32_t l = conf_state(make_config(s.first.get(), c.tail, c.sigma));
            std::uint32_t r = conf_state(make_config(s.second.get(), c.tail, c.sigma));
            add_choice(idx, Action::Left, {{l, Rational(1)}});
            add_choice(idx, Action::Right, {{r, Rational(1)}});
            return;
        }
        }
        throw EvaluationError("corrupt statement");
    }

    const Expectation& f_;
    std::size_t max_states_;
    Rmdp m_;
    std::deque<std::uint32_t> queue_;
    std::map<std::pair<std::string, State>, std::uint32_t> confs_;
    std::map<State, std::uint32_t> terms_;
    std::map<std::uint32_t, Config> configs_;
    std::optional<std::uint32_t> sink_;
    std::optional<std::uint32_t> bad_;
};

} // namespace

State total_state(const Program& p, const State& partial) {
    State s = partial;
    for (const auto& v : p.declared_vars)
        if (!s.has(v)) s.set(v, 0);
    return s;
}

Rmdp build(const Program& p, const State& sigma0, const Expectation& f,
           std::size_t max_states) {
    if (!p.params.empty())
        throw ParameterError("program has uninstantiated parameters");
    for (const auto& v : p.declared_vars)
        if (!sigma0.has(v))
            throw EvaluationError("initial state does not bind variable '" + v + "'");
    return Builder(f.simplified(), max_states).run(p, sigma0);
}

Rmdp reroot(const Rmdp& m, std::uint32_t new_initial) {
    if (new_initial >= m.states.size())
        throw InvariantError("initial state index out of range");
    Rmdp r = m;
    r.initial = new_initial;
    return r;
}

// ---------------------------------------------------------------------------
// DOT export
// ---------------------------------------------------------------------------

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

const char* action_name(Action a) {
    switch (a) {
    case Action::Unique: return "unique";
    case Action::Left: return "left";
    case Action::Right: return "right";
    }
    return "unique";
}

} // namespace

std::string export_dot(const Rmdp& m) {
    std::ostringstream os;
    os << "digraph rmdp {\n";
    os << "  rankdir=TB;\n";
    os << "  node [shape=box, fontname=\"monospace\"];\n";
    for (std::uint32_t i = 0; i < m.states.size(); ++i) {
        const auto& s = m.states[i];
        os << "  s" << i << " [label=\"s" << i << ": " << dot_escape(s.name);
        if (s.labels & kLabelTerm) os << "\\n[term]";
        if (s.labels & kLabelSink) os << "\\n[sink]";
        if (s.labels & kLabelBad) os << "\\n[bad]";
        if (!(s.reward == Rational(0))) os << "\\nreward " << s.reward.str();
        os << "\"";
        if (i == m.initial) os << ", penwidth=2";
        if (s.labels & kLabelBad) os << ", shape=octagon";
        if (s.labels & kLabelSink) os << ", shape=doublecircle";
        if (!s.expanded) os << ", style=dashed";
        os << "];\n";
    }
    for (std::uint32_t i = 0; i < m.states.size(); ++i) {
        for (const auto& c : m.states[i].choices) {
            for (const auto& [t, pr] : c.successors) {
                os << "  s" << i << " -> s" << t << " [label=\"";
                if (c.action != Action::Unique) os << action_name(c.action) << ", ";
                os << pr.str() << "\"];\n";
            }
        }
    }
    os << "}\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Explicit text format
// ---------------------------------------------------------------------------

namespace {

std::uint8_t label_from_name(const std::string& name, std::size_t line) {
    if (name == "term") return kLabelTerm;
    if (name == "sink") return kLabelSink;
    if (name == "bad") return kLabelBad;
    throw FormatError(line, "unknown label '" + name + "'");
}

struct LineReader {
    explicit LineReader(const std::string& s) : text(s) {}
    bool next(std::string& out, std::size_t& lineno) {
        while (pos < text.size()) {
            std::size_t end = text.find('\n', pos);
            if (end == std::string::npos) end = text.size();
            std::string line = text.substr(pos, end - pos);
            pos = end + 1;
            ++current;
            auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            bool blank = true;
            for (char c : line)
                if (!isspace(static_cast<unsigned char>(c))) blank = false;
            if (blank) continue;
            out = line;
            lineno = current;
            return true;
        }
        return false;
    }
    const std::string& text;
    std::size_t pos = 0;
    std::size_t current = 0;
};

void validate_model(Rmdp& m) {
    std::uint32_t n = static_cast<std::uint32_t>(m.states.size());
    if (m.initial >= n) throw InvariantError("initial state index out of range");

    // locate or create the sink
    std::optional<std::uint32_t> sink;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (m.states[i].labels & kLabelSink) {
            if (sink) throw InvariantError("more than one sink state");
            sink = i;
        }
        if ((m.states[i].labels & kLabelTerm) && (m.states[i].labels & kLabelBad))
            throw InvariantError("state " + std::to_string(i) +
                                 " carries both the term and the bad label");
        if (m.states[i].reward < Rational(0))
            throw InvariantError("state " + std::to_string(i) + " has negative reward");
    }
    auto ensure_sink = [&]() -> std::uint32_t {
        if (!sink) {
            Rmdp::StateInfo s;
            s.name = "<sink>";
            s.labels = kLabelSink;
            s.reward = Rational(0);
            s.expanded = true;
            m.states.push_back(std::move(s));
            sink = static_cast<std::uint32_t>(m.states.size() - 1);
        }
        return *sink;
    };

    // complete terminal structure: term/bad without transitions go to the
    // sink; the sink self-loops. ensure_sink may grow the state vector, so
    // index instead of holding references.
    for (std::uint32_t i = 0; i < m.states.size(); ++i) {
        if ((m.states[i].labels & (kLabelTerm | kLabelBad)) && m.states[i].choices.empty()) {
            std::uint32_t sk = ensure_sink();
            m.states[i].choices = {{Action::Unique, {{sk, Rational(1)}}}};
            m.states[i].expanded = true;
        }
    }
    if (sink && m.states[*sink].choices.empty()) {
        m.states[*sink].choices = {{Action::Unique, {{*sink, Rational(1)}}}};
        m.states[*sink].expanded = true;
    }

    n = static_cast<std::uint32_t>(m.states.size());
    for (std::uint32_t i = 0; i < n; ++i) {
        auto& s = m.states[i];
        bool left = false, right = false, unique = false;
        for (const auto& c : s.choices) {
            switch (c.action) {
            case Action::Unique: unique = true; break;
            case Action::Left: left = true; break;
            case Action::Right: right = true; break;
            }
            if (c.successors.empty())
                throw InvariantError("state " + std::to_string(i) + " has an empty distribution");
            Rational sum(0);
            for (const auto& [t, pr] : c.successors) {
                if (t >= n)
                    throw InvariantError("state " + std::to_string(i) +
                                         " has a transition to the undefined state " +
                                         std::to_string(t));
                if (pr <= Rational(0))
                    throw InvariantError("state " + std::to_string(i) +
                                         " has a non-positive transition probability");
                sum += pr;
            }
            if (!(sum == Rational(1)))
                throw InvariantError("distribution of state " + std::to_string(i) +
                                     " sums to " + sum.str() + ", not 1");
        }
        if (unique && (left || right))
            throw InvariantError("state " + std::to_string(i) +
                                 " mixes 'unique' with 'left'/'right' actions");
        if (s.choices.size() > 2)
            throw InvariantError("state " + std::to_string(i) + " has more than two actions");
        if ((s.labels & (kLabelTerm | kLabelBad)) != 0) {
            // the single successor must be the sink
            if (s.choices.size() != 1 || s.choices[0].successors.size() != 1 ||
                !(m.states[s.choices[0].successors[0].first].labels & kLabelSink))
                throw InvariantError("state " + std::to_string(i) +
                                     " is labeled term/bad but does not go directly to the sink");
        }
        s.expanded = s.expanded || !s.choices.empty();
    }
}

} // namespace

Rmdp load_explicit(const std::string& text) {
    LineReader reader(text);
    std::string line;
    std::size_t lineno = 0;
    if (!reader.next(line, lineno)) throw FormatError(1, "empty model file");

    Rmdp m;
    std::istringstream head(line);
    std::string kw;
    std::size_t n = 0;
    std::uint32_t initial = 0;
    head >> kw >> n;
    if (kw != "states" || head.fail())
        throw FormatError(lineno, "expected 'states <count> initial <index>'");
    head >> kw >> initial;
    if (kw != "initial" || head.fail())
        throw FormatError(lineno, "expected 'states <count> initial <index>'");
    m.states.resize(n);
    m.initial = initial;
    for (auto& s : m.states) {
        s.reward = Rational(0);
        s.expanded = false;
    }

    while (reader.next(line, lineno)) {
        std::istringstream is(line);
        is >> kw;
        if (kw == "state") {
            std::uint32_t idx;
            is >> idx;
            if (is.fail() || idx >= m.states.size())
                throw FormatError(lineno, "bad state index");
            std::string tok;
            is >> tok;
            if (tok != "labels") throw FormatError(lineno, "expected 'labels {..}'");
            is >> std::ws;
            std::string rest;
            std::getline(is, rest);
            auto open = rest.find('{');
            auto close = rest.find('}');
            if (open == std::string::npos || close == std::string::npos || close < open)
                throw FormatError(lineno, "expected '{..}' label set");
            std::string inside = rest.substr(open + 1, close - open - 1);
            std::uint8_t labels = kLabelNone;
            std::string name;
            for (char c : inside + ",") {
                if (c == ',' || isspace(static_cast<unsigned char>(c))) {
                    if (!name.empty()) labels |= label_from_name(name, lineno);
                    name.clear();
                } else {
                    name += c;
                }
            }
            std::istringstream tailis(rest.substr(close + 1));
            tailis >> tok;
            if (tok != "reward") throw FormatError(lineno, "expected 'reward <rational>'");
            std::string rat;
            tailis >> rat;
            if (rat.empty()) throw FormatError(lineno, "expected 'reward <rational>'");
            m.states[idx].labels = labels;
            try {
                m.states[idx].reward = Rational::parse(rat);
            } catch (const CpgclError&) {
                throw FormatError(lineno, "malformed rational '" + rat + "'");
            }
            std::string extra_name;
            if (std::getline(tailis >> std::ws, extra_name) && !extra_name.empty())
                m.states[idx].name = extra_name;
            if (m.states[idx].name.empty()) m.states[idx].name = "s" + std::to_string(idx);
        } else if (kw == "trans") {
            std::uint32_t idx;
            std::string act;
            is >> idx >> act;
            if (is.fail() || idx >= m.states.size())
                throw FormatError(lineno, "bad transition source index");
            Action a;
            if (act == "unique")
                a = Action::Unique;
            else if (act == "left")
                a = Action::Left;
            else if (act == "right")
                a = Action::Right;
            else
                throw FormatError(lineno, "unknown action '" + act + "'");
            std::string rest;
            std::getline(is, rest);
            auto open = rest.find('{');
            auto close = rest.find('}');
            if (open == std::string::npos || close == std::string::npos || close < open)
                throw FormatError(lineno, "expected '{ idx:prob, ... }'");
            std::string inside = rest.substr(open + 1, close - open - 1);
            Rmdp::Choice choice;
            choice.action = a;
            std::string entry;
            for (char c : inside + ",") {
                if (c == ',') {
                    std::string e;
                    for (char ec : entry)
                        if (!isspace(static_cast<unsigned char>(ec))) e += ec;
                    if (!e.empty()) {
                        auto colon = e.find(':');
                        if (colon == std::string::npos)
                            throw FormatError(lineno, "expected 'index:probability'");
                        std::uint32_t t;
                        try {
                            t = static_cast<std::uint32_t>(std::stoul(e.substr(0, colon)));
                        } catch (...) {
                            throw FormatError(lineno, "bad target index in '" + e + "'");
                        }
                        Rational pr;
                        try {
                            pr = Rational::parse(e.substr(colon + 1));
                        } catch (const CpgclError&) {
                            throw FormatError(lineno, "malformed probability in '" + e + "'");
                        }
                        choice.successors.emplace_back(t, std::move(pr));
                    }
                    entry.clear();
                } else {
                    entry += c;
                }
            }
            m.states[idx].choices.push_back(std::move(choice));
            m.states[idx].expanded = true;
        } else {
            throw FormatError(lineno, "unknown directive '" + kw + "'");
        }
    }
    for (std::uint32_t i = 0; i < m.states.size(); ++i)
        if (m.states[i].name.empty()) m.states[i].name = "s" + std::to_string(i);
    validate_model(m);
    return m;
}

std::string save_explicit(const Rmdp& m) {
    std::ostringstream os;
    os << "states " << m.states.size() << " initial " << m.initial << "\n";
    for (std::uint32_t i = 0; i < m.states.size(); ++i) {
        const auto& s = m.states[i];
        os << "state " << i << " labels {";
        bool first = true;
        for (auto [bit, name] : {std::pair<std::uint8_t, const char*>{kLabelTerm, "term"},
                                 {kLabelSink, "sink"},
                                 {kLabelBad, "bad"}}) {
            if (s.labels & bit) {
                if (!first) os << ", ";
                os << name;
                first = false;
            }
        }
        os << "} reward " << s.reward.str();
        if (!s.name.empty() && s.name != "s" + std::to_string(i)) os << " " << s.name;
        os << "\n";
    }
    for (std::uint32_t i = 0; i < m.states.size(); ++i) {
        for (const auto& c : m.states[i].choices) {
            os << "trans " << i << " " << action_name(c.action) << " { ";
            for (std::size_t k = 0; k < c.successors.size(); ++k) {
                if (k) os << ", ";
                os << c.successors[k].first << ":" << c.successors[k].second.str();
            }
            os << " }\n";
        }
    }
    return os.str();
}

} // namespace cpgcl
