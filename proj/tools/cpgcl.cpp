// SPDX-License-Identifier: Apache-2.0
//
// Command-line frontend: analysis, bounds, transformations, model export,
// cross-engine checks, and parameter sweeps over cpGCL programs.

#include "cpgcl/checks.hpp"
#include "cpgcl/errors.hpp"
#include "cpgcl/parser.hpp"
#include "cpgcl/rmdp.hpp"
#include "cpgcl/solver.hpp"
#include "cpgcl/transform.hpp"
#include "cpgcl/transformer.hpp"
#include "cpgcl/validate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace cpgcl;
using nlohmann::json;

namespace {

std::string corpus_dir() {
    const char* env = std::getenv("CPGCL_EXAMPLES");
    return env ? env : "corpus";
}

/// Reads a file; bare names fall back to the example corpus directory
/// (overridable through CPGCL_EXAMPLES).
std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in && path.find('/') == std::string::npos) {
        in = std::ifstream(corpus_dir() + "/" + path);
        if (in) {
            std::ostringstream os;
            os << in.rdbuf();
            return os.str();
        }
    }
    if (!in) throw CpgclError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

bool is_explicit_model(const std::string& path) {
    return path.size() > 5 && path.substr(path.size() - 5) == ".rmdp";
}

struct Bindings {
    std::map<std::string, Rational> params;
    std::map<std::string, BigInt> inits;
};

/// Splits "--name value" leftovers plus --init/--param lists into parameter
/// and initial-state bindings, guided by the program's declarations.
Bindings resolve_bindings(const Program& p,
                          const std::vector<std::pair<std::string, std::string>>& raw) {
    Bindings b;
    for (const auto& [name, value] : raw) {
        if (p.params.count(name)) {
            b.params[name] = Rational::parse(value);
        } else {
            bool declared = false;
            for (const auto& v : p.declared_vars) declared |= v == name;
            if (!declared)
                throw ParameterError("'" + name +
                                     "' is neither a parameter nor a variable of the program");
            Rational r = Rational::parse(value);
            if (!r.is_integer())
                throw ParameterError("initial value for variable '" + name +
                                     "' must be an integer, got " + value);
            b.inits[name] = r.num();
        }
    }
    return b;
}

void split_kv_list(const std::string& list, std::vector<std::pair<std::string, std::string>>& out) {
    std::string item;
    std::istringstream is(list);
    while (std::getline(is, item, ',')) {
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ParameterError("expected name=value, got '" + item + "'");
        out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    }
}

/// Leftover "--name value" pairs (dynamic parameter flags).
std::vector<std::pair<std::string, std::string>> dynamic_flags(
    const std::vector<std::string>& extras) {
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t i = 0; i < extras.size(); ++i) {
        const std::string& flag = extras[i];
        if (flag.rfind("--", 0) != 0 || flag.size() <= 2)
            throw ParameterError("unexpected argument '" + flag + "'");
        if (i + 1 >= extras.size())
            throw ParameterError("flag '" + flag + "' is missing its value");
        out.emplace_back(flag.substr(2), extras[++i]);
    }
    return out;
}

enum class Format { Text, Tsv, Json };

Format parse_format(const std::string& f) {
    if (f == "text") return Format::Text;
    if (f == "tsv") return Format::Tsv;
    if (f == "json") return Format::Json;
    throw ParameterError("unknown format '" + f + "'");
}

json value_to_json(const AnalysisValue& v) {
    json j;
    switch (v.kind) {
    case AnalysisValue::Kind::Undefined:
        j["kind"] = "undefined";
        break;
    case AnalysisValue::Kind::Exact:
        j["kind"] = "exact";
        j["value"] = v.value().str();
        j["decimal"] = v.value().decimal();
        break;
    case AnalysisValue::Kind::Interval:
        j["kind"] = "interval";
        j["lo"] = v.lo.str();
        j["hi"] = v.hi.str();
        j["decimal_lo"] = v.lo.decimal();
        j["decimal_hi"] = v.hi.decimal();
        break;
    }
    return j;
}

/// Machine-oriented rendering: exact rationals only, no decimal echo.
std::string tsv_value(const AnalysisValue& v) {
    switch (v.kind) {
    case AnalysisValue::Kind::Undefined: return "undefined";
    case AnalysisValue::Kind::Exact: return v.value().str();
    case AnalysisValue::Kind::Interval: return v.lo.str() + ".." + v.hi.str();
    }
    return "";
}

std::string scheduler_str(const Rmdp& m, const SchedulerAssignment& s) {
    if (s.empty()) return "{}";
    std::string out = "{";
    bool first = true;
    for (const auto& [idx, a] : s) {
        if (!first) out += ", ";
        first = false;
        out += "s" + std::to_string(idx) + ": " + (a == Action::Left ? "left" : "right");
        (void)m;
    }
    return out + "}";
}

struct AnalyzeOptions {
    std::string file;
    std::string post = "1";
    std::string post_bound;
    std::string init_list, param_list;
    unsigned unroll = kDefaultUnroll;
    std::size_t max_states = 100000;
    std::string engine = "auto";
    std::string format = "text";
    bool table = false;
    bool liberal = false;
    bool schedulers = false;
    std::size_t budget = 20;
    long initial_override = -1;
    bool serial = false;
};

int run_model_analysis(const Rmdp& model, const AnalyzeOptions& opt, Format fmt) {
    Rmdp m = model;
    if (opt.initial_override >= 0)
        m = reroot(m, static_cast<std::uint32_t>(opt.initial_override));

    if (m.nondeterministic_states().empty() && !opt.schedulers) {
        AnalysisValue v = conditional_expected_reward(m, opt.liberal);
        switch (fmt) {
        case Format::Text:
            std::cout << v.str() << "\n";
            if (v.is_undefined())
                std::cout << "(the condition has probability 0: 0/0)\n";
            break;
        case Format::Tsv: std::cout << tsv_value(v) << "\n"; break;
        case Format::Json: {
            json j = value_to_json(v);
            j["engine"] = "operational";
            std::cout << j.dump(2) << "\n";
            break;
        }
        }
        return 0;
    }

    MinConditionalResult r = min_conditional(m, opt.budget, opt.liberal, !opt.serial);
    auto nd = m.nondeterministic_states();
    if (fmt == Format::Json) {
        json j;
        j["minimum"] = value_to_json(r.value);
        j["scheduler"] = scheduler_str(m, r.scheduler);
        json all = json::array();
        for (std::size_t bits = 0; bits < r.enumerated.size(); ++bits) {
            SchedulerAssignment s;
            for (std::size_t i = 0; i < nd.size(); ++i)
                s[nd[i]] = (bits >> i) & 1u ? Action::Right : Action::Left;
            all.push_back({{"scheduler", scheduler_str(m, s)},
                           {"value", value_to_json(r.enumerated[bits])}});
        }
        j["enumerated"] = all;
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    if (opt.schedulers || fmt == Format::Tsv) {
        for (std::size_t bits = 0; bits < r.enumerated.size(); ++bits) {
            SchedulerAssignment s;
            for (std::size_t i = 0; i < nd.size(); ++i)
                s[nd[i]] = (bits >> i) & 1u ? Action::Right : Action::Left;
            if (fmt == Format::Tsv)
                std::cout << scheduler_str(m, s) << "\t" << tsv_value(r.enumerated[bits])
                          << "\n";
            else
                std::cout << "scheduler " << scheduler_str(m, s) << " -> "
                          << r.enumerated[bits].str() << "\n";
        }
    }
    if (fmt == Format::Tsv)
        std::cout << "minimum\t" << tsv_value(r.value) << "\n";
    else
        std::cout << "minimum: " << r.value.str() << " via " << scheduler_str(m, r.scheduler)
                  << "\n";
    return 0;
}

int cmd_analyze(const AnalyzeOptions& opt,
                const std::vector<std::pair<std::string, std::string>>& raw_bindings) {
    Format fmt = parse_format(opt.format);

    if (is_explicit_model(opt.file)) {
        Rmdp m = load_explicit(read_file(opt.file));
        return run_model_analysis(m, opt, fmt);
    }

    Program p = parse_program(read_file(opt.file));
    auto violations = validate(p);
    if (!violations.empty()) throw ValidationError(describe(violations));
    Bindings b = resolve_bindings(p, raw_bindings);
    Program inst = p.params.empty() ? p : instantiate_params(p, b.params);
    State sigma = total_state(inst, State(b.inits));
    Expectation f = parse_expectation(opt.post);

    if (!inst.fully_probabilistic()) {
        // demonic analysis over the operational model
        Rmdp m = build(inst, sigma, f, opt.max_states);
        return run_model_analysis(m, opt, fmt);
    }

    if (opt.table) {
        QuotientTable t = quotient_table(inst, f, sigma, opt.unroll);
        if (fmt == Format::Json) {
            json j;
            const char* names[4] = {"wp_over_wlp1", "wlp_over_wlp1", "wp_over_wp1",
                                    "wlp_over_wp1"};
            for (int i = 0; i < 4; ++i) {
                j[names[i]] = value_to_json(t.values[i]);
                if (t.not_a_probability[i]) j[names[i]]["not_a_probability"] = true;
            }
            std::cout << j.dump(2) << "\n";
        } else {
            const char* sep = fmt == Format::Tsv ? "\t" : " ";
            for (int i = 0; i < 4; ++i)
                std::cout << (fmt == Format::Tsv ? tsv_value(t.values[i]) : t.values[i].str())
                          << (i == 3 ? "" : sep);
            std::cout << "\n";
            for (int i = 0; i < 4; ++i)
                if (t.not_a_probability[i] && fmt == Format::Text)
                    std::cerr << "note: quotient " << i + 1
                              << " exceeds 1 (not a probability)\n";
        }
        return 0;
    }

    AnalysisValue v;
    std::string engine_used = "denotational";
    bool fallback = opt.engine == "auto";
    std::optional<Rational> bound;
    if (!opt.post_bound.empty()) bound = Rational::parse(opt.post_bound);
    if (opt.engine == "operational") {
        Rmdp m = build(inst, sigma, f, opt.max_states);
        v = conditional_expected_reward(m, opt.liberal);
        engine_used = "operational";
    } else {
        try {
            v = opt.liberal ? cwlp(inst, f, sigma, opt.unroll)
                            : cwp(inst, f, sigma, opt.unroll);
        } catch (const NonConvergent&) {
            // loops without a syntactic fixpoint: prefer the unfolding when
            // it closes into a finite model, else fall back to the
            // denotational interval under a declared bound
            if (fallback) {
                Rmdp m = build(inst, sigma, f, opt.max_states);
                if (!m.has_frontier()) {
                    v = conditional_expected_reward(m, opt.liberal);
                    engine_used = "operational";
                } else if (bound && !opt.liberal) {
                    v = cwp(inst, f, sigma, opt.unroll, bound);
                } else {
                    throw NonConvergent(
                        "no fixpoint and the unfolding stays partial; use the "
                        "bounds subcommand or supply --post-bound");
                }
            } else if (bound && !opt.liberal) {
                v = cwp(inst, f, sigma, opt.unroll, bound);
            } else {
                throw;
            }
        }
    }

    switch (fmt) {
    case Format::Text:
        std::cout << v.str() << "\n";
        if (v.is_undefined())
            std::cout << "(program is infeasible from the initial state: 0/0)\n";
        break;
    case Format::Tsv: std::cout << tsv_value(v) << "\n"; break;
    case Format::Json: {
        json j = value_to_json(v);
        j["engine"] = engine_used;
        std::cout << j.dump(2) << "\n";
        break;
    }
    }
    return 0;
}

struct BoundsOptions {
    std::string file;
    std::string post = "1";
    std::string post_bound;
    std::string tol = "1e-6";
    std::size_t max_states = 2000000;
    std::string format = "text";
    bool liberal = false;
};

int cmd_bounds(const BoundsOptions& opt,
               const std::vector<std::pair<std::string, std::string>>& raw_bindings) {
    Format fmt = parse_format(opt.format);
    Program p = parse_program(read_file(opt.file));
    Bindings b = resolve_bindings(p, raw_bindings);
    Program inst = p.params.empty() ? p : instantiate_params(p, b.params);
    if (!inst.fully_probabilistic())
        throw NondeterminismUnsupported("by interval bounds");
    State sigma = total_state(inst, State(b.inits));
    Expectation f = parse_expectation(opt.post);
    Rational bound = Rational::parse(opt.post_bound);
    Rational tol = Rational::parse(opt.tol);

    std::size_t states = 512;
    BoundedConditional last;
    while (true) {
        if (states > opt.max_states) states = opt.max_states;
        Rmdp m = build(inst, sigma, f, states);
        if (!m.has_frontier()) {
            AnalysisValue v = conditional_expected_reward(m, opt.liberal);
            if (fmt == Format::Json) {
                json j = value_to_json(v);
                j["states"] = m.states.size();
                j["exact"] = true;
                std::cout << j.dump(2) << "\n";
            } else {
                std::cout << "states " << m.states.size() << ": " << v.str()
                          << " (exact)\n";
            }
            return 0;
        }
        last = bounded_conditional(m, bound, opt.liberal);
        if (fmt == Format::Json) {
            json j = value_to_json(last.value);
            j["states"] = m.states.size();
            j["frontier"] = last.frontier_size;
            j["unresolved_mass"] = last.unresolved_mass.str();
            std::cout << j.dump(2) << "\n";
        } else {
            std::cout << "states " << m.states.size() << ": " << last.value.str();
            if (!last.value.is_undefined())
                std::cout << " width " << last.value.width().decimal(3);
            std::cout << " (frontier " << last.frontier_size << ")\n";
        }
        bool done = last.value.is_undefined() ||
                    (last.value.kind != AnalysisValue::Kind::Interval) ||
                    last.value.width() < tol;
        if (done) return 0;
        if (states >= opt.max_states) {
            std::cerr << "note: state limit reached before the requested width; "
                         "the last interval is sound\n";
            return 0;
        }
        states *= 2;
    }
}

int cmd_transform(const std::string& mode, const std::string& file, bool simplify,
                  const std::vector<std::pair<std::string, std::string>>& raw_bindings) {
    Program p = parse_program(read_file(file));
    Bindings b = resolve_bindings(p, raw_bindings);

    Program out;
    std::string trailer;
    if (mode == "hoist") {
        Program inst = p.params.empty() ? p : instantiate_params(p, b.params);
        HoistProgramResult r = hoist_program(inst);
        out = r.program;
        if (simplify) out = make_program(simplify_stmt(out.body));
        trailer = "// h: " + r.h.str();
    } else if (mode == "deobserve") {
        Program inst = b.params.empty() ? p : instantiate_params(p, b.params);
        out = observe_to_loop(inst);
        if (simplify) out = make_program(simplify_stmt(out.body));
    } else if (mode == "deloop") {
        Program inst = b.params.empty() ? p : instantiate_params(p, b.params);
        // rewrite the unique outermost loop in place
        std::function<StmtPtr(const StmtPtr&, bool&)> rewrite =
            [&](const StmtPtr& s, bool& found) -> StmtPtr {
            if (s->kind == Stmt::Kind::While) {
                if (found) throw CpgclError("program has more than one outermost loop");
                found = true;
                return loop_to_observe(*s);
            }
            if (s->kind == Stmt::Kind::Seq) {
                bool f1 = false, f2 = false;
                StmtPtr a = rewrite(s->first, f1);
                StmtPtr c = rewrite(s->second, f2);
                if (f1 && f2) throw CpgclError("program has more than one outermost loop");
                found = f1 || f2;
                return sseq(a, c);
            }
            return s;
        };
        bool found = false;
        StmtPtr body = rewrite(inst.body, found);
        if (!found) throw CpgclError("program has no outermost loop to rewrite");
        out = make_program(body);
        if (simplify) out = make_program(simplify_stmt(out.body));
    } else {
        throw ParameterError("unknown transformation '" + mode + "'");
    }

    auto violations = validate(out, /*allow_reserved=*/true);
    if (!violations.empty())
        throw ValidationError("transformed program fails validation:\n" + describe(violations));
    std::cout << pretty_print(out) << "\n";
    if (!trailer.empty()) std::cout << trailer << "\n";
    return 0;
}

int cmd_model(const std::string& file, bool dot, bool explicit_out, std::size_t max_states,
              const std::vector<std::pair<std::string, std::string>>& raw_bindings,
              const std::string& post) {
    Rmdp m;
    if (is_explicit_model(file)) {
        m = load_explicit(read_file(file));
    } else {
        Program p = parse_program(read_file(file));
        Bindings b = resolve_bindings(p, raw_bindings);
        Program inst = p.params.empty() ? p : instantiate_params(p, b.params);
        State sigma = total_state(inst, State(b.inits));
        m = build(inst, sigma, parse_expectation(post), max_states);
    }
    if (explicit_out && !dot)
        std::cout << save_explicit(m);
    else
        std::cout << export_dot(m);
    return 0;
}

/// Frozen values of the named example corpus, rechecked from the shipped
/// program files.
CheckResult check_corpus() {
    CheckResult r;
    r.name = "corpus";
    auto expect = [&](bool ok, const std::string& what) {
        ++r.tested;
        if (!ok) {
            ++r.failed;
            if (r.first_failure.empty()) r.first_failure = what;
        }
    };
    auto prog = [&](const std::string& name) { return parse_program(read_file(name)); };

    Program obs1 = prog("p_obs1.cpgcl");
    expect(cwp(obs1, parse_expectation("x"), total_state(obs1)) ==
               AnalysisValue::exact(Rational(1)),
           "conditioned coin flip");
    Program obs2 = prog("p_obs2.cpgcl");
    expect(cwp(obs2, parse_expectation("x"), total_state(obs2)) ==
               AnalysisValue::exact(Rational(1)),
           "conditioned coin flip, pushed-in form");
    Program ex2 = prog("example2.cpgcl");
    expect(cwp(ex2, parse_expectation("10 + x"), total_state(ex2)) ==
               AnalysisValue::exact(Rational(135, 13)),
           "two-coin program");
    Program ac = prog("abort_coin.cpgcl");
    QuotientTable t = quotient_table(ac, parse_expectation("[y = 0]"), total_state(ac));
    expect(t.values[0] == AnalysisValue::exact(Rational(2, 7)) &&
               t.values[1] == AnalysisValue::exact(Rational(6, 7)) &&
               t.values[2] == AnalysisValue::exact(Rational(2, 3)) &&
               t.values[3] == AnalysisValue::exact(Rational(2)),
           "abort-coin quotient table");
    Program dv = prog("p_div.cpgcl");
    expect(cwp(dv, parse_expectation("x"), total_state(dv)) ==
               AnalysisValue::exact(Rational(0)),
           "diverging loop");
    Program andiv = prog("p_andiv.cpgcl");
    expect(conditional_expected_reward(
               build(andiv, total_state(andiv), parse_expectation("x")))
               .is_undefined(),
           "almost-surely-blocked loop");
    Program e1 = instantiate_params(prog("example1.cpgcl"), {{"q", Rational(1, 2)}});
    MinConditionalResult mc =
        min_conditional(build(e1, total_state(e1), parse_expectation("x")));
    expect(mc.enumerated[0] == AnalysisValue::exact(Rational(5)) &&
               mc.enumerated[1].is_undefined() && mc.value.is_undefined(),
           "demonic choice under conditioning");
    Rmdp fig4 = load_explicit(read_file("fig4.rmdp"));
    MinConditionalResult f4 = min_conditional(fig4);
    expect(f4.enumerated[0] == AnalysisValue::exact(Rational(3, 2)) &&
               f4.enumerated[1] == AnalysisValue::exact(Rational(7, 5)),
           "counterexample model");
    HoistProgramResult hr = hoist_program(ex2);
    expect(hr.h.constant_value() == Rational(13, 20) &&
               hr.program.body->first->prob.value == Rational(8, 13),
           "hoisting the two-coin program");
    return r;
}

int cmd_check(const std::string& property, std::size_t n, std::uint64_t seed) {
    std::vector<CheckResult> results;
    if (property == "all") {
        results = run_all_checks(seed);
        results.push_back(check_corpus());
    } else if (property == "corpus") {
        results.push_back(check_corpus());
    } else {
        results.push_back(run_check(property, seed, n));
    }
    bool all_pass = true;
    for (const auto& r : results) {
        std::cout << r.summary() << "\n";
        all_pass &= r.pass();
    }
    std::cout << (all_pass ? "all properties hold" : "property failures found") << "\n";
    return 0; // failures are report content, not engine errors
}

struct SweepOptions {
    std::string file;
    std::string post = "1";
    std::string post_bound;
    std::string tol = "1e-6";
    std::size_t max_states = 2000000;
    std::string format = "text";
    bool serial = false;
    bool liberal = false;
};

std::vector<std::string> expand_grid_values(const std::string& spec) {
    std::vector<std::string> out;
    if (spec.empty()) return out;
    auto dots = spec.find("..");
    if (dots != std::string::npos) {
        long lo = std::stol(spec.substr(0, dots));
        long hi = std::stol(spec.substr(dots + 2));
        for (long v = lo; v <= hi; ++v) out.push_back(std::to_string(v));
        return out;
    }
    std::istringstream is(spec);
    std::string item;
    while (std::getline(is, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

int cmd_sweep(const SweepOptions& opt,
              const std::vector<std::pair<std::string, std::string>>& raw) {
    Format fmt = parse_format(opt.format);
    Program p = parse_program(read_file(opt.file));

    std::vector<std::pair<std::string, std::vector<std::string>>> grid;
    for (const auto& [name, values] : raw) grid.emplace_back(name, expand_grid_values(values));

    std::size_t rows = grid.empty() ? 0 : 1;
    for (const auto& [name, values] : grid) rows *= values.size();

    std::vector<std::string> outputs(rows);
    std::exception_ptr error;

    auto run_row = [&](std::size_t row) {
        std::vector<std::pair<std::string, std::string>> bindings;
        std::size_t rest = row;
        for (std::size_t g = grid.size(); g-- > 0;) {
            const auto& [name, values] = grid[g];
            bindings.emplace_back(name, values[rest % values.size()]);
            rest /= values.size();
        }
        std::reverse(bindings.begin(), bindings.end());

        Bindings b = resolve_bindings(p, bindings);
        Program inst = p.params.empty() ? p : instantiate_params(p, b.params);
        State sigma = total_state(inst, State(b.inits));
        Expectation f = parse_expectation(opt.post);

        AnalysisValue v;
        if (!opt.post_bound.empty()) {
            Rational bound = Rational::parse(opt.post_bound);
            Rational tol = Rational::parse(opt.tol);
            std::size_t states = 512;
            while (true) {
                if (states > opt.max_states) states = opt.max_states;
                Rmdp m = build(inst, sigma, f, states);
                if (!m.has_frontier()) {
                    v = conditional_expected_reward(m, opt.liberal);
                    break;
                }
                BoundedConditional bc = bounded_conditional(m, bound, opt.liberal);
                v = bc.value;
                if (v.is_undefined() || v.kind != AnalysisValue::Kind::Interval ||
                    v.width() < tol || states >= opt.max_states)
                    break;
                states *= 2;
            }
        } else {
            try {
                v = opt.liberal ? cwlp(inst, f, sigma) : cwp(inst, f, sigma);
            } catch (const NonConvergent&) {
                Rmdp m = build(inst, sigma, f, opt.max_states);
                v = conditional_expected_reward(m, opt.liberal);
            }
        }

        std::ostringstream os;
        if (fmt == Format::Json) {
            json j;
            for (const auto& [name, value] : bindings) j["bindings"][name] = value;
            j["value"] = value_to_json(v);
            os << j.dump();
        } else {
            if (fmt == Format::Tsv) {
                for (const auto& [name, value] : bindings) os << value << "\t";
                os << tsv_value(v);
            } else {
                for (const auto& [name, value] : bindings) os << name << "=" << value << " ";
                os << v.str();
            }
        }
        outputs[row] = os.str();
    };

#ifdef _OPENMP
    if (!opt.serial && rows > 1) {
#pragma omp parallel for schedule(dynamic)
        for (long long row = 0; row < static_cast<long long>(rows); ++row) {
            if (error) continue;
            try {
                run_row(static_cast<std::size_t>(row));
            } catch (...) {
#pragma omp critical
                if (!error) error = std::current_exception();
            }
        }
    } else
#endif
    {
        for (std::size_t row = 0; row < rows; ++row) run_row(row);
    }
    if (error) std::rethrow_exception(error);

    if (fmt == Format::Json) {
        std::cout << "[";
        for (std::size_t row = 0; row < rows; ++row)
            std::cout << (row ? ",\n " : "\n ") << outputs[row];
        std::cout << (rows ? "\n" : "") << "]\n";
    } else {
        for (const auto& line : outputs) std::cout << line << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact analysis of probabilistic programs with conditioning"};
    app.require_subcommand(1);

    AnalyzeOptions an;
    auto* analyze = app.add_subcommand("analyze",
                                       "conditional expected value of a program or model");
    analyze->add_option("file", an.file, "program (.cpgcl) or explicit model (.rmdp)")
        ->required();
    analyze->add_option("--post", an.post, "post-expectation (default 1)");
    analyze->add_option("--post-bound", an.post_bound,
                        "bound on the post-expectation; enables intervals for "
                        "non-closing loops");
    analyze->add_option("--init", an.init_list, "initial state bindings x=1,y=2");
    analyze->add_option("--param", an.param_list, "parameter bindings p=1/2,q=1/3");
    analyze->add_option("--unroll", an.unroll, "loop unrolling depth");
    analyze->add_option("--max-states", an.max_states, "state limit for the model engine");
    analyze->add_option("--engine", an.engine, "auto|denotational|operational");
    analyze->add_option("--format", an.format, "text|tsv|json");
    analyze->add_flag("--table", an.table, "print the four normalization quotients");
    analyze->add_flag("--liberal", an.liberal, "liberal semantics (diverging runs count)");
    analyze->add_flag("--schedulers", an.schedulers, "list every scheduler's value");
    analyze->add_option("--budget", an.budget, "scheduler enumeration budget");
    analyze->add_option("--initial", an.initial_override, "initial state override (.rmdp)");
    analyze->add_flag("--serial", an.serial, "disable parallel enumeration");
    analyze->allow_extras();

    BoundsOptions bo;
    auto* bounds = app.add_subcommand("bounds", "converging interval for loopy programs");
    bounds->add_option("file", bo.file)->required();
    bounds->add_option("--post", bo.post, "post-expectation");
    bounds->add_option("--post-bound", bo.post_bound, "upper bound on the post-expectation")
        ->required();
    bounds->add_option("--tol", bo.tol, "target interval width");
    bounds->add_option("--max-states", bo.max_states, "exploration limit");
    bounds->add_option("--format", bo.format, "text|tsv|json");
    bounds->add_flag("--liberal", bo.liberal, "liberal semantics");
    bounds->allow_extras();

    std::string tr_mode, tr_file;
    bool tr_simplify = false;
    auto* transform = app.add_subcommand("transform", "source-to-source transformations");
    transform->add_option("mode", tr_mode, "hoist|deobserve|deloop")->required();
    transform->add_option("file", tr_file)->required();
    transform->add_flag("--simplify", tr_simplify, "dead-branch and unit cleanup");
    transform->allow_extras();

    std::string mo_file, mo_post = "1";
    bool mo_dot = false, mo_explicit = false;
    std::size_t mo_max_states = 100000;
    auto* model = app.add_subcommand("model", "export the operational model");
    model->add_option("file", mo_file)->required();
    model->add_flag("--dot", mo_dot, "DOT output (default)");
    model->add_flag("--explicit", mo_explicit, "explicit text format");
    model->add_option("--post", mo_post, "post-expectation for rewards");
    model->add_option("--max-states", mo_max_states, "exploration limit");
    model->allow_extras();

    std::string ch_property = "all";
    std::size_t ch_n = 200;
    std::uint64_t ch_seed = 20240101;
    auto* check = app.add_subcommand("check", "randomized cross-engine property suites");
    check->add_option("--property", ch_property, "suite name or 'all'");
    check->add_option("--n", ch_n, "instances per suite");
    check->add_option("--seed", ch_seed, "generator seed");

    SweepOptions sw;
    auto* sweep = app.add_subcommand("sweep", "tabulate a grid of instantiations");
    sweep->add_option("file", sw.file)->required();
    sweep->add_option("--post", sw.post, "post-expectation");
    sweep->add_option("--post-bound", sw.post_bound, "bound for loopy analyses");
    sweep->add_option("--tol", sw.tol, "interval width target");
    sweep->add_option("--max-states", sw.max_states, "exploration limit");
    sweep->add_option("--format", sw.format, "text|tsv|json");
    sweep->add_flag("--serial", sw.serial, "row-by-row execution");
    sweep->add_flag("--liberal", sw.liberal, "liberal semantics");
    sweep->allow_extras();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*analyze) {
            auto raw = dynamic_flags(analyze->remaining());
            if (!an.init_list.empty()) split_kv_list(an.init_list, raw);
            if (!an.param_list.empty()) split_kv_list(an.param_list, raw);
            return cmd_analyze(an, raw);
        }
        if (*bounds) {
            auto raw = dynamic_flags(bounds->remaining());
            return cmd_bounds(bo, raw);
        }
        if (*transform) {
            auto raw = dynamic_flags(transform->remaining());
            return cmd_transform(tr_mode, tr_file, tr_simplify, raw);
        }
        if (*model) {
            auto raw = dynamic_flags(model->remaining());
            return cmd_model(mo_file, mo_dot, mo_explicit, mo_max_states, raw, mo_post);
        }
        if (*check) return cmd_check(ch_property, ch_n, ch_seed);
        if (*sweep) {
            auto raw = dynamic_flags(sweep->remaining());
            return cmd_sweep(sw, raw);
        }
    } catch (const CpgclError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
