// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cpgcl {

/// Base class for all engine errors. Subcommands catch this at the top
/// level and map it to a diagnostic on the error stream plus exit code 1.
class CpgclError : public std::runtime_error {
public:
    explicit CpgclError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed program or expectation text. Positions are 1-based.
class SyntaxError : public CpgclError {
public:
    SyntaxError(std::size_t line, std::size_t column, const std::string& msg)
        : CpgclError("syntax error at " + std::to_string(line) + ":" +
                     std::to_string(column) + ": " + msg),
          line(line), column(column) {}
    std::size_t line;
    std::size_t column;
};

/// Static validation failure (probability range, scoping, reserved names).
class ValidationError : public CpgclError {
public:
    explicit ValidationError(const std::string& msg) : CpgclError(msg) {}
};

class EvaluationError : public CpgclError {
public:
    explicit EvaluationError(const std::string& msg) : CpgclError(msg) {}
};

/// A post-expectation evaluated to a negative value, i.e. it is not a
/// valid expectation at the offending state.
class NegativeExpectation : public EvaluationError {
public:
    explicit NegativeExpectation(const std::string& msg) : EvaluationError(msg) {}
};

/// A bounded expectation (or reward) exceeded 1, resp. the declared bound.
class BoundExceeded : public CpgclError {
public:
    explicit BoundExceeded(const std::string& msg) : CpgclError(msg) {}
};

/// Conditional transformers have no rule for nondeterministic choice:
/// positional information does not determine the conditional value.
class NondeterminismUnsupported : public CpgclError {
public:
    explicit NondeterminismUnsupported(const std::string& where)
        : CpgclError("nondeterministic choice is not supported " + where +
                     "; the minimizing decision depends on the context of the "
                     "state, so no inductive rule exists") {}
};

class UninstantiatedParameter : public CpgclError {
public:
    explicit UninstantiatedParameter(const std::string& name)
        : CpgclError("parameter '" + name + "' must be instantiated first"),
          name(name) {}
    std::string name;
};

class QuotientProbabilityUnsupported : public CpgclError {
public:
    QuotientProbabilityUnsupported()
        : CpgclError("state-dependent quotient probabilities are not supported "
                     "in symbolic mode; analyze the program operationally") {}
};

class ParameterError : public CpgclError {
public:
    explicit ParameterError(const std::string& msg) : CpgclError(msg) {}
};

/// Expected reward diverges (stands in for an infinite value).
class NonConvergent : public CpgclError {
public:
    explicit NonConvergent(const std::string& msg) : CpgclError(msg) {}
};

class LoopFixpointNotFound : public CpgclError {
public:
    explicit LoopFixpointNotFound(const std::string& where)
        : CpgclError("no syntactic fixpoint found for loop " + where) {}
};

/// The loop fails the syntactic iid criterion; names the offending variable.
class NotIid : public CpgclError {
public:
    explicit NotIid(const std::string& variable)
        : CpgclError("loop is not iid: data may flow across iterations through '" +
                     variable + "'"),
          variable(variable) {}
    std::string variable;
};

class CyclicNondeterminism : public CpgclError {
public:
    CyclicNondeterminism()
        : CpgclError("model has a cycle through a nondeterministic state; "
                     "scheduler enumeration is restricted to models whose cycles "
                     "are fully probabilistic") {}
};

class BudgetExceeded : public CpgclError {
public:
    BudgetExceeded(std::size_t n, std::size_t budget)
        : CpgclError("model has " + std::to_string(n) +
                     " nondeterministic states, exceeding the enumeration budget of " +
                     std::to_string(budget)) {}
};

/// Explicit model format errors carry the offending line number.
class FormatError : public CpgclError {
public:
    FormatError(std::size_t line, const std::string& msg)
        : CpgclError("format error at line " + std::to_string(line) + ": " + msg),
          line(line) {}
    std::size_t line;
};

class InvariantError : public CpgclError {
public:
    explicit InvariantError(const std::string& msg) : CpgclError(msg) {}
};

} // namespace cpgcl
