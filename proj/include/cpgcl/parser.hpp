// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cpgcl/ast.hpp"
#include "cpgcl/expectation.hpp"

#include <string>

namespace cpgcl {

/// Parses program text (grammar in the README). Every input either yields a
/// Program or throws a located SyntaxError; probability constants outside
/// [0,1] raise ValidationError.
Program parse_program(const std::string& text);

/// Parses the expectation surface syntax "[G]*(poly) + ...", "min(e, e)",
/// "inf". Used for user-supplied post-expectations (--post).
Expectation parse_expectation(const std::string& text);

/// Parses a boolean expression on its own (used by expectation syntax).
BExpPtr parse_bexp_text(const std::string& text);

} // namespace cpgcl
