// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cpgcl/ast.hpp"

#include <string>
#include <vector>

namespace cpgcl {

struct Violation {
    enum class Kind { Scope, ParamScope, Range, Reserved, ParamVarClash };
    Kind kind;
    std::string subject;
    std::string message;
};

/// Static validation: variable/parameter scoping, probability ranges,
/// reserved-name use. Returns the full list of violations, never throws.
/// Transformation-generated programs are revalidated with
/// allow_reserved = true since the "__" prefix is reserved for them.
std::vector<Violation> validate(const Program& p, bool allow_reserved = false);

/// Renders a violation list for diagnostics.
std::string describe(const std::vector<Violation>& vs);

} // namespace cpgcl
