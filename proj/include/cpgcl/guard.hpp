// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cpgcl/ast.hpp"
#include "cpgcl/poly.hpp"

#include <memory>
#include <vector>

namespace cpgcl {

/// Relation of a comparison atom `poly REL 0`. Gt/Ge are normalized away.
enum class Rel { Eq, Ne, Lt, Le };

/// Canonical guard form used inside expectations. Construction normalizes:
/// constant atoms fold to True/False, atom polynomials are integer with
/// content 1 (sign-normalized for Eq/Ne), negation is pushed onto atoms,
/// And/Or are flattened, sorted, deduplicated, and complementary literal
/// pairs collapse. Syntactic equality of the result is the (sound,
/// incomplete) equality test used for fixpoint detection.
struct Guard;
using GuardPtr = std::shared_ptr<const Guard>;

struct Guard {
    enum class Kind { True, False, Atom, And, Or };
    Kind kind;
    Rel rel = Rel::Eq;           // Atom
    Poly poly;                   // Atom
    std::vector<GuardPtr> kids;  // And/Or; size >= 2
};

GuardPtr gtrue();
GuardPtr gfalse();
GuardPtr gatom(Rel rel, Poly p);
GuardPtr gand(std::vector<GuardPtr> kids);
GuardPtr gor(std::vector<GuardPtr> kids);
GuardPtr gnegate(const GuardPtr& g);
GuardPtr from_bexp(const BExp& b);

bool eval(const Guard& g, const State& sigma);
int compare(const Guard& a, const Guard& b);
inline bool equal(const Guard& a, const Guard& b) { return compare(a, b) == 0; }
GuardPtr substituted(const Guard& g, const std::string& var, const Poly& replacement);
void collect_vars(const Guard& g, std::set<std::string>& out);

/// Renders in program syntax, e.g. "x - 1 = 0", "(x = 0) && (y < 0)".
std::string to_string(const Guard& g);

} // namespace cpgcl
