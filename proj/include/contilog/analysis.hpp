#pragma once

#include "contilog/formula.hpp"

namespace contilog {

/// Uniform-continuity modulus of a sort-checked formula: the pointwise
/// minimum, over every variable occurrence, of the occurrence's symbol
/// moduli composed through the enclosing term nesting. All connectives are
/// 1-Lipschitz, so they contribute nothing. A formula without variable
/// occurrences gets id.
Modulus derived_modulus(const Formula& f, const Signature& sig);

/// Static value bounds [lo, hi] from declared predicate ranges, sort
/// diameters and connective arithmetic. Neg can produce a negative lo when
/// an atomic range exceeds the cap; see cap_violations.
std::pair<Rat, Rat> static_range(const Formula& f, const Signature& sig);

/// Cap-discipline check: descriptions of every subformula whose static
/// range can escape [0, cap], in particular atomic ranges exceeding the cap
/// under a negation. Empty result means every subexpression provably stays
/// in [0, cap].
std::vector<std::string> cap_violations(const Formula& f, const Signature& sig);

} // namespace contilog
