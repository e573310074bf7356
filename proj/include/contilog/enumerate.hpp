#pragma once

#include "contilog/formula.hpp"

namespace contilog {

/// Deterministic enumeration of sort-correct formulas up to an AST depth
/// (atoms and constants count 1, every connective or quantifier adds 1),
/// deduplicated by printed form. Quantifiers range over the non-Hilbert
/// sorts; bound variables are named q1, q2, ...
struct EnumOptions {
    int max_depth = 3;
    int term_depth = 1;
    size_t per_level_cap = 700; // formulas kept per (depth, context)
    size_t total_cap = 4000;
    bool include_consts = true; // the constants 0 and 1
    bool allow_half = true;
};

std::vector<Formula> enum_formulas(const Signature& sig,
                                   const std::vector<std::pair<std::string, std::string>>& vars,
                                   const EnumOptions& opts = {});

/// Seeded random generator over the same space (used by property tests).
struct RandomFormulaOptions {
    int depth = 3;
    size_t count = 100;
    uint64_t seed = 1;
    int term_depth = 1;
    bool allow_half = true;
    bool consts_01_only = true; // draw constants from {0, 1} only
};

std::vector<Formula> random_formulas(const Signature& sig,
                                     const std::vector<std::pair<std::string, std::string>>& vars,
                                     const RandomFormulaOptions& opts);

/// Random closed sentences: every variable is quantifier-bound.
std::vector<Formula> random_sentences(const Signature& sig, const RandomFormulaOptions& opts);

} // namespace contilog
