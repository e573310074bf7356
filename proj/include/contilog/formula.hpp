#pragma once

#include "contilog/signature.hpp"

#include <string>
#include <vector>

namespace contilog {

/// A term: a variable or a function application. Constants are nullary
/// applications. `symbol` and `sort` are filled in by resolve().
struct Term {
    std::string head;
    int symbol = -1; // -1 while head is a variable or unresolved
    std::vector<Term> args;
    std::string sort;
    bool is_var = false;

    static Term var(const std::string& name) {
        Term t;
        t.head = name;
        t.is_var = true;
        return t;
    }
    static Term app(const std::string& name, std::vector<Term> args = {}) {
        Term t;
        t.head = name;
        t.args = std::move(args);
        return t;
    }
    bool operator==(const Term& o) const;
};

enum class FKind { Const, Atomic, Dist, Half, Neg, Sub, Add, Min, Max, AbsDiff, Sup, Inf };

/// Formula AST over the continuous-logic connective set. `cap` is the clamp
/// level C used by Neg (C - x) and Add (min(x + y, C)); the root's cap
/// governs evaluation of the whole formula.
struct Formula {
    FKind kind = FKind::Const;
    Rat constant = 0;           // Const
    int symbol = -1;            // Atomic predicate id
    std::vector<Term> terms;    // Atomic arguments / Dist pair
    std::vector<Formula> kids;  // connective children / quantifier body
    std::string var, var_sort;  // Sup / Inf
    Rat cap = 1;

    bool operator==(const Formula& o) const;
};

// construction helpers
Formula fconst(const Rat& q);
Formula fatom(const std::string& pred, std::vector<Term> args);
Formula fdist(Term a, Term b);
Formula fhalf(Formula a);
Formula fneg(Formula a);
Formula fsub(Formula a, Formula b);
Formula fadd(Formula a, Formula b);
Formula fmin(Formula a, Formula b);
Formula fmax(Formula a, Formula b);
Formula fabsdiff(Formula a, Formula b);
Formula fsup(const std::string& var, const std::string& sort, Formula body);
Formula finf(const std::string& var, const std::string& sort, Formula body);

/// Canonical textual form; parse_formula(print_formula(f)) reproduces f.
std::string print_formula(const Formula& f);
std::string print_term(const Term& t);

/// Free variables with their sorts, in first-occurrence order.
std::vector<std::pair<std::string, std::string>> free_vars(const Formula& f);

bool is_closed(const Formula& f);

struct sort_error : input_error {
    using input_error::input_error;
};

/// Sort-check `f` against `sig`: resolves symbol overloads, fills term
/// sorts, and infers the sorts of free variables from their use sites.
/// Throws sort_error on unknown symbols, arity or sort mismatches,
/// unresolvable variables, or constants outside [0, cap].
void resolve_formula(Formula& f, const Signature& sig);

} // namespace contilog
