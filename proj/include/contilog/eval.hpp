#pragma once

#include "contilog/formula.hpp"
#include "contilog/structure.hpp"

#include <set>

namespace contilog {

struct Assignment {
    std::map<std::string, std::pair<std::string, Point>> vals; // var -> (sort, point)

    void set(const std::string& var, const std::string& sort, Point p) {
        vals[var] = {sort, std::move(p)};
    }
};

struct EvalOptions {
    double tol = 1e-9;
    // multistart projected descent over Hilbert balls
    int starts = 32;
    int max_iter = 200;
    double stationarity = 1e-6;
    double heuristic_margin = 1e-4; // width of the uncertified side
    uint64_t seed = 1;
    std::set<std::string> sphere_vars; // quantifier variables pinned to the sphere
};

struct eval_error : input_error {
    using input_error::input_error;
};

/// Evaluate a sort-checked formula. Connectives are computed literally
/// (half, dotminus, C-relative neg and add, min/max/absdiff); sup and inf
/// enumerate finite sorts exactly (exact rationals all the way through) and
/// run multistart projected descent over Hilbert balls, in which case the
/// attained side of the interval is sound and `certified` turns false.
ValueBounds evaluate(const MetricStructure& M, const Formula& f, const Assignment& a = {},
                     const EvalOptions& opts = {});

/// evaluate plus the optimizing points of the outermost quantifier chain.
struct WitnessedValue {
    ValueBounds bounds;
    std::vector<std::pair<std::string, std::string>> witness; // (var, point label)
};
WitnessedValue evaluate_witness(const MetricStructure& M, const Formula& f,
                                const Assignment& a = {}, const EvalOptions& opts = {});

/// Verification of a declared continuity modulus on the interpreted symbol:
/// exhaustive over finite argument sorts, sampled when a Hilbert sort is
/// involved. worst_margin > 0 (beyond tol) is a violation.
struct ModulusReport {
    struct Entry {
        Rat eps;
        double worst_margin = -1; // max over tested pairs of |delta| - eps
        std::string witness;
    };
    std::vector<Entry> entries;
    double worst_margin = -1;
    std::string worst_witness;
    bool ok(double tol = 1e-9) const { return worst_margin <= tol; }
};
ModulusReport check_modulus(const MetricStructure& M, int symbol,
                            const std::vector<Rat>& eps_grid, const EvalOptions& opts = {});

/// Depth-bounded elementary-equivalence report: evaluates every enumerated
/// sentence up to the given depth in both structures (same signature) and
/// reports the worst discrepancy plus the first distinguishing sentence.
struct EquivReport {
    double max_discrepancy = 0;
    std::string first_distinguishing;
    double lhs = 0, rhs = 0; // values on the first distinguishing sentence
    int sentences_checked = 0;
    bool equivalent(double tol) const { return max_discrepancy <= tol; }
};
EquivReport elem_equiv_depth(const MetricStructure& M, const MetricStructure& N, int depth,
                             const EvalOptions& opts = {});

} // namespace contilog
