#pragma once

#include "contilog/eval.hpp"

#include <functional>

namespace contilog {

/// Indexed family of structures over one signature, standing in for a
/// metric ultraproduct. Members are produced on demand (1-based index).
struct StructureSequence {
    std::function<MetricStructure(int)> generator;
    int max_index = 6;

    std::vector<MetricStructure> materialize() const;
};

/// One point per member, all in the same sort.
struct PointSequence {
    std::string sort;
    std::vector<std::string> labels; // one per index, 1..max_index
};

enum class Tail { Convergent, Oscillating, Undetermined };

/// Per-index values with a tail classification over the last `window`
/// entries. A convergent verdict carries the limit estimate and the
/// observed tolerance max_i |v_i - limit| over the window; a sequence that
/// converges yields the ultralimit for every nonprincipal ultrafilter,
/// which is the only case certified here.
struct ConvergenceReport {
    std::vector<Scalar> values;
    Tail tail = Tail::Undetermined;
    Scalar limit;
    Scalar limit_tol;
    int window = 3;
    bool values_certified = true;
};

ConvergenceReport classify_tail(const std::vector<Scalar>& values, int window, double tol,
                                const Rat& value_cap);

ConvergenceReport ultra_eval(const StructureSequence& seq, const Formula& f, int window = 3,
                             const EvalOptions& opts = {});

ConvergenceReport point_distance(const StructureSequence& seq, const PointSequence& p,
                                 const PointSequence& q, int window = 3,
                                 const EvalOptions& opts = {});

/// Partition point sequences by "limit distance below tol". Pairs with
/// undetermined tails are flagged, never merged; a class whose internal
/// distances stray beyond 3*tol is flagged as a transitivity defect.
struct QuotientReport {
    std::vector<std::vector<int>> classes; // indices into the input list
    std::vector<std::string> flags;
};
QuotientReport quotient_classes(const StructureSequence& seq,
                                const std::vector<PointSequence>& points, double tol,
                                int window = 3, const EvalOptions& opts = {});

/// The gn_family sequence n = lo..hi.
StructureSequence gn_sequence(int lo = 1, int hi = 6);
StructureSequence sym_sequence(int lo, int hi);

} // namespace contilog
