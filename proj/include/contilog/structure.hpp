#pragma once

#include "contilog/scalar.hpp"
#include "contilog/signature.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <variant>
#include <vector>

namespace contilog {

enum class Field { Real, Complex };

/// A point of some sort: a carrier index on finite sorts, a coordinate
/// vector on Hilbert-ball sorts (length dim, or 2*dim for complex scalars
/// stored as interleaved re/im pairs).
using Point = std::variant<int32_t, std::vector<double>>;

inline int32_t pt_index(const Point& p) { return std::get<int32_t>(p); }
inline const std::vector<double>& pt_vec(const Point& p) {
    return std::get<std::vector<double>>(p);
}

/// Weighted-graph backing data for tree and cycle spaces; keeps the edge
/// list so geometric (edge-interior) computations stay available after the
/// carrier has been flattened into ball sorts.
struct GraphData {
    struct Edge {
        int u, v;
        Rat len;
    };
    std::vector<std::string> names;
    std::vector<Edge> edges;
    int basepoint = 0;
    std::vector<std::vector<Rat>> dist; // full vertex metric
    bool is_tree = false;
};

struct SortCarrier {
    SortKind kind = SortKind::Finite;

    // finite carriers
    std::vector<std::string> labels;
    enum class MetricKind { Table, PermHamming, Discrete };
    MetricKind metric = MetricKind::Table;
    std::vector<Rat> dist;                      // Table: row-major size n*n
    std::vector<std::vector<uint8_t>> perms;    // PermHamming: one permutation per point
    int degree = 0;
    std::vector<int> graph_vertex;              // TreeBall: carrier index -> GraphData vertex

    // Hilbert carriers
    int dim = 0;
    int radius = 0;
    Field field = Field::Real;

    std::map<std::string, int> label_index;
    std::map<std::vector<uint8_t>, int> perm_index;

    int size() const { return static_cast<int>(labels.size()); }
    bool finite() const { return kind != SortKind::HilbertBall; }
    int vec_len() const { return field == Field::Real ? dim : 2 * dim; }
    Rat finite_dist(int i, int j) const;
    void index_labels();
};

/// Interpretation of one symbol.
struct Interp {
    enum class Kind {
        FuncTable,      // flattened index table over finite argument sorts
        PermMul,        // permutation composition on a PermHamming carrier
        PermInv,
        ConstPoint,
        HilbertInclude, // B_m -> B_n identity embedding
        HilbertScale,   // v -> c v (real or complex rational c)
        HilbertAdd,
        HilbertSub,
        HilbertZero,
        MatrixAction,   // (finite g, hilbert v) -> M_g v + b_g
        PredTable,      // rational predicate values over finite sorts
        InnerRe,        // Re<x,y>
        InnerIm,
        Norm
    };
    Kind kind = Kind::FuncTable;
    std::vector<int32_t> table;
    std::vector<Rat> values;
    int32_t cpoint = 0;
    Rat scale_re = 0, scale_im = 0;
    std::vector<std::vector<double>> mats;  // MatrixAction: row-major per group element
    std::vector<std::vector<double>> trans; // optional per-element translation
};

struct MetricStructure {
    Signature sig;
    std::map<std::string, SortCarrier> carriers;
    std::map<int, Interp> interps; // keyed by symbol id
    std::optional<GraphData> graph;

    const SortCarrier& carrier(const std::string& sort) const;
    SortCarrier& carrier_mut(const std::string& sort);
    Scalar metric(const std::string& sort, const Point& a, const Point& b) const;
    std::string label(const std::string& sort, const Point& p) const;
    int point(const std::string& sort, const std::string& label) const;

    Point apply_function(int symbol, const std::vector<Point>& args) const;
    Scalar apply_predicate(int symbol, const std::vector<Point>& args) const;
};

/// View of a single-sort finite metric group (symbols mul, inv, 1).
struct GroupView {
    const MetricStructure* M = nullptr;
    std::string sort;
    int mul_sym = -1, inv_sym = -1, unit_sym = -1;
    int n = 0;

    int mul(int a, int b) const;
    int inv(int a) const;
    int unit() const;
    Rat dist(int a, int b) const;
    const std::string& label(int a) const { return M->carrier(sort).labels[a]; }
};

GroupView group_view(const MetricStructure& M, const std::string& sort = "G");

struct ValidationOptions {
    int exhaustive_cap = 60; // skip O(n^3) metric checks above this size
    double tol = 1e-9;
};

/// Checks metric axioms exactly on finite sorts (identity, symmetry,
/// triangle), table ranges, and the group laws wherever a sort carries
/// mul/inv/1. Throws input_error with a witness on the first failure.
void validate_structure(const MetricStructure& M, const ValidationOptions& opts = {});

// vector helpers shared by Hilbert interpretations and the optimizer
double vec_norm(const std::vector<double>& v);
double vec_dist(const std::vector<double>& a, const std::vector<double>& b);

} // namespace contilog
