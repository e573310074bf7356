#pragma once

#include "contilog/structure.hpp"

namespace contilog {

// permutation helpers (one-line images, 0-based)
std::vector<uint8_t> perm_compose(const std::vector<uint8_t>& a, const std::vector<uint8_t>& b);
std::vector<uint8_t> perm_inverse(const std::vector<uint8_t>& a);
/// Cycle notation with 1-based points: "()", "(1 2)(4 5)".
std::string perm_label(const std::vector<uint8_t>& p);

/// Single-sort group signature: sort `name` with the given diameter,
/// symbols mul, inv and the unit constant 1, all with id moduli.
Signature group_signature(const std::string& sort = "G", const Rat& diameter = 1);

/// Full symmetric group Sym(n) under the normalized Hamming metric
/// d(s,t) = |{i : s(i) != t(i)}| / n.
MetricStructure sym_hamming(int n, int cap = 8);

/// The subgroup of Sym(2^n + 3) generated by Z(2)^n acting regularly on the
/// first 2^n points and S3 on the last three; carrier size 6 * 2^n.
MetricStructure gn_family(int n, int cap = 6);

/// Finite group from a Cayley table (row i, column j holds the index of
/// x_i * x_j), with the discrete {0,1} metric. With validate=false only the
/// shape, the identity and inverses are required, so deliberately corrupted
/// tables can still be measured.
MetricStructure cayley_group(const std::vector<std::vector<int>>& table,
                             std::vector<std::string> labels = {}, bool validate = true);

MetricStructure cyclic_group(int n);

/// Same carrier and operations, metric replaced by the discrete one.
MetricStructure discrete_wrap(MetricStructure M);

struct HilbertScalar {
    Rat re = 0, im = 0; // im != 0 only in complex towers
};

struct HilbertOptions {
    Field field = Field::Real;
    int dim = 2;
    int max_ball = 2;
    std::vector<HilbertScalar> scalars; // empty = default set
};

/// Sorted Hilbert structure: balls B_1..B_N with inclusions, vector
/// add/sub into B_{2n}, scalar maps lam_r : B_m -> B_{km} for the unique
/// k >= 1 with k-1 <= |r| < k, the norm, and inner-product predicates
/// (ip, or ipre/ipim over the complex field) ranged [-n^2, n^2].
MetricStructure hilbert_tower(const HilbertOptions& opts);
void add_hilbert_tower(MetricStructure& M, const HilbertOptions& opts);

/// Name of the scalar-multiplication symbol for a given scalar, e.g.
/// lam2, lam3_2, lamm1, clam0i1.
std::string scalar_symbol_name(const HilbertScalar& s, Field field);

struct GraphInput {
    struct E {
        std::string u, v;
        Rat len;
    };
    std::vector<E> edges;
    std::string basepoint;
};

/// Validated graph data (vertex names sorted, exact path metric).
GraphData make_graph_data(const GraphInput& in, bool require_tree);

/// Pointed metric space of a weighted tree with integer-radius ball sorts
/// B_1..B_R around the basepoint. Rejects cyclic or disconnected input.
MetricStructure tree_space(const GraphInput& in);
/// Same construction without the acyclicity requirement (path metric of a
/// connected weighted graph); used for negative controls like the 4-cycle.
MetricStructure graph_space(const GraphInput& in);

/// Z_m acting on the real plane by rotations, the generator rotating by
/// 2*pi/m: group sorts K_1 = {1, g, g^-1} <= K_2 <= ... together with a
/// Hilbert ball tower and the action symbol act : K_l x B_m -> B_m.
MetricStructure zm_rotation_action(int m, int max_ball = 1);

/// Internal worker shared by zm_rotation_action and wrap_action: attaches
/// K-chain sorts (from the generator set) and a matrix action to a fresh
/// copy of the single-sort group `G`. mats/trans are indexed by carrier
/// element in the K-chain order.
struct ActionAttachment {
    std::vector<int> gens; // generator indices in G's carrier
    std::vector<std::vector<double>> mats;  // per source carrier element
    std::vector<std::vector<double>> trans; // optional; empty rows = linear
    SortMapNu nu;
    HilbertOptions hilbert;
};
MetricStructure attach_hilbert_action(const MetricStructure& G, const std::string& sort,
                                      const ActionAttachment& a);

struct TreeActionAttachment {
    std::vector<int> gens;
    std::vector<std::vector<int>> vertex_maps; // per carrier element: vertex -> vertex
    SortMapNu nu;
    GraphInput tree;
};
MetricStructure attach_tree_action(const MetricStructure& G, const std::string& sort,
                                   const TreeActionAttachment& a);

/// K-chain levels: K_1 = {1} u S u S^-1, K_{j+1} = {1} u K_j^-1 u K_j K_j,
/// stopping when the chain stabilizes. Returns per-element level (1-based).
std::vector<int> k_chain_levels(const GroupView& g, const std::vector<int>& gens);

} // namespace contilog
