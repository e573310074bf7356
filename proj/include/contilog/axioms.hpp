#pragma once

#include "contilog/builders.hpp"
#include "contilog/eval.hpp"

namespace contilog {

/// Parameters for a named axiom scheme. Unused fields are ignored by the
/// schemes that do not mention them.
struct Scheme {
    std::string name; // group | k0 | theta | bounded | roelcke-bounded |
                      // roelcke-precompact | obk | aiv | nfh | nfr | tree |
                      // hilbert-onb
    std::string sort = "G";
    int m = 1;
    int k = 1;
    int n = 1;
    Rat eps = Rat(1, 2);
    Rat r = Rat(1, 2);                       // ball radius of V
    std::vector<Rat> eps_grid;               // k0 (default 0,1/4,1/2,3/4,1)
    std::map<int, std::pair<int, int>> eta;  // nfh / nfr: ball k -> (l, s)
    int onb_k = 2;
    int ball = 0; // tree scheme ball index; 0 = largest
};

struct CompiledAxiom {
    std::string name;
    std::string text;
    Formula formula;
    bool is_axiom = true; // false: diagnostic companion value
};

/// Deterministic compilation of a scheme into formulas (identical text,
/// hence identical ASTs, across runs). Throws input_error when the
/// signature lacks a required symbol.
std::vector<CompiledAxiom> compile_scheme(const Scheme& s, const Signature& sig);

struct DefectReport {
    struct Entry {
        std::string name;
        std::string text;
        ValueBounds bounds;
        std::vector<std::pair<std::string, std::string>> witness;
        bool is_axiom = true;
    };
    std::vector<Entry> entries;
    Scalar worst;      // max over axiom entries of bounds.hi
    bool certified = true;
    std::string worst_axiom;
    std::vector<std::pair<std::string, std::string>> worst_witness;
    std::string note;
};

/// Evaluate every compiled axiom of the scheme on M. For the aiv scheme the
/// quantified vector is pinned to the unit sphere (its |1 - ||v||| clause
/// held exactly), and a companion "displacement" entry reports the plain
/// inf-sup displacement of unit vectors.
DefectReport scheme_defect(const MetricStructure& M, const Scheme& s,
                           const EvalOptions& opts = {});

/// Four-point hyperbolicity defect (exhaustive over vertex 4-tuples)
/// combined with the midpoint defect. The midpoint infimum runs over the
/// geometric realization of the backing graph (piecewise-linear exact
/// minimization along edges) when graph data is present, else over the
/// finite carrier.
struct TreeDefectReport {
    ValueBounds hyperbolicity;
    ValueBounds midpoint;
    ValueBounds combined;
    bool geometric_midpoint = false;
};
TreeDefectReport tree_defect(const MetricStructure& M, const std::string& sort = "");

/// Attach unary predicates P(x) = d(x, G \ V) and Q(x) = d(x, V) to a
/// finite metric group, affinely rescaled so each attains maximum 1/2 (the
/// normalization making inf |P - 1/2| vanish). V is given by point labels.
MetricStructure k0_attach(const MetricStructure& M, const std::vector<std::string>& V,
                          const std::string& sort = "G");

/// Attach an arbitrary predicate table (row-major over the argument sorts).
MetricStructure with_predicate(MetricStructure M, const std::string& name,
                               const std::vector<std::string>& arg_sorts, const Rat& lo,
                               const Rat& hi, std::vector<Rat> values);

struct action_error : input_error {
    action_error(const std::string& msg, std::string wit)
        : input_error(msg + (wit.empty() ? "" : " [witness: " + wit + "]")),
          witness(std::move(wit)) {}
    std::string witness;
};

/// One generator of a wrapped action: an orthogonal/unitary (optionally
/// affine) matrix on the Hilbert target, or a vertex bijection on the tree
/// target.
struct GeneratorMap {
    std::string element;
    std::vector<std::vector<double>> matrix; // rows
    std::vector<double> translation;         // optional
    std::map<std::string, std::string> vertex_map;
};

struct WrapActionSpec {
    std::vector<GeneratorMap> generators;
    SortMapNu nu;
    std::optional<HilbertOptions> hilbert;
    std::optional<GraphInput> tree;
    double tol = 1e-9;
};

/// Build the sorted action structure K_l x B_m -> B_nu(l,m) over the group
/// G. Checks that the generator maps extend to a homomorphism (consistency
/// along the Cayley graph), that each generator acts isometrically, and
/// that nu really bounds the action; violations raise action_error with a
/// witness.
MetricStructure wrap_action(const MetricStructure& G, const WrapActionSpec& spec,
                            const std::string& sort = "G");

} // namespace contilog
