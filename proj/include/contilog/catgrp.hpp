#pragma once

#include "contilog/typespace.hpp"

namespace contilog {

/// One automorphism: a carrier permutation per finite sort.
struct AutMap {
    std::map<std::string, std::vector<int>> perm;
    int apply(const std::string& sort, int i) const { return perm.at(sort)[i]; }
};

struct AutGroup {
    std::vector<AutMap> members; // lexicographically sorted, identity included
    std::vector<int> generators; // indices of a generating subset
    int size() const { return static_cast<int>(members.size()); }
};

/// All structure automorphisms of a finite structure: bijections preserving
/// the metric exactly, predicates within tol, and commuting with every
/// function symbol. Generator-image search on single-sort groups,
/// isometry-pruned backtracking otherwise.
AutGroup automorphisms(const MetricStructure& M, long cap = 5000, double tol = 1e-9);

/// Greedy orbit representatives: F with Aut(M)-orbit of F eps-dense in the
/// n-th power of the sort. The certificate maps every n-tuple to a net
/// member within eps.
struct OligoResult {
    std::vector<std::vector<int>> F;
    struct Entry {
        std::vector<int> tuple;
        int f_index;
        int aut_index;
        double distance;
    };
    std::vector<Entry> certificate;
};
OligoResult approx_oligo(const MetricStructure& M, int n, double eps, const AutGroup& aut,
                         const std::string& sort = "G");

/// Covering battery for V = the closed r-ball at 1: greedy |F| and the
/// least product length making each of G=FV^k, G=V^kFV^k, G=VFV, G=(FV)^k
/// succeed (within the caps).
struct CoverResult {
    bool success = false;
    int F_size = 0;
    std::vector<std::string> F;
    int length_used = 0;
};
struct BoundednessReport {
    Rat r;
    int k = 1;
    int V_size = 0;
    CoverResult fvk, vkfvk, vfv, fvpk;
};
BoundednessReport boundedness_battery(const MetricStructure& M, const Rat& r, int k,
                                      const std::string& sort = "G", int cap_F = 0);

/// Least n with (U u U^-1 u {1})^n = G, or a does-not-generate report
/// carrying the subgroup actually reached.
struct CayleyBoundResult {
    bool generates = false;
    int n = 0;
    std::vector<std::string> reached; // the generated subgroup if not
};
CayleyBoundResult cayley_bound(const MetricStructure& M, const std::vector<std::string>& U,
                               int cap_n = 64, const std::string& sort = "G");

/// de Cornulier chain checks: strict increase, {1} u X_i^-1 u X_i X_i
/// inside X_{i+1}, and the least covering level.
struct ChainReport {
    bool ok = true;
    std::vector<std::string> violations;
    int covering_level = 0; // 0 = no X_i equals G
};
ChainReport chain_validate(const MetricStructure& M,
                           const std::vector<std::vector<std::string>>& sets,
                           const std::string& sort = "G");

/// G_rho = the subgroup generated by the closed rho-ball of 1, computed as
/// the stabilizing ball power B^n = B^{n+1}.
struct GRhoResult {
    Rat rho;
    std::vector<int> ball;             // B_rho(1)
    int exponent = 1;                  // least n with B^n = B^{n+1}
    std::vector<int> subgroup;         // G_rho
    std::vector<std::vector<int>> cosets; // left cosets, each sorted, by leader
};
GRhoResult g_rho(const MetricStructure& M, const Rat& rho, const std::string& sort = "G");

/// Definability defect of P(x) = d(x, G_rho):
///   sup_x inf_{y1..yn} max(d(y1,1)-.rho, ..., d(yn,1)-.rho,
///                          |P(x) - d(x, y1...yn)| -. eps)
WitnessedValue definability_defect(const MetricStructure& M, const Rat& rho, int n,
                                   const Rat& eps, const EvalOptions& opts = {},
                                   const std::string& sort = "G");

/// Number of Aut(M)-orbits on the coset space G/G_rho.
int quotient_orbits(const MetricStructure& M, const GRhoResult& grho, const AutGroup& aut,
                    const std::string& sort = "G");

/// Near-homogeneity defect: max over tuple pairs (a, c) of
/// min_alpha max_i d(alpha(c_i), a_i) - type_distance(tp(a), tp(c)) - eps.
struct NearHomogReport {
    double defect = 0;
    std::vector<int> witness_a, witness_c;
};
NearHomogReport near_homog_defect(const MetricStructure& M, int n, const TypeFamily& family,
                                  double eps, const AutGroup& aut,
                                  const EvalOptions& opts = {});

} // namespace contilog
