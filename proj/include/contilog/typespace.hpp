#pragma once

#include "contilog/eval.hpp"

namespace contilog {

/// A formula family with canonical free variables x1..xn, the coordinate
/// system in which realized types are recorded.
struct TypeFamily {
    std::vector<std::pair<std::string, std::string>> vars; // (xi, sort)
    std::vector<Formula> formulas;

    static TypeFamily make(const Signature& sig, const std::vector<std::string>& sorts,
                           int depth = 2, size_t cap = 200);
};

/// Restriction of the n-type of a realized tuple to a finite formula
/// family: the evaluated value vector plus the realizing tuple.
struct TypePoint {
    int arity = 0;
    std::vector<Scalar> values;
    std::vector<int> realizer; // point indices in the tuple's sorts
};

TypePoint tp(const MetricStructure& M, const std::vector<int>& tuple, const TypeFamily& family,
             const EvalOptions& opts = {});

/// Realized d-distance between two types: the minimum over pairs of
/// realizing tuples inside M of max_i d(c_i, b_i). An upper bound on the
/// all-models d-metric, exact within the given structure.
Scalar type_distance(const MetricStructure& M, const TypePoint& p, const TypePoint& q,
                     const TypeFamily& family, const EvalOptions& opts = {});

/// d^T pseudometric between formulas: sup over all assignments in all the
/// given structures of |phi - psi|.
ValueBounds formula_pseudometric(const std::vector<const MetricStructure*>& structures,
                                 const Formula& phi, const Formula& psi,
                                 const EvalOptions& opts = {});

/// Greedy (farthest-point) eps-net of realized n-types, with a certificate
/// assigning every realized type class to a net member within eps.
struct EpsNet {
    std::vector<TypePoint> net;
    struct Cover {
        std::vector<int> tuple;
        int net_index;
        double distance;
    };
    std::vector<Cover> certificate; // one entry per realized type class
};
EpsNet eps_net(const MetricStructure& M, int n, double eps, const TypeFamily& family,
               const EvalOptions& opts = {});

/// All distinct realized type classes (one representative tuple each).
std::vector<TypePoint> realized_types(const MetricStructure& M, const TypeFamily& family,
                                      const EvalOptions& opts = {});

} // namespace contilog
