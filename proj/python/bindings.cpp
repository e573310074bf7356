#include "contilog/analysis.hpp"
#include "contilog/catgrp.hpp"
#include "contilog/json_io.hpp"
#include "contilog/parser.hpp"

#include <pybind11/pybind11.h>

namespace py = pybind11;
using namespace contilog;

namespace {

// The module speaks JSON strings; the python package turns them into dicts.

EvalOptions make_opts(double tol, uint64_t seed) {
    EvalOptions o;
    o.tol = tol;
    o.seed = seed;
    return o;
}

std::string eval_json(const std::string& structure, const std::string& formula,
                      const std::string& assign, const std::string& cap, double tol,
                      uint64_t seed) {
    MetricStructure M = structure_from_json(json::parse(structure));
    Formula f = parse_formula(formula, M.sig, rat_from_string(cap));
    Assignment a;
    if (!assign.empty() && assign != "{}") {
        json aj = json::parse(assign);
        auto fv = free_vars(f);
        for (const auto& [var, label] : aj.items()) {
            std::string vsort;
            for (const auto& [v, s] : fv)
                if (v == var) vsort = s;
            if (vsort.empty()) throw input_error("assignment binds unused var " + var);
            a.set(var, vsort, Point(M.point(vsort, label.get<std::string>())));
        }
    }
    WitnessedValue w = evaluate_witness(M, f, a, make_opts(tol, seed));
    json res;
    res["formula"] = print_formula(f);
    res["value"] = bounds_to_json(w.bounds);
    json wit = json::array();
    for (const auto& [var, pt] : w.witness) wit.push_back({{"var", var}, {"point", pt}});
    res["witness"] = wit;
    return res.dump();
}

std::string parse_print(const std::string& structure, const std::string& formula,
                        const std::string& cap) {
    MetricStructure M = structure_from_json(json::parse(structure));
    return print_formula(parse_formula(formula, M.sig, rat_from_string(cap)));
}

std::string modulus_json(const std::string& structure, const std::string& formula) {
    MetricStructure M = structure_from_json(json::parse(structure));
    Formula f = parse_formula(formula, M.sig);
    Modulus m = derived_modulus(f, M.sig);
    json res;
    res["modulus"] = modulus_to_json(m);
    res["describe"] = m.describe();
    return res.dump();
}

std::string scheme_json(const std::string& structure, const std::string& scheme, double tol,
                        uint64_t seed) {
    MetricStructure M = structure_from_json(json::parse(structure));
    Scheme s = scheme_from_json(json::parse(scheme));
    DefectReport rep = scheme_defect(M, s, make_opts(tol, seed));
    json res;
    res["worst_defect"] = scalar_to_json(rep.worst);
    res["worst_axiom"] = rep.worst_axiom;
    json entries = json::array();
    for (const auto& e : rep.entries) {
        json ej;
        ej["name"] = e.name;
        ej["axiom"] = e.text;
        ej["value"] = bounds_to_json(e.bounds);
        ej["is_axiom"] = e.is_axiom;
        entries.push_back(ej);
    }
    res["entries"] = entries;
    return res.dump();
}

std::string ultra_json(const std::string& sequence, const std::string& formula, int window,
                       double tol, uint64_t seed) {
    StructureSequence seq = sequence_from_json(json::parse(sequence));
    Formula f = parse_formula(formula, seq.generator(1).sig);
    ConvergenceReport rep = ultra_eval(seq, f, window, make_opts(tol, seed));
    json res;
    json vals = json::array();
    for (const Scalar& v : rep.values) vals.push_back(scalar_to_json(v));
    res["values"] = vals;
    res["classification"] = rep.tail == Tail::Convergent    ? "convergent"
                            : rep.tail == Tail::Oscillating ? "oscillating"
                                                            : "undetermined";
    if (rep.tail == Tail::Convergent) res["limit"] = scalar_to_json(rep.limit);
    return res.dump();
}

std::string aut_json(const std::string& structure, long cap) {
    MetricStructure M = structure_from_json(json::parse(structure));
    AutGroup aut = automorphisms(M, cap);
    json res;
    res["order"] = aut.size();
    res["generator_count"] = aut.generators.size();
    return res.dump();
}

std::string tree_defect_json(const std::string& structure) {
    MetricStructure M = structure_from_json(json::parse(structure));
    TreeDefectReport rep = tree_defect(M);
    json res;
    res["hyperbolicity"] = bounds_to_json(rep.hyperbolicity);
    res["midpoint"] = bounds_to_json(rep.midpoint);
    res["combined"] = bounds_to_json(rep.combined);
    res["geometric_midpoint"] = rep.geometric_midpoint;
    return res.dump();
}

std::string catreport_json(const std::string& structure, const std::string& rho, int n,
                           const std::string& eps, double tol, uint64_t seed) {
    MetricStructure M = structure_from_json(json::parse(structure));
    Rat rho_q = rat_from_string(rho);
    GRhoResult gr = g_rho(M, rho_q);
    int power = n > 0 ? n : gr.exponent;
    EvalOptions opts = make_opts(tol, seed);
    WitnessedValue dd = definability_defect(M, rho_q, power, rat_from_string(eps), opts);
    AutGroup aut = automorphisms(M);
    json res;
    res["stabilization_exponent"] = gr.exponent;
    res["subgroup_order"] = gr.subgroup.size();
    res["coset_count"] = gr.cosets.size();
    res["definability_defect"] = bounds_to_json(dd.bounds);
    res["aut_order"] = aut.size();
    res["quotient_orbits"] = quotient_orbits(M, gr, aut);
    return res.dump();
}

} // namespace

PYBIND11_MODULE(_contilog, m) {
    m.doc() = "continuous-logic toolkit core (JSON-string interface)";
    m.def("eval_json", &eval_json, py::arg("structure"), py::arg("formula"),
          py::arg("assign") = "{}", py::arg("cap") = "1", py::arg("tol") = 1e-9,
          py::arg("seed") = 1);
    m.def("parse_print", &parse_print, py::arg("structure"), py::arg("formula"),
          py::arg("cap") = "1");
    m.def("modulus_json", &modulus_json, py::arg("structure"), py::arg("formula"));
    m.def("scheme_json", &scheme_json, py::arg("structure"), py::arg("scheme"),
          py::arg("tol") = 1e-9, py::arg("seed") = 1);
    m.def("ultra_json", &ultra_json, py::arg("sequence"), py::arg("formula"),
          py::arg("window") = 3, py::arg("tol") = 1e-9, py::arg("seed") = 1);
    m.def("aut_json", &aut_json, py::arg("structure"), py::arg("cap") = 5000);
    m.def("tree_defect_json", &tree_defect_json, py::arg("structure"));
    m.def("catreport_json", &catreport_json, py::arg("structure"), py::arg("rho"),
          py::arg("n") = 0, py::arg("eps") = "0", py::arg("tol") = 1e-9, py::arg("seed") = 1);
    m.attr("__version__") = "0.1.0";
}
