#include "contilog/analysis.hpp"
#include "contilog/catgrp.hpp"
#include "contilog/json_io.hpp"
#include "contilog/parser.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>

using namespace contilog;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Global {
    double tol = 1e-9;
    std::string cap = "1";
    uint64_t seed = 1;
    long max_points = 200000;

    EvalOptions eval_opts() const {
        EvalOptions o;
        o.tol = tol;
        o.seed = seed;
        return o;
    }
    Rat cap_rat() const { return rat_from_string(cap); }
};

json witness_json(const std::vector<std::pair<std::string, std::string>>& w) {
    json out = json::array();
    for (const auto& [var, pt] : w) {
        json e;
        e["var"] = var;
        e["point"] = pt;
        out.push_back(e);
    }
    return out;
}

struct InputTracker {
    std::string payload;

    json load(const std::string& path) {
        json j = load_json_file(path);
        payload += j.dump();
        return j;
    }
    void note(const std::string& s) { payload += s; }
    std::string digest() const { return contilog::digest(payload); }
};

MetricStructure load_structure_checked(InputTracker& inputs, const std::string& path,
                                       long max_points) {
    MetricStructure M = structure_from_json(inputs.load(path));
    long total = 0;
    for (const auto& [name, c] : M.carriers) total += c.size();
    if (total > max_points)
        throw input_error("structure exceeds --max-points (" + std::to_string(total) + ")");
    return M;
}

void emit(const std::vector<std::string>& argv, const InputTracker& inputs, json result,
          std::chrono::steady_clock::time_point t0) {
    json rep;
    rep["schema"] = "contilog-report/1";
    rep["command"] = argv;
    rep["inputs"] = json{{"digest", inputs.digest()}};
    rep["result"] = std::move(result);
    rep["version"] = kVersion;
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep["timing"] = json{{"seconds", secs}};
    std::cout << rep.dump(2) << "\n";
}

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text + ",") {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> argv_vec(argv, argv + argc);
    auto t0 = std::chrono::steady_clock::now();

    CLI::App app{"continuous-logic toolkit for metric structures"};
    app.require_subcommand(1);
    Global g;
    app.add_option("--tol", g.tol, "comparison tolerance");
    app.add_option("--cap", g.cap, "formula cap C");
    app.add_option("--seed", g.seed, "optimizer multistart seed");
    app.add_option("--max-points", g.max_points, "safety cap on carrier size");

    std::string structure_path, formula_text, assign_text, scheme_name, params_text;
    std::string sequence_path, family, phi_text, psi_text, tuple_text, gens_text, sets_text;
    std::string sort = "G";
    std::vector<int> range{1, 6};
    int window = 3, arity = 1, depth = 2, cap_n = 64, kk = 1, aut_cap = 5000, nn = 0;
    double eps = 0;
    std::string r_text = "1/2", rho_text = "1/2", eps_text = "0";

    auto* c_eval = app.add_subcommand("eval", "evaluate a formula on a structure");
    c_eval->add_option("--structure", structure_path)->required();
    c_eval->add_option("--formula", formula_text)->required();
    c_eval->add_option("--assign", assign_text, "JSON object var -> point label");

    auto* c_mod = app.add_subcommand("modulus", "derived modulus of a formula");
    c_mod->add_option("--structure", structure_path)->required();
    c_mod->add_option("--formula", formula_text)->required();

    auto* c_scheme = app.add_subcommand("scheme", "axiom-scheme defect report");
    c_scheme->add_option("--name", scheme_name)->required();
    c_scheme->add_option("--structure", structure_path)->required();
    c_scheme->add_option("--params", params_text, "inline JSON with scheme parameters");

    auto* c_ultra = app.add_subcommand("ultra", "evaluate along a structure sequence");
    c_ultra->add_option("--sequence", sequence_path);
    c_ultra->add_option("--family", family, "gn or sym");
    c_ultra->add_option("--range", range)->expected(2);
    c_ultra->add_option("--formula", formula_text)->required();
    c_ultra->add_option("--window", window);

    auto* c_aut = app.add_subcommand("aut", "automorphism group");
    c_aut->add_option("--structure", structure_path)->required();
    c_aut->add_option("--cap", aut_cap);

    auto* c_oligo = app.add_subcommand("oligo", "approximate oligomorphicity");
    c_oligo->add_option("--structure", structure_path)->required();
    c_oligo->add_option("--n", arity);
    c_oligo->add_option("--eps", eps);
    c_oligo->add_option("--sort", sort);

    auto* c_bound = app.add_subcommand("bound", "boundedness covering battery");
    c_bound->add_option("--structure", structure_path)->required();
    c_bound->add_option("--r", r_text);
    c_bound->add_option("--k", kk);
    c_bound->add_option("--sort", sort);

    auto* c_cayley = app.add_subcommand("cayley", "Cayley boundedness");
    c_cayley->add_option("--structure", structure_path)->required();
    c_cayley->add_option("--gens", gens_text, "comma-separated point labels")->required();
    c_cayley->add_option("--cap-n", cap_n);

    auto* c_chain = app.add_subcommand("chain", "validate a subset chain");
    c_chain->add_option("--structure", structure_path)->required();
    c_chain->add_option("--sets", sets_text, "JSON list of lists of labels")->required();

    auto* c_cat = app.add_subcommand("catreport",
                                     "G_rho, definability defect, quotient orbits, "
                                     "near-homogeneity");
    c_cat->add_option("--structure", structure_path)->required();
    c_cat->add_option("--rho", rho_text)->required();
    c_cat->add_option("--n", nn, "ball power (default: stabilization exponent)");
    c_cat->add_option("--eps", eps_text);
    c_cat->add_option("--depth", depth, "type family depth");

    auto* c_types = app.add_subcommand("types", "type-space reports");
    c_types->add_option("--structure", structure_path)->required();
    c_types->add_option("--n", arity);
    c_types->add_option("--depth", depth);
    c_types->add_option("--sort", sort);
    c_types->add_option("--tuple", tuple_text, "comma-separated labels: report tp");
    c_types->add_option("--eps", eps, "eps-net radius");
    c_types->add_option("--phi", phi_text, "formula for the d^T pseudometric");
    c_types->add_option("--psi", psi_text);

    CLI11_PARSE(app, argc, argv);

    InputTracker inputs;
    int exit_code = 0;
    try {
        EvalOptions opts = g.eval_opts();
        Rat cap = g.cap_rat();

        if (c_eval->parsed()) {
            MetricStructure M = load_structure_checked(inputs, structure_path, g.max_points);
            inputs.note(formula_text);
            Formula f = parse_formula(formula_text, M.sig, cap);
            Assignment a;
            if (!assign_text.empty()) {
                json aj = json::parse(assign_text);
                inputs.note(aj.dump());
                auto fv = free_vars(f);
                for (const auto& [var, label] : aj.items()) {
                    std::string vsort;
                    for (const auto& [v, s] : fv)
                        if (v == var) vsort = s;
                    if (vsort.empty()) throw input_error("assignment binds unused var " + var);
                    a.set(var, vsort, Point(M.point(vsort, label.get<std::string>())));
                }
            }
            WitnessedValue w = evaluate_witness(M, f, a, opts);
            json res;
            res["formula"] = print_formula(f);
            res["value"] = bounds_to_json(w.bounds);
            res["witness"] = witness_json(w.witness);
            emit(argv_vec, inputs, res, t0);
        } else if (c_mod->parsed()) {
            MetricStructure M = load_structure_checked(inputs, structure_path, g.max_points);
            inputs.note(formula_text);
            Formula f = parse_formula(formula_text, M.sig, cap);
            Modulus m = derived_modulus(f, M.sig);
            json res;
            res["formula"] = print_formula(f);
            res["modulus"] = modulus_to_json(m);
            res["describe"] = m.describe();
            json caps = json::array();
            for (const std::string& v : cap_violations(f, M.sig)) caps.push_back(v);
            res["cap_flags"] = caps;
            emit(argv_vec, inputs, res, t0);
        } else if (c_scheme->parsed()) {
            MetricStructure M = load_structure_checked(inputs, structure_path, g.max_points);
            json pj = params_text.empty() ? json::object() : json::parse(params_text);
            pj["name"] = scheme_name;
            inputs.note(pj.dump());
            Scheme s = scheme_from_json(pj);
            DefectReport rep = scheme_defect(M, s, opts);
            json res;
            res["scheme"] = scheme_name;
            json entries = json::array();
            for (const auto& e : rep.entries) {
                json ej;
                ej["name"] = e.name;
                ej["axiom"] = e.text;
                ej["value"] = bounds_to_json(e.bounds);
                ej["witness"] = witness_json(e.witness);
                ej["is_axiom"] = e.is_axiom;
                entries.push_back(ej);
            }
            res["entries"] = entries;
            res["worst_defect"] = scalar_to_json(rep.worst);
            res["worst_axiom"] = rep.worst_axiom;
            res["worst_witness"] = witness_json(rep.worst_witness);
            if (!rep.note.empty()) res["note"] = rep.note;
            emit(argv_vec, inputs, res, t0);
            if (rep.worst.dbl() > g.tol) exit_code = 1;
        } else if (c_ultra->parsed()) {
            StructureSequence seq;
            if (!sequence_path.empty()) {
                seq = sequence_from_json(inputs.load(sequence_path));
            } else if (!family.empty()) {
                inputs.note(family + std::to_string(range[0]) + std::to_string(range[1]));
                json sj;
                sj["family"] = family;
                sj["range"] = range;
                seq = sequence_from_json(sj);
            } else {
                throw input_error("ultra needs --sequence or --family");
            }
            inputs.note(formula_text);
            Formula f = parse_formula(formula_text, seq.generator(1).sig, cap);
            ConvergenceReport rep = ultra_eval(seq, f, window, opts);
            json res;
            res["formula"] = print_formula(f);
            json vals = json::array();
            for (const Scalar& v : rep.values) vals.push_back(scalar_to_json(v));
            res["values"] = vals;
            res["window"] = rep.window;
            res["classification"] = rep.tail == Tail::Convergent    ? "convergent"
                                    : rep.tail == Tail::Oscillating ? "oscillating"
                                                                    : "undetermined";
            if (rep.tail == Tail::Convergent) {
                res["limit"] = scalar_to_json(rep.limit);
                res["limit_tol"] = scalar_to_json(rep.limit_tol);
            }
            res["values_certified"] = rep.values_certified;
            emit(argv_vec, inputs, res, t0);
        } else if (c_aut->parsed()) {
            MetricStructure M = load_structure_checked(inputs, structure_path, g.max_points);
            AutGroup aut = automorphisms(M, aut_cap, g.tol);
            json res;
            res["order"] = aut.size();
            res["generators"] = aut.generators;
            json members = json::array();
            for (const AutMap& m : aut.members) {
                json mj;
                for (const auto& [s, p] : m.perm) mj[s] = p;
                members.push_back(mj);
            }
            res["members"] = members;
            emit(argv_vec, inputs, res, t0);
        } else if (c_oligo->parsed()) {
            MetricStructure M = load_structure_checked(inputs, structure_path, g.max_points);
            AutGroup aut = automorphisms(M, aut_cap, g.tol);
            OligoResult r = approx_oligo(M, arity, eps, aut, sort);
            json res;
            res["n"] = arity;
            res["eps"] = eps;
            res["F_size"] = r.F.size();
            json F = json::array();
            const SortCarrier& c = M.carrier(sort);
            for (const auto& t : r.F) {
                json tj = json::array();
                for (int i : t) tj.push_back(c.labels[i]);
                F.push_back(tj);
            }
            res["F"] = F;
            double worst = 0;
            for (const auto& e : r.certificate) worst = std::max(worst, e.distance);
            res["worst_certificate_distance"] = worst;
            res["certificate_size"] = r.certificate.size();
            emit(argv_vec, inputs, res, t0);
        } else if (c_bound->parsed()) {
            MetricStructure M = load_structure_checked(inputs, structure_path, g.max_points);
            inputs.note(r_text + std::to_string(kk));
            BoundednessReport rep = boundedness_battery(M, rat_from_string(r_text), kk, sort);
            auto cov = [](const CoverResult& c) {
                json o;
                o["success"] = c.success;
                o["F_size"] = c.F_size;
                o["F"] = c.F;
                o["length_used"] = c.length_used;
                return o;
            };
            json res;
            res["r"] = rat_to_json(rep.r);
            res["k"] = rep.k;
            res["V_size"] = rep.V_size;
            res["FVk"] = cov(rep.fvk);
            res["VkFVk"] = cov(rep.vkfvk);
            res["VFV"] = cov(rep.vfv);
            res["FV_pow_k"] = cov(rep.fvpk);
            emit(argv_vec, inputs, res, t0);
        } else if (c_cayley->parsed()) {
            MetricStructure M = load_structure_checked(inputs, structure_path, g.max_points);
            inputs.note(gens_text);
            CayleyBoundResult r = cayley_bound(M, split_csv(gens_text), cap_n);
            json res;
            res["generates"] = r.generates;
            if (r.generates) res["n"] = r.n;
            else res["reached_subgroup"] = r.reached;
            emit(argv_vec, inputs, res, t0);
        } else if (c_chain->parsed()) {
            MetricStructure M = load_structure_checked(inputs, structure_path, g.max_points);
            json sets_json = json::parse(sets_text);
            inputs.note(sets_json.dump());
            std::vector<std::vector<std::string>> sets =
                sets_json.get<std::vector<std::vector<std::string>>>();
            ChainReport rep = chain_validate(M, sets);
            json res;
            res["ok"] = rep.ok;
            res["violations"] = rep.violations;
            res["covering_level"] = rep.covering_level;
            emit(argv_vec, inputs, res, t0);
            if (!rep.ok) exit_code = 1;
        } else if (c_cat->parsed()) {
            MetricStructure M = load_structure_checked(inputs, structure_path, g.max_points);
            inputs.note(rho_text + eps_text + std::to_string(nn));
            Rat rho = rat_from_string(rho_text);
            Rat eeps = rat_from_string(eps_text);
            GRhoResult gr = g_rho(M, rho);
            int power = nn > 0 ? nn : gr.exponent;
            WitnessedValue dd = definability_defect(M, rho, power, eeps, opts);
            AutGroup aut = automorphisms(M, aut_cap, g.tol);
            int orbits = quotient_orbits(M, gr, aut);
            TypeFamily fam = TypeFamily::make(M.sig, {"G"}, depth);
            NearHomogReport nh = near_homog_defect(M, 1, fam, 0.0, aut, opts);
            const SortCarrier& c = M.carrier("G");
            json res;
            res["note"] = "finite carrier: every subgroup is compact and clopen; the report "
                          "checks the construction, not the non-compact hypothesis";
            res["rho"] = rat_to_json(rho);
            json ball = json::array();
            for (int i : gr.ball) ball.push_back(c.labels[i]);
            res["ball"] = ball;
            res["stabilization_exponent"] = gr.exponent;
            res["subgroup_order"] = gr.subgroup.size();
            res["coset_count"] = gr.cosets.size();
            res["definability_defect"] = bounds_to_json(dd.bounds);
            res["definability_witness"] = witness_json(dd.witness);
            res["definability_power"] = power;
            res["aut_order"] = aut.size();
            res["quotient_orbits"] = orbits;
            res["near_homogeneity_defect"] = nh.defect;
            res["type_family_size"] = fam.formulas.size();
            emit(argv_vec, inputs, res, t0);
        } else if (c_types->parsed()) {
            MetricStructure M = load_structure_checked(inputs, structure_path, g.max_points);
            json res;
            if (!phi_text.empty() || !psi_text.empty()) {
                inputs.note(phi_text + "|" + psi_text);
                Formula phi = parse_formula(phi_text, M.sig, cap);
                Formula psi = parse_formula(psi_text, M.sig, cap);
                ValueBounds d = formula_pseudometric({&M}, phi, psi, opts);
                res["dT"] = bounds_to_json(d);
            } else {
                std::vector<std::string> sorts(arity, sort);
                TypeFamily fam = TypeFamily::make(M.sig, sorts, depth);
                res["family_size"] = fam.formulas.size();
                res["depth"] = depth;
                if (!tuple_text.empty()) {
                    inputs.note(tuple_text);
                    std::vector<int> tuple;
                    for (const std::string& lbl : split_csv(tuple_text))
                        tuple.push_back(M.point(sort, lbl));
                    TypePoint p = tp(M, tuple, fam, opts);
                    json vals = json::array();
                    for (size_t i = 0; i < p.values.size(); ++i) {
                        json e;
                        e["formula"] = print_formula(fam.formulas[i]);
                        e["value"] = scalar_to_json(p.values[i]);
                        vals.push_back(e);
                    }
                    res["tp"] = vals;
                } else {
                    inputs.note(std::to_string(eps));
                    EpsNet net = eps_net(M, arity, eps, fam, opts);
                    res["eps"] = eps;
                    res["net_size"] = net.net.size();
                    const SortCarrier& c = M.carrier(sort);
                    json netj = json::array();
                    for (const TypePoint& p : net.net) {
                        json tj = json::array();
                        for (int i : p.realizer) tj.push_back(c.labels[i]);
                        netj.push_back(tj);
                    }
                    res["net"] = netj;
                    double worst = 0;
                    for (const auto& e : net.certificate)
                        worst = std::max(worst, e.distance);
                    res["worst_certificate_distance"] = worst;
                    res["certificate_size"] = net.certificate.size();
                }
            }
            emit(argv_vec, inputs, res, t0);
        }
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return exit_code;
}
