// Acceptance suite: one pass/fail line per criterion, each with its runtime
// budget pinned. Exit code = number of failed criteria.

#include "contilog/analysis.hpp"
#include "contilog/axioms.hpp"
#include "contilog/builders.hpp"
#include "contilog/catgrp.hpp"
#include "contilog/enumerate.hpp"
#include "contilog/parser.hpp"
#include "contilog/ultra.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

using namespace contilog;

namespace {

struct Criterion {
    int id;
    std::string name;
    double budget_seconds;
    std::function<void(std::ostringstream&)> run; // throws on failure
};

struct failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define REQUIRE_ACC(cond, msg)                                    \
    do {                                                          \
        if (!(cond)) throw failure(std::string("check failed: ") + msg); \
    } while (0)

// --------------------------------------------------------------------------
// 1. abelian ultraproduct regression

void crit_abelian(std::ostringstream& note) {
    auto comm_text = "sup x:G. sup y:G. d(mul(x,y),mul(y,x))";
    // brute force over all pairs, straight from the permutation images
    for (int n = 1; n <= 3; ++n) {
        MetricStructure M = gn_family(n);
        const SortCarrier& c = M.carrier("G");
        Rat brute = 0;
        for (int i = 0; i < c.size(); ++i)
            for (int j = 0; j < c.size(); ++j) {
                auto xy = perm_compose(c.perms[i], c.perms[j]);
                auto yx = perm_compose(c.perms[j], c.perms[i]);
                int moved = 0;
                for (size_t k = 0; k < xy.size(); ++k)
                    if (xy[k] != yx[k]) ++moved;
                brute = std::max(brute, Rat(moved, static_cast<long>(xy.size())));
            }
        REQUIRE_ACC(brute == Rat(3, (1 << n) + 3), "brute force at n=" + std::to_string(n));
        ValueBounds v = evaluate(M, parse_formula(comm_text, M.sig));
        REQUIRE_ACC(v.certified && v.hi.exact(), "rational evaluation");
        REQUIRE_ACC(v.hi.rat() == brute, "evaluator matches brute force");
    }
    StructureSequence seq = gn_sequence(1, 6);
    Formula comm = parse_formula(comm_text, seq.generator(1).sig);
    ConvergenceReport rep = ultra_eval(seq, comm, 3);
    for (int n = 1; n <= 6; ++n) {
        REQUIRE_ACC(rep.values[n - 1].exact(), "exact value at n=" + std::to_string(n));
        REQUIRE_ACC(rep.values[n - 1].rat() == Rat(3, (1 << n) + 3),
                    "closed form at n=" + std::to_string(n));
        if (n > 1)
            REQUIRE_ACC(rep.values[n - 1].rat() < rep.values[n - 2].rat(),
                        "strict decrease");
    }
    REQUIRE_ACC(rep.tail == Tail::Convergent, "tail classified convergent");
    REQUIRE_ACC(rep.limit.rat() == 0, "limit 0");
    note << "values 3/(2^n+3) exact for n=1..6, convergent to 0";
}

// --------------------------------------------------------------------------
// 2. crisp collapse

void crit_crisp(std::ostringstream& note) {
    MetricStructure z6 = cyclic_group(6);
    MetricStructure s3 = discrete_wrap(sym_hamming(3));
    int checked = 0;
    for (const MetricStructure* M : {&z6, &s3}) {
        RandomFormulaOptions ro;
        ro.depth = 3;
        ro.count = 210;
        ro.seed = 1234;
        ro.allow_half = false;
        for (const Formula& s : random_sentences(M->sig, ro)) {
            Scalar v = evaluate(*M, s).hi;
            REQUIRE_ACC(v.exact(), "exact evaluation");
            REQUIRE_ACC(v.rat() == 0 || v.rat() == 1,
                        "crisp value, got " + v.str() + " on " + print_formula(s));
            ++checked;
        }
    }
    Formula comm = parse_formula("sup x:G. sup y:G. d(mul(x,y),mul(y,x))", z6.sig);
    Scalar a = evaluate(z6, comm).hi;
    Scalar b = evaluate(s3, comm).hi;
    REQUIRE_ACC(a.rat() == 0 && b.rat() == 1, "commutativity separates Z6 from S3");
    note << checked << " sentences crisp; commutativity 0 vs 1";
}

// --------------------------------------------------------------------------
// 3. modulus soundness on Sym(4)

void crit_modulus(std::ostringstream& note) {
    MetricStructure M = sym_hamming(4);
    const SortCarrier& c = M.carrier("G");
    RandomFormulaOptions ro;
    ro.depth = 3;
    ro.count = 400;
    ro.seed = 77;
    auto pool = random_formulas(M.sig, {{"x", "G"}}, ro);
    int used = 0;
    for (const Formula& f : pool) {
        if (used == 10) break;
        if (free_vars(f).size() != 1) continue;
        if (!derived_modulus(f, M.sig).is_id()) continue;
        ++used;
        std::vector<Scalar> vals;
        vals.reserve(c.size());
        for (int i = 0; i < c.size(); ++i) {
            Assignment a;
            a.set("x", "G", Point(i));
            vals.push_back(evaluate(M, f, a).hi);
        }
        for (int i = 0; i < c.size(); ++i)
            for (int j = 0; j < c.size(); ++j)
                REQUIRE_ACC((vals[i] - vals[j]).abs().rat() <= c.finite_dist(i, j),
                            "Lipschitz bound on " + print_formula(f));
    }
    REQUIRE_ACC(used == 10, "found ten id-modulus formulas");
    note << "10 formulas, exhaustive over 24x24 assignments, zero violations";
}

// --------------------------------------------------------------------------
// 4. tree axioms

void crit_tree(std::ostringstream& note) {
    std::mt19937_64 rng(20240617);
    for (int trial = 0; trial < 20; ++trial) {
        GraphInput in;
        int n = 2 + static_cast<int>(rng() % 14);
        in.basepoint = "v0";
        for (int v = 1; v < n; ++v)
            in.edges.push_back({"v" + std::to_string(rng() % v), "v" + std::to_string(v),
                                Rat(1 + static_cast<long>(rng() % 3))});
        TreeDefectReport rep = tree_defect(tree_space(in));
        REQUIRE_ACC(rep.combined.hi.exact() && rep.combined.hi.rat() == 0,
                    "tree defect 0 at trial " + std::to_string(trial));
    }
    GraphInput cyc;
    cyc.basepoint = "a";
    cyc.edges = {{"a", "b", Rat(1)}, {"b", "c", Rat(1)}, {"c", "d", Rat(1)},
                 {"d", "a", Rat(1)}};
    TreeDefectReport rep = tree_defect(graph_space(cyc));
    REQUIRE_ACC(rep.hyperbolicity.hi.rat() == Rat(2), "4-cycle hyperbolicity defect 2");
    note << "20 random trees exact 0; unit 4-cycle defect exactly 2";
}

// --------------------------------------------------------------------------
// 5. K_aiv rotation regression

void crit_aiv(std::ostringstream& note) {
    for (int m : {3, 4, 8}) {
        MetricStructure M = zm_rotation_action(m, 1);
        Scheme aiv;
        aiv.name = "aiv";
        aiv.m = 1;
        aiv.n = 1;
        DefectReport rep = scheme_defect(M, aiv);
        double closed = 2 * std::sin(M_PI / m);
        const DefectReport::Entry* disp = nullptr;
        for (const auto& e : rep.entries)
            if (!e.is_axiom) disp = &e;
        REQUIRE_ACC(disp != nullptr, "displacement entry present");
        REQUIRE_ACC(disp->bounds.hi.dbl() <= closed + 1e-3,
                    "certified upper bound at m=" + std::to_string(m));
        REQUIRE_ACC(disp->bounds.hi.dbl() >= closed - 1e-3,
                    "upper bound reaches the closed form at m=" + std::to_string(m));
        REQUIRE_ACC(disp->bounds.lo.dbl() >= closed - 1e-2,
                    "sampled lower bound at m=" + std::to_string(m));
    }
    note << "inf-sup displacement within 1e-3 of 2 sin(pi/m) for m=3,4,8";
}

// --------------------------------------------------------------------------
// 6. section-3 construction on gn_family(1)

void crit_grho(std::ostringstream& note) {
    MetricStructure g1 = gn_family(1);
    GRhoResult wide = g_rho(g1, Rat(9, 20));
    REQUIRE_ACC(wide.exponent <= 3, "stabilization exponent <= 3");
    REQUIRE_ACC(wide.subgroup.size() == 12, "G_rho = G at rho = 0.45");
    GRhoResult narrow = g_rho(g1, Rat(3, 10));
    REQUIRE_ACC(narrow.subgroup.size() == 1, "G_rho = {1} at rho = 0.3");
    REQUIRE_ACC(narrow.cosets.size() == 12, "12 cosets");

    for (const auto& [rho, gr] :
         std::vector<std::pair<Rat, const GRhoResult*>>{{Rat(9, 20), &wide},
                                                        {Rat(3, 10), &narrow}}) {
        WitnessedValue dd = definability_defect(g1, rho, gr->exponent, Rat(0));
        REQUIRE_ACC(dd.bounds.hi.exact() && dd.bounds.hi.rat() == 0,
                    "definability defect 0 at the stabilization exponent");
    }

    AutGroup aut = automorphisms(g1);
    // independent orbit-enumeration oracle on the coset spaces
    auto oracle = [&](const GRhoResult& gr) {
        int k = static_cast<int>(gr.cosets.size());
        std::vector<int> coset_of(12, -1);
        for (int ci = 0; ci < k; ++ci)
            for (int x : gr.cosets[ci]) coset_of[x] = ci;
        std::set<std::set<int>> orbits;
        for (int ci = 0; ci < k; ++ci) {
            std::set<int> orbit;
            std::vector<int> stack = {ci};
            while (!stack.empty()) {
                int cur = stack.back();
                stack.pop_back();
                if (!orbit.insert(cur).second) continue;
                for (const AutMap& a : aut.members)
                    stack.push_back(coset_of[a.perm.at("G")[gr.cosets[cur][0]]]);
            }
            orbits.insert(orbit);
        }
        return static_cast<int>(orbits.size());
    };
    REQUIRE_ACC(quotient_orbits(g1, wide, aut) == oracle(wide), "orbit oracle at 0.45");
    REQUIRE_ACC(quotient_orbits(g1, narrow, aut) == oracle(narrow), "orbit oracle at 0.3");
    note << "exponent " << wide.exponent << ", orbits " << quotient_orbits(g1, narrow, aut)
         << " matching the oracle";
}

// --------------------------------------------------------------------------
// 7. type-space properties

void crit_types(std::ostringstream& note) {
    MetricStructure s3 = sym_hamming(3);
    MetricStructure g1 = gn_family(1);

    // d^T symmetry and triangle inequality on 100 random triples
    RandomFormulaOptions ro;
    ro.depth = 2;
    ro.count = 300;
    ro.seed = 55;
    auto pool = random_formulas(g1.sig, {{"x", "G"}}, ro);
    std::vector<const MetricStructure*> structs = {&s3, &g1};
    for (int t = 0; t < 100; ++t) {
        const Formula& a = pool[3 * t];
        const Formula& b = pool[3 * t + 1];
        const Formula& c = pool[3 * t + 2];
        double ab = formula_pseudometric(structs, a, b).hi.dbl();
        double ba = formula_pseudometric(structs, b, a).hi.dbl();
        double ac = formula_pseudometric(structs, a, c).hi.dbl();
        double cb = formula_pseudometric(structs, c, b).hi.dbl();
        REQUIRE_ACC(std::fabs(ab - ba) <= 1e-12, "d^T symmetry");
        REQUIRE_ACC(ab <= ac + cb + 1e-12, "d^T triangle inequality");
    }

    // Lipschitz comparison, exhaustive on both structures
    for (const MetricStructure* M : structs) {
        TypeFamily fam = TypeFamily::make(M->sig, {"G"}, 2, 120);
        std::vector<bool> is_id;
        for (const Formula& f : fam.formulas)
            is_id.push_back(derived_modulus(f, M->sig).is_id());
        const SortCarrier& c = M->carrier("G");
        std::vector<TypePoint> pts;
        for (int i = 0; i < c.size(); ++i) pts.push_back(tp(*M, {i}, fam));
        for (int i = 0; i < c.size(); ++i)
            for (int j = 0; j < c.size(); ++j) {
                Scalar td = type_distance(*M, pts[i], pts[j], fam);
                for (size_t k = 0; k < fam.formulas.size(); ++k)
                    if (is_id[k])
                        REQUIRE_ACC(
                            (pts[i].values[k] - pts[j].values[k]).abs().rat() <= td.rat(),
                            "|p(phi) - q(phi)| <= d(p,q)");
            }
    }

    // eps-net certificate against a brute-force cover oracle
    TypeFamily gfam = TypeFamily::make(g1.sig, {"G"}, 2, 120);
    double eps = 0.5;
    EpsNet net = eps_net(g1, 1, eps, gfam);
    for (const auto& e : net.certificate)
        REQUIRE_ACC(e.distance <= eps + 1e-9, "certificate within eps");
    auto classes = realized_types(g1, gfam);
    size_t K = classes.size();
    std::vector<std::vector<double>> dist(K, std::vector<double>(K, 0));
    for (size_t i = 0; i < K; ++i)
        for (size_t j = i + 1; j < K; ++j)
            dist[i][j] = dist[j][i] = type_distance(g1, classes[i], classes[j], gfam).dbl();
    auto min_cover = [&](double radius) {
        for (size_t size = 1; size <= K; ++size) {
            std::vector<bool> pick(K, false);
            std::fill(pick.end() - static_cast<long>(size), pick.end(), true);
            do {
                bool covers = true;
                for (size_t i = 0; i < K && covers; ++i) {
                    bool near = false;
                    for (size_t j = 0; j < K; ++j)
                        if (pick[j] && dist[i][j] <= radius + 1e-9) near = true;
                    covers = near;
                }
                if (covers) return size;
            } while (std::next_permutation(pick.begin(), pick.end()));
        }
        return K;
    };
    REQUIRE_ACC(net.net.size() >= min_cover(eps), "net at least the optimum");
    REQUIRE_ACC(net.net.size() <= min_cover(eps / 2), "net within the greedy factor");
    note << "100 triples, exhaustive Lipschitz comparison, net "
         << net.net.size() << " in [opt(eps), opt(eps/2)]";
}

// --------------------------------------------------------------------------
// 8. scheme negative controls

void crit_negative(std::ostringstream& note) {
    // corrupted multiplication table
    std::vector<std::vector<int>> z6(6, std::vector<int>(6));
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) z6[i][j] = (i + j) % 6;
    z6[2][3] = 4;
    Scheme grp;
    grp.name = "group";
    DefectReport rep = scheme_defect(cayley_group(z6, {}, false), grp);
    REQUIRE_ACC(rep.worst.rat() > 0, "corrupted table has positive group defect");
    REQUIRE_ACC(!rep.worst_witness.empty(), "witness reported");

    // violated nu table in wrap_action
    MetricStructure z2 = cyclic_group(2);
    WrapActionSpec spec;
    GeneratorMap gm;
    gm.element = "1";
    gm.matrix = {{-1, 0}, {0, 1}};
    gm.translation = {1, 0};
    spec.generators.push_back(gm);
    spec.nu.table[{1, 1}] = 1; // affine shift by a unit vector needs m+1
    spec.hilbert = HilbertOptions{Field::Real, 2, 2, {}};
    bool rejected = false;
    std::string witness;
    try {
        wrap_action(z2, spec);
    } catch (const action_error& e) {
        rejected = true;
        witness = e.witness;
    }
    REQUIRE_ACC(rejected, "nu violation rejected");
    REQUIRE_ACC(!witness.empty(), "nu violation carries a witness");

    // planted chain closure violation
    MetricStructure z6ok = cyclic_group(6);
    ChainReport chain = chain_validate(z6ok, {{"0", "1"}, {"0", "1", "5"}});
    REQUIRE_ACC(!chain.ok, "planted chain violation flagged");
    bool witnessed = false;
    for (const auto& v : chain.violations)
        if (v.find("escapes") != std::string::npos) witnessed = true;
    REQUIRE_ACC(witnessed, "chain violation carries a witness");
    note << "all three controls rejected with witnesses";
}

} // namespace

int main() {
    std::vector<Criterion> criteria = {
        {1, "abelian-ultraproduct-regression", 60.0, crit_abelian},
        {2, "crisp-collapse", 30.0, crit_crisp},
        {3, "modulus-soundness", 120.0, crit_modulus},
        {4, "tree-axioms", 10.0, crit_tree},
        {5, "kaiv-rotation-regression", 30.0, crit_aiv},
        {6, "section3-construction", 30.0, crit_grho},
        {7, "type-space-properties", 60.0, crit_types},
        {8, "scheme-negative-controls", 10.0, crit_negative},
    };
    int failures = 0;
    for (const Criterion& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        std::ostringstream note;
        std::string verdict = "PASS";
        std::string detail;
        try {
            c.run(note);
            detail = note.str();
        } catch (const std::exception& e) {
            verdict = "FAIL";
            detail = e.what();
            ++failures;
        }
        double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (verdict == "PASS" && secs > c.budget_seconds) {
            verdict = "FAIL";
            detail = "over the runtime budget";
            ++failures;
        }
        std::printf("%s  %d  %-34s  (%.2f s / %.0f s)  %s\n", verdict.c_str(), c.id,
                    c.name.c_str(), secs, c.budget_seconds, detail.c_str());
    }
    if (failures == 0) std::printf("all %zu acceptance criteria passed\n", criteria.size());
    else std::printf("%d acceptance criteria FAILED\n", failures);
    return failures;
}
