#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "contilog/analysis.hpp"
#include "contilog/axioms.hpp"
#include "contilog/builders.hpp"
#include "contilog/enumerate.hpp"
#include "contilog/eval.hpp"
#include "contilog/parser.hpp"

#include <random>

using namespace contilog;

TEST_CASE("evaluator basics") {
    MetricStructure s3 = sym_hamming(3);
    CHECK(evaluate(s3, parse_formula("d(1,1)", s3.sig)).hi.rat() == 0);

    ValueBounds comm =
        evaluate(s3, parse_formula("sup x:G. sup y:G. d(mul(x,y),mul(y,x))", s3.sig));
    CHECK(comm.certified);
    CHECK(comm.hi.rat() == 1);

    MetricStructure g1 = gn_family(1);
    ValueBounds v =
        evaluate(g1, parse_formula("sup x:G. sup y:G. d(mul(x,y),mul(y,x))", g1.sig));
    CHECK(v.hi.rat() == Rat(3, 5));
    CHECK(v.hi.dbl() == doctest::Approx(0.6));

    // unbound variable and sort mismatch errors
    CHECK_THROWS_AS(evaluate(s3, parse_formula("d(x,1)", s3.sig)), eval_error);
    Assignment bad;
    bad.set("x", "H", Point(0));
    CHECK_THROWS_AS(evaluate(s3, parse_formula("d(x,1)", s3.sig), bad), eval_error);
}

TEST_CASE("optimizer reaches the unit sphere") {
    MetricStructure T = hilbert_tower({Field::Real, 2, 1, {}});
    Formula f = parse_formula("inf v:B1. absdiff(norm(v),1)", T.sig);
    ValueBounds v = evaluate(T, f);
    CHECK(!v.certified);
    CHECK(v.hi.dbl() <= 1e-6); // attained at any unit vector
}

TEST_CASE("witness tracking on finite quantifier prefixes") {
    MetricStructure s3 = sym_hamming(3);
    WitnessedValue w = evaluate_witness(
        s3, parse_formula("sup x:G. sup y:G. d(mul(x,y),mul(y,x))", s3.sig));
    REQUIRE(w.witness.size() == 2);
    CHECK(w.witness[0].first == "x");
    // re-check the witness by direct evaluation
    Assignment a;
    a.set("x", "G", Point(s3.point("G", w.witness[0].second)));
    a.set("y", "G", Point(s3.point("G", w.witness[1].second)));
    Formula body = parse_formula("d(mul(x,y),mul(y,x))", s3.sig);
    CHECK(evaluate(s3, body, a).hi.rat() == 1);
}

TEST_CASE("quantifier duality") {
    // inf_x phi = C - sup_x not(phi), exactly, on finite sorts
    for (MetricStructure M : {sym_hamming(3), gn_family(1)}) {
        RandomFormulaOptions ro;
        ro.depth = 2;
        ro.count = 60;
        ro.seed = 19;
        auto bodies = random_formulas(M.sig, {{"x", "G"}}, ro);
        for (const Formula& body : bodies) {
            Formula lhs = finf("x", "G", body);
            lhs.cap = 1;
            resolve_formula(lhs, M.sig);
            Formula rhs = fsup("x", "G", fneg(body));
            rhs.cap = 1;
            resolve_formula(rhs, M.sig);
            Scalar a = evaluate(M, lhs).hi;
            Scalar b = evaluate(M, rhs).hi;
            CHECK(a.rat() == Rat(1) - b.rat());
        }
    }
}

TEST_CASE("crisp collapse on discrete structures") {
    // half-free sentences take values exactly 0 or 1 on {0,1}-metric groups
    for (MetricStructure M : {cyclic_group(6), discrete_wrap(sym_hamming(3))}) {
        RandomFormulaOptions ro;
        ro.depth = 3;
        ro.count = 220;
        ro.seed = 23;
        ro.allow_half = false;
        auto sentences = random_sentences(M.sig, ro);
        for (const Formula& s : sentences) {
            Scalar v = evaluate(M, s).hi;
            REQUIRE(v.exact());
            CHECK((v.rat() == 0 || v.rat() == 1));
        }
    }
    // ... and half breaks the dichotomy
    MetricStructure z2 = cyclic_group(2);
    CHECK(evaluate(z2, parse_formula("half(sup x:G. d(x,1))", z2.sig)).hi.rat() ==
          Rat(1, 2));
}

TEST_CASE("sup over a subset never exceeds sup over the sort") {
    MetricStructure M = gn_family(1);
    RandomFormulaOptions ro;
    ro.depth = 2;
    ro.count = 40;
    ro.seed = 31;
    auto bodies = random_formulas(M.sig, {{"x", "G"}}, ro);
    std::mt19937_64 rng(77);
    const SortCarrier& c = M.carrier("G");
    for (const Formula& body : bodies) {
        std::vector<int> subset;
        for (int i = 0; i < c.size(); ++i)
            if (rng() % 2) subset.push_back(i);
        if (subset.empty()) subset.push_back(static_cast<int>(rng() % c.size()));
        std::optional<Scalar> sub_max;
        std::optional<Scalar> full_max;
        for (int i = 0; i < c.size(); ++i) {
            Assignment a;
            a.set("x", "G", Point(i));
            Scalar v = evaluate(M, body, a).hi;
            if (!full_max || v > *full_max) full_max = v;
        }
        for (int i : subset) {
            Assignment a;
            a.set("x", "G", Point(i));
            Scalar v = evaluate(M, body, a).hi;
            if (!sub_max || v > *sub_max) sub_max = v;
        }
        CHECK(sub_max->rat() <= full_max->rat());
    }
}

TEST_CASE("1-Lipschitz bound for derived-id formulas on Sym(4)") {
    MetricStructure M = sym_hamming(4);
    EnumOptions eo;
    eo.max_depth = 3;
    eo.total_cap = 3000;
    auto formulas = enum_formulas(M.sig, {{"x", "G"}}, eo);
    const SortCarrier& c = M.carrier("G");
    int checked = 0;
    for (const Formula& f : formulas) {
        if (free_vars(f).size() != 1) continue;
        if (!derived_modulus(f, M.sig).is_id()) continue;
        if (++checked > 60) break;
        std::vector<Scalar> vals;
        for (int i = 0; i < c.size(); ++i) {
            Assignment a;
            a.set("x", "G", Point(i));
            vals.push_back(evaluate(M, f, a).hi);
        }
        for (int i = 0; i < c.size(); ++i)
            for (int j = 0; j < c.size(); ++j)
                CHECK((vals[i] - vals[j]).abs().rat() <= c.finite_dist(i, j));
    }
    CHECK(checked > 20);
}

TEST_CASE("check_modulus") {
    MetricStructure s4 = sym_hamming(4);
    std::vector<Rat> grid = {Rat(1, 4), Rat(1, 2), Rat(1)};
    // group operations are 1-Lipschitz in each argument (bi-invariance)
    ModulusReport mul_rep = check_modulus(s4, *s4.sig.resolve("mul", {"G", "G"}), grid);
    CHECK(mul_rep.ok());
    ModulusReport inv_rep = check_modulus(s4, *s4.sig.resolve("inv", {"G"}), grid);
    CHECK(inv_rep.ok());

    // scalar multiplication respects its declared z/2 modulus (sampled)
    MetricStructure T = hilbert_tower({Field::Real, 2, 4, {}});
    ModulusReport lam = check_modulus(T, *T.sig.resolve("lam2", {"B1"}), grid);
    CHECK(lam.ok(1e-6));

    // negative control: a deliberately jumpy predicate on a small table space
    MetricStructure P = tree_space({{{"a", "b", Rat(1, 4)}}, "a"});
    MetricStructure Pbad =
        with_predicate(P, "F", {"B1"}, Rat(0), Rat(1), {Rat(0), Rat(1)});
    ModulusReport bad = check_modulus(Pbad, *Pbad.sig.resolve("F", {"B1"}), {Rat(1, 2)});
    CHECK(!bad.ok());
    CHECK(!bad.worst_witness.empty());
    CHECK(bad.worst_margin == doctest::Approx(0.5));
}

TEST_CASE("formula enumeration is deterministic and hits the spec examples") {
    Signature sig = group_signature();
    EnumOptions e1;
    e1.max_depth = 1;
    auto f1 = enum_formulas(sig, {{"x", "G"}}, e1);
    bool has_dx1 = false;
    for (const Formula& f : f1)
        if (print_formula(f) == "d(x,1)") has_dx1 = true;
    CHECK(has_dx1);

    EnumOptions e2;
    e2.max_depth = 2;
    auto f2 = enum_formulas(sig, {{"x", "G"}}, e2);
    bool has_sub = false;
    for (const Formula& f : f2)
        if (print_formula(f) == "sub(d(x,1),d(x,x))") has_sub = true;
    CHECK(has_sub);

    auto again = enum_formulas(sig, {{"x", "G"}}, e2);
    REQUIRE(again.size() == f2.size());
    for (size_t i = 0; i < f2.size(); ++i)
        CHECK(print_formula(again[i]) == print_formula(f2[i]));
}

TEST_CASE("depth-bounded elementary equivalence") {
    MetricStructure s3 = sym_hamming(3);
    EquivReport same = elem_equiv_depth(s3, sym_hamming(3), 3);
    CHECK(same.max_discrepancy == 0);
    CHECK(same.first_distinguishing.empty());

    // crisp Z6 vs S3: the commutativity sentence separates them (0 vs 1)
    MetricStructure z6 = cyclic_group(6);
    MetricStructure d3 = discrete_wrap(sym_hamming(3));
    EquivReport diff = elem_equiv_depth(z6, d3, 3);
    CHECK(!diff.equivalent(1e-9));
    CHECK(diff.max_discrepancy == doctest::Approx(1.0));
    Formula comm = parse_formula("sup x:G. sup y:G. d(mul(x,y),mul(y,x))", z6.sig);
    CHECK(evaluate(z6, comm).hi.rat() == 0);
    CHECK(evaluate(d3, comm).hi.rat() == 1);

    // the trivial subgroup is distinguished from S3 at depth 2
    MetricStructure triv = cayley_group({{0}});
    EquivReport tiny = elem_equiv_depth(triv, d3, 2);
    CHECK(!tiny.equivalent(1e-9));
    CHECK(tiny.max_discrepancy == doctest::Approx(1.0));
    Formula diam = parse_formula("sup x:G. d(x,1)", triv.sig);
    CHECK(evaluate(triv, diam).hi.rat() == 0);
    CHECK(evaluate(d3, diam).hi.rat() == 1);

    // mismatched signatures are rejected
    MetricStructure T = hilbert_tower({Field::Real, 2, 1, {}});
    CHECK_THROWS_AS(elem_equiv_depth(s3, T, 2), eval_error);
}
