#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "contilog/axioms.hpp"
#include "contilog/parser.hpp"

#include <cmath>
#include <random>

using namespace contilog;

TEST_CASE("compile_scheme is deterministic and matches the expected shapes") {
    Signature group = group_signature();
    Scheme grp;
    grp.name = "group";
    auto axioms = compile_scheme(grp, group);
    REQUIRE(axioms.size() == 3);
    CHECK(axioms[0].text ==
          "sup x:G. sup y:G. sup z:G. d(mul(mul(x,y),z),mul(x,mul(y,z)))");
    CHECK(axioms[1].text == "sup x:G. d(mul(x,1),x)");
    CHECK(axioms[2].text == "sup x:G. d(mul(x,inv(x)),1)");

    Signature gpq = group_signature();
    gpq.add_predicate("P", {"G"}, Rat(0), Rat(1));
    gpq.add_predicate("Q", {"G"}, Rat(0), Rat(1));
    Scheme th;
    th.name = "theta";
    th.m = 1;
    th.k = 1;
    th.eps = Rat(1, 2);
    auto thax = compile_scheme(th, gpq);
    REQUIRE(thax.size() == 1);
    CHECK(thax[0].text == "sup x1:G. inf x:G. sup y1:G. min(P(y1),sub(1/2,d(x,mul(x1,y1))))");

    // byte-identical texts across runs
    auto again = compile_scheme(th, gpq);
    CHECK(again[0].text == thax[0].text);

    Scheme th22;
    th22.name = "theta";
    th22.m = 2;
    th22.k = 2;
    th22.eps = Rat(1, 4);
    auto t22 = compile_scheme(th22, gpq);
    // four words x_i1 y1 x_i2 y2
    CHECK(t22[0].text.find("mul(mul(mul(x1,y1),x1),y2)") != std::string::npos);
    CHECK(t22[0].text.find("mul(mul(mul(x2,y1),x2),y2)") != std::string::npos);

    // missing symbols are reported
    Scheme k0;
    k0.name = "k0";
    CHECK_THROWS_AS(compile_scheme(k0, group), input_error);
    Scheme unknown;
    unknown.name = "frobnicate";
    CHECK_THROWS_AS(compile_scheme(unknown, group), input_error);
}

TEST_CASE("aiv compiles against the tower signature") {
    MetricStructure z4 = zm_rotation_action(4, 1);
    Scheme aiv;
    aiv.name = "aiv";
    aiv.m = 1;
    aiv.n = 2;
    auto ax = compile_scheme(aiv, z4.sig);
    REQUIRE(ax.size() == 2);
    CHECK(ax[0].text ==
          "inf v:B1. sup x:K2. max(sub(d(act(x,v),v),1/2),absdiff(1,norm(v)))");
    CHECK(ax[1].is_axiom == false);
}

TEST_CASE("group scheme defects") {
    Scheme grp;
    grp.name = "group";
    DefectReport ok = scheme_defect(sym_hamming(4), grp);
    CHECK(ok.worst.rat() == 0);
    CHECK(ok.certified);

    // negative control: corrupt one multiplication entry
    std::vector<std::vector<int>> z6(6, std::vector<int>(6));
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) z6[i][j] = (i + j) % 6;
    z6[2][3] = 4;
    MetricStructure bad = cayley_group(z6, {}, false);
    DefectReport rep = scheme_defect(bad, grp);
    CHECK(rep.worst.rat() > 0);
    CHECK(!rep.worst_witness.empty());
    // the witness triple really breaks associativity or the laws
    CHECK(rep.worst_axiom != "");
}

TEST_CASE("k0 scheme") {
    // P == 0 on the one-element group forces inf |P - 1/2| = 1/2
    MetricStructure triv = cayley_group({{0}});
    MetricStructure tp = with_predicate(triv, "P", {"G"}, Rat(0), Rat(1), {Rat(0)});
    MetricStructure tpq = with_predicate(tp, "Q", {"G"}, Rat(0), Rat(1), {Rat(0)});
    Scheme k0;
    k0.name = "k0";
    DefectReport rep = scheme_defect(tpq, k0);
    bool found = false;
    for (const auto& e : rep.entries)
        if (e.name == "P attains 1/2") {
            found = true;
            CHECK(e.bounds.hi.rat() == Rat(1, 2));
        }
    CHECK(found);
    CHECK(rep.worst.rat() >= Rat(1, 2)); // the eps=1 boundary axiom also fails on P=Q=0

    // k0_attach builds rescaled P, Q from a ball V
    MetricStructure g1 = gn_family(1);
    std::vector<std::string> V;
    const SortCarrier& c = g1.carrier("G");
    GroupView g = group_view(g1);
    for (int i = 0; i < c.size(); ++i)
        if (g.dist(i, g.unit()) <= Rat(9, 20)) V.push_back(c.labels[i]);
    MetricStructure K = k0_attach(g1, V);
    int P = *K.sig.resolve("P", {"G"});
    int Q = *K.sig.resolve("Q", {"G"});
    Rat pmax = 0, qmax = 0;
    for (int i = 0; i < c.size(); ++i) {
        pmax = std::max(pmax, K.apply_predicate(P, {Point(i)}).rat());
        qmax = std::max(qmax, K.apply_predicate(Q, {Point(i)}).rat());
    }
    CHECK(pmax == Rat(1, 2));
    CHECK(qmax == Rat(1, 2));

    // the boundary axiom agrees with a direct double-loop oracle, and its
    // zero set has the advertised meaning
    Scheme scheme;
    scheme.name = "k0";
    scheme.eps_grid = {Rat(1, 8), Rat(1, 4), Rat(1, 2)};
    DefectReport krep = scheme_defect(K, scheme);
    for (const Rat& eps : scheme.eps_grid) {
        Rat oracle = 0;
        for (int x = 0; x < c.size(); ++x) {
            Rat qx = K.apply_predicate(Q, {Point(x)}).rat();
            Rat clause1 = std::max(Rat(eps - qx), Rat(0));
            Rat best_y = -1;
            for (int y = 0; y < c.size(); ++y) {
                Rat py = K.apply_predicate(P, {Point(y)}).rat();
                Rat m = std::max(std::max(Rat(c.finite_dist(x, y) - 2 * eps), Rat(0)),
                                 std::max(Rat(eps - py), Rat(0)));
                if (best_y < 0 || m < best_y) best_y = m;
            }
            oracle = std::max(oracle, std::min(clause1, best_y));
        }
        for (const auto& e : krep.entries)
            if (e.name == "boundary(eps=" + rat_to_string(eps) + ")") {
                CHECK(e.bounds.hi.rat() == oracle);
                if (e.bounds.hi.rat() == 0) {
                    // every x with Q < eps has y within 2 eps with P >= eps
                    for (int x = 0; x < c.size(); ++x) {
                        if (K.apply_predicate(Q, {Point(x)}).rat() >= eps) continue;
                        bool witness = false;
                        for (int y = 0; y < c.size(); ++y)
                            if (c.finite_dist(x, y) <= 2 * eps &&
                                K.apply_predicate(P, {Point(y)}).rat() >= eps)
                                witness = true;
                        CHECK(witness);
                    }
                }
            }
    }

    CHECK_THROWS_AS(k0_attach(g1, {}), input_error);
}

TEST_CASE("theta collapses to 0 when P vanishes") {
    MetricStructure g1 = gn_family(1);
    std::vector<Rat> zeros(12, Rat(0));
    MetricStructure M = with_predicate(g1, "P", {"G"}, Rat(0), Rat(1), zeros);
    for (auto [m, k] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {1, 2}}) {
        Scheme th;
        th.name = "theta";
        th.m = m;
        th.k = k;
        th.eps = Rat(1, 4);
        DefectReport rep = scheme_defect(M, th);
        CHECK(rep.worst.rat() == 0);
    }
}

TEST_CASE("boundedness schemes as formulas") {
    // V = the whole group makes every covering formula vanish with |F| = 1
    MetricStructure s3 = sym_hamming(3);
    for (const char* name : {"bounded", "roelcke-bounded", "roelcke-precompact", "obk"}) {
        Scheme s;
        s.name = name;
        s.m = 1;
        s.k = 1;
        s.r = Rat(1);
        DefectReport rep = scheme_defect(s3, s);
        CHECK(rep.worst.rat() == 0);
    }
    // V = {1}: one f cannot cover S3 by VFV
    Scheme rp;
    rp.name = "roelcke-precompact";
    rp.m = 1;
    rp.r = Rat(1, 2);
    CHECK(scheme_defect(s3, rp).worst.rat() > 0);
}

TEST_CASE("nfh displacement defect matches the double-loop oracle") {
    // rotation action: the origin is fixed, so B1 has an unmoved vector
    MetricStructure z4 = zm_rotation_action(4, 1);
    Scheme nfh;
    nfh.name = "nfh";
    nfh.eta[1] = {1, 2}; // every v in B1 moved by 1/2 by some x in K1
    DefectReport rep = scheme_defect(z4, nfh);
    REQUIRE(rep.entries.size() == 1);
    CHECK(!rep.entries[0].bounds.certified);
    CHECK(rep.entries[0].bounds.lo.dbl() >= 0.5 - 1e-3);
    CHECK(rep.entries[0].bounds.hi.dbl() <= 0.5 + 1e-3);
}

TEST_CASE("nfr on finite tree sorts, exact, against the oracle") {
    GraphInput path;
    path.basepoint = "a";
    path.edges = {{"a", "b", Rat(1)}};
    auto swap_action = [&](const GraphInput& tree,
                           const std::map<std::string, std::string>& vmap,
                           int levels) {
        MetricStructure z2 = cyclic_group(2);
        WrapActionSpec spec;
        GeneratorMap gm;
        gm.element = "1";
        gm.vertex_map = vmap;
        spec.generators.push_back(gm);
        for (int l = 1; l <= levels; ++l) spec.nu.table[{l, 1}] = 1;
        spec.tree = tree;
        return wrap_action(z2, spec);
    };

    // swapping the two path endpoints moves every vertex of B1 by 1
    MetricStructure A = swap_action(path, {{"a", "b"}, {"b", "a"}}, 1);
    Scheme nfr;
    nfr.name = "nfr";
    nfr.eta[1] = {1, 1};
    DefectReport rep = scheme_defect(A, nfr);
    CHECK(rep.worst.rat() == 0);

    // the star swap fixes the center and one leaf: defect exactly 1/s
    GraphInput star;
    star.basepoint = "c";
    star.edges = {{"c", "l1", Rat(1)}, {"c", "l2", Rat(1)}, {"c", "l3", Rat(1)}};
    MetricStructure B =
        swap_action(star, {{"c", "c"}, {"l1", "l2"}, {"l2", "l1"}, {"l3", "l3"}}, 1);
    Scheme nfr2;
    nfr2.name = "nfr";
    nfr2.eta[1] = {1, 3};
    DefectReport rep2 = scheme_defect(B, nfr2);
    CHECK(rep2.worst.rat() == Rat(1, 3));

    // oracle: defect == max over v of (1/s -. max over x of d(xv, v)),
    // and defect 0 iff every v is moved at least 1/s by some x
    for (auto [M, s] : std::vector<std::pair<MetricStructure, long>>{{A, 1}, {B, 3}}) {
        const SortCarrier& b1 = M.carrier("B1");
        int act = *M.sig.resolve("act", {"K1", "B1"});
        const SortCarrier& k1 = M.carrier("K1");
        Rat defect = 0;
        bool all_moved = true;
        for (int v = 0; v < b1.size(); ++v) {
            Rat disp = 0;
            for (int x = 0; x < k1.size(); ++x) {
                int img = pt_index(M.apply_function(act, {Point(x), Point(v)}));
                disp = std::max(disp, b1.finite_dist(img, v));
            }
            defect = std::max(defect, std::max(Rat(Rat(1, s) - disp), Rat(0)));
            if (disp < Rat(1, s)) all_moved = false;
        }
        Scheme sc;
        sc.name = "nfr";
        sc.eta[1] = {1, static_cast<int>(s)};
        DefectReport r = scheme_defect(M, sc);
        CHECK(r.worst.rat() == defect);
        CHECK((r.worst.rat() == 0) == all_moved);
    }
}

TEST_CASE("tree scheme and tree_defect") {
    MetricStructure star = tree_space(
        {{{"c", "l1", Rat(1)}, {"c", "l2", Rat(1)}, {"c", "l3", Rat(1)}}, "c"});
    Scheme tree;
    tree.name = "tree";
    auto axioms = compile_scheme(tree, star.sig);
    REQUIRE(axioms.size() == 2);
    DefectReport rep = scheme_defect(star, tree);
    // the four-point axiom is exactly 0 on a tree; the compiled midpoint
    // formula over the finite carrier shows the discretization gap
    CHECK(rep.entries[0].bounds.hi.rat() == 0);
    CHECK(rep.entries[1].bounds.hi.rat() == Rat(1, 2));

    // the geometric tree_defect has no such gap
    TreeDefectReport td = tree_defect(star);
    CHECK(td.geometric_midpoint);
    CHECK(td.hyperbolicity.hi.rat() == 0);
    CHECK(td.midpoint.hi.rat() == 0);
    CHECK(td.combined.hi.rat() == 0);

    // random trees, exact zeros
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 12; ++trial) {
        GraphInput in;
        int n = 3 + static_cast<int>(rng() % 13);
        in.basepoint = "v0";
        for (int v = 1; v < n; ++v) {
            int parent = static_cast<int>(rng() % v);
            in.edges.push_back({"v" + std::to_string(parent), "v" + std::to_string(v),
                                Rat(1 + static_cast<long>(rng() % 3))});
        }
        TreeDefectReport r = tree_defect(tree_space(in));
        CHECK(r.combined.hi.rat() == 0);
    }

    // unit 4-cycle: hyperbolicity defect exactly 2
    GraphInput cyc;
    cyc.basepoint = "a";
    cyc.edges = {{"a", "b", Rat(1)}, {"b", "c", Rat(1)}, {"c", "d", Rat(1)},
                 {"d", "a", Rat(1)}};
    TreeDefectReport cd = tree_defect(graph_space(cyc));
    CHECK(cd.hyperbolicity.hi.rat() == Rat(2));
    CHECK(cd.combined.hi.rat() == Rat(2));

    // single point
    GraphInput single;
    single.basepoint = "p";
    TreeDefectReport sd = tree_defect(tree_space(single));
    CHECK(sd.combined.hi.rat() == 0);
}

TEST_CASE("wrap_action validates nu and homomorphy") {
    MetricStructure z2 = cyclic_group(2);

    // unitary: nu(l, m) = m is accepted
    {
        WrapActionSpec spec;
        GeneratorMap gm;
        gm.element = "1";
        gm.matrix = {{-1, 0}, {0, -1}};
        spec.generators.push_back(gm);
        spec.nu.table[{1, 1}] = 1;
        spec.hilbert = HilbertOptions{Field::Real, 2, 1, {}};
        MetricStructure M = wrap_action(z2, spec);
        CHECK(M.sig.resolve("act", {"K1", "B1"}).has_value());
    }

    // affine with |b| = 1: nu = m+1 accepted, nu = m rejected with a witness
    {
        WrapActionSpec spec;
        GeneratorMap gm;
        gm.element = "1";
        gm.matrix = {{-1, 0}, {0, 1}};
        gm.translation = {1, 0};
        spec.generators.push_back(gm);
        spec.nu.table[{1, 1}] = 2;
        spec.hilbert = HilbertOptions{Field::Real, 2, 2, {}};
        MetricStructure ok = wrap_action(z2, spec);
        auto act = ok.sig.resolve("act", {"K1", "B1"});
        REQUIRE(act.has_value());
        CHECK(ok.sig.symbol(*act).result_sort == "B2");

        WrapActionSpec badspec = spec;
        badspec.nu.table[{1, 1}] = 1;
        try {
            wrap_action(z2, badspec);
            CHECK(false);
        } catch (const action_error& e) {
            CHECK(!e.witness.empty());
        }
    }

    // the trivial action accepts nu = identity in m
    {
        WrapActionSpec spec;
        GeneratorMap gm;
        gm.element = "1";
        gm.matrix = {{1, 0}, {0, 1}};
        spec.generators.push_back(gm);
        spec.nu.table[{1, 1}] = 1;
        spec.hilbert = HilbertOptions{Field::Real, 2, 1, {}};
        CHECK_NOTHROW(wrap_action(z2, spec));
    }

    // a 90-degree rotation is not an involution: non-homomorphism
    {
        WrapActionSpec spec;
        GeneratorMap gm;
        gm.element = "1";
        gm.matrix = {{0, -1}, {1, 0}};
        spec.generators.push_back(gm);
        spec.nu.table[{1, 1}] = 1;
        spec.hilbert = HilbertOptions{Field::Real, 2, 1, {}};
        CHECK_THROWS_AS(wrap_action(z2, spec), action_error);
    }

    // non-orthogonal generators are rejected up front
    {
        WrapActionSpec spec;
        GeneratorMap gm;
        gm.element = "1";
        gm.matrix = {{2, 0}, {0, 1}};
        spec.generators.push_back(gm);
        spec.nu.table[{1, 1}] = 1;
        spec.hilbert = HilbertOptions{Field::Real, 2, 1, {}};
        CHECK_THROWS_AS(wrap_action(z2, spec), action_error);
    }

    // tree actions must be isometric
    {
        GraphInput path;
        path.basepoint = "a";
        path.edges = {{"a", "b", Rat(1)}, {"b", "c", Rat(1)}};
        WrapActionSpec spec;
        GeneratorMap gm;
        gm.element = "1";
        gm.vertex_map = {{"a", "b"}, {"b", "a"}, {"c", "c"}};
        spec.generators.push_back(gm);
        spec.nu.table[{1, 1}] = 2;
        spec.tree = path;
        CHECK_THROWS_AS(wrap_action(z2, spec), action_error);
    }
}

TEST_CASE("aiv rotation defects against the closed form") {
    for (int m : {3, 4, 8}) {
        MetricStructure M = zm_rotation_action(m, 1);
        Scheme aiv;
        aiv.name = "aiv";
        aiv.m = 1;
        aiv.n = 1;
        DefectReport rep = scheme_defect(M, aiv);
        double closed = 2 * std::sin(M_PI / m);
        double defect = std::max(closed - 1.0, 0.0);
        REQUIRE(rep.entries.size() == 2);
        CHECK(rep.entries[0].bounds.hi.dbl() <= defect + 1e-3);
        CHECK(rep.entries[0].bounds.hi.dbl() >= defect - 1e-3);
        // companion displacement entry: inf-sup displacement of unit vectors
        CHECK(rep.entries[1].bounds.hi.dbl() <= closed + 1e-3);
        CHECK(rep.entries[1].bounds.lo.dbl() >= closed - 1e-2);

        // dense sphere-sampling oracle
        const SortCarrier& k1 = M.carrier("K1");
        int act = *M.sig.resolve("act", {"K1", "B1"});
        double best = 1e9;
        for (int step = 0; step < 3600; ++step) {
            double th = 2 * M_PI * step / 3600;
            std::vector<double> v = {std::cos(th), std::sin(th)};
            double disp = 0;
            for (int x = 0; x < k1.size(); ++x) {
                Point img = M.apply_function(act, {Point(x), Point(v)});
                disp = std::max(disp, vec_dist(pt_vec(img), v));
            }
            best = std::min(best, disp);
        }
        CHECK(best == doctest::Approx(closed).epsilon(1e-6));
    }
}

TEST_CASE("hilbert-onb defects") {
    MetricStructure T = hilbert_tower({Field::Real, 2, 1, {}});
    Scheme onb;
    onb.name = "hilbert-onb";
    onb.onb_k = 2;
    DefectReport rep = scheme_defect(T, onb);
    CHECK(rep.worst.dbl() <= 0.02); // dim 2 admits 2 orthonormal vectors

    Scheme onb3;
    onb3.name = "hilbert-onb";
    onb3.onb_k = 3;
    DefectReport rep3 = scheme_defect(T, onb3);
    CHECK(rep3.entries[0].bounds.lo.dbl() >= 0.2); // but not 3
}
