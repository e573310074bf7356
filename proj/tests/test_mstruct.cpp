#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "contilog/builders.hpp"
#include "contilog/eval.hpp"
#include "contilog/parser.hpp"

#include <cmath>
#include <random>

using namespace contilog;

namespace {

// independent Hamming oracle straight from the permutation images
Rat hamming_oracle(const std::vector<uint8_t>& a, const std::vector<uint8_t>& b) {
    int moved = 0;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) ++moved;
    return Rat(moved, static_cast<long>(a.size()));
}

} // namespace

TEST_CASE("sym_hamming distances") {
    MetricStructure M = sym_hamming(3);
    validate_structure(M);
    const SortCarrier& c = M.carrier("G");
    CHECK(c.size() == 6);
    int id = M.point("G", "()");
    int t12 = M.point("G", "(1 2)");
    int c123 = M.point("G", "(1 2 3)");
    int c132 = M.point("G", "(1 3 2)");
    CHECK(c.finite_dist(id, t12) == Rat(2, 3));
    CHECK(c.finite_dist(c123, c132) == Rat(1));
    for (int i = 0; i < c.size(); ++i) CHECK(c.finite_dist(i, i) == 0);
    // the table agrees with a from-scratch recount
    for (int i = 0; i < c.size(); ++i)
        for (int j = 0; j < c.size(); ++j)
            CHECK(c.finite_dist(i, j) == hamming_oracle(c.perms[i], c.perms[j]));
    CHECK_THROWS_AS(sym_hamming(9), input_error);
}

TEST_CASE("Hamming metric is bi-invariant on Sym(n), n <= 5") {
    for (int n : {3, 4, 5}) {
        MetricStructure M = sym_hamming(n);
        GroupView g = group_view(M);
        for (int a = 0; a < g.n; ++a)
            for (int x = 0; x < g.n; ++x)
                for (int y = 0; y < g.n; ++y) {
                    if (g.dist(g.mul(a, x), g.mul(a, y)) != g.dist(x, y)) {
                        FAIL("left invariance fails");
                    }
                    if (g.dist(g.mul(x, a), g.mul(y, a)) != g.dist(x, y)) {
                        FAIL("right invariance fails");
                    }
                }
    }
    CHECK(true);
}

TEST_CASE("gn_family carrier and commutativity defect") {
    MetricStructure g1 = gn_family(1);
    validate_structure(g1);
    CHECK(g1.carrier("G").size() == 12);
    CHECK(g1.carrier("G").degree == 5);

    // brute-force oracle straight over the permutations
    auto comm_sup = [](const MetricStructure& M) {
        const SortCarrier& c = M.carrier("G");
        Rat best = 0;
        for (int i = 0; i < c.size(); ++i)
            for (int j = 0; j < c.size(); ++j) {
                auto xy = perm_compose(c.perms[i], c.perms[j]);
                auto yx = perm_compose(c.perms[j], c.perms[i]);
                best = std::max(best, hamming_oracle(xy, yx));
            }
        return best;
    };
    CHECK(comm_sup(g1) == Rat(3, 5));
    CHECK(comm_sup(gn_family(2)) == Rat(3, 7));

    for (int n = 1; n <= 3; ++n) {
        MetricStructure M = gn_family(n);
        Formula comm = parse_formula("sup x:G. sup y:G. d(mul(x,y),mul(y,x))", M.sig);
        ValueBounds v = evaluate(M, comm);
        CHECK(v.certified);
        CHECK(v.hi.rat() == Rat(3, (1 << n) + 3));
        CHECK(v.hi.rat() == comm_sup(M));
    }
}

TEST_CASE("gn_family commutators live on the 3-point block") {
    for (int n : {1, 2}) {
        MetricStructure M = gn_family(n);
        GroupView g = group_view(M);
        const SortCarrier& c = M.carrier("G");
        int block = 1 << n;
        for (int x = 0; x < g.n; ++x)
            for (int y = 0; y < g.n; ++y) {
                int comm = g.mul(g.mul(x, y), g.inv(g.mul(y, x)));
                for (int p = 0; p < block; ++p)
                    CHECK(c.perms[comm][p] == p);
            }
    }
}

TEST_CASE("discrete wraps") {
    MetricStructure z2 = cyclic_group(2);
    CHECK(z2.carrier("G").finite_dist(0, 1) == Rat(1));
    MetricStructure s3 = discrete_wrap(sym_hamming(3));
    validate_structure(s3);
    CHECK(s3.carrier("G").size() == 6);
    CHECK(s3.sig.sort("G").diameter == Rat(1));
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            CHECK(s3.carrier("G").finite_dist(i, j) == Rat(i == j ? 0 : 1));

    MetricStructure z6 = cyclic_group(6);
    Formula comm6 = parse_formula("sup x:G. sup y:G. d(mul(x,y),mul(y,x))", z6.sig);
    CHECK(evaluate(z6, comm6).hi.rat() == 0);
    Formula comm3 = parse_formula("sup x:G. sup y:G. d(mul(x,y),mul(y,x))", s3.sig);
    CHECK(evaluate(s3, comm3).hi.rat() == 1);

    // exhaustive oracle for the discrete commutativity values
    GroupView g = group_view(s3);
    bool found = false;
    for (int x = 0; x < g.n; ++x)
        for (int y = 0; y < g.n; ++y)
            if (g.mul(x, y) != g.mul(y, x)) found = true;
    CHECK(found);
}

TEST_CASE("cayley tables are validated") {
    // a Latin-square violation
    std::vector<std::vector<int>> bad = {{0, 1}, {1, 0}};
    bad[1][1] = 1; // row {1,1}
    CHECK_THROWS_AS(cayley_group(bad), input_error);
    // no identity
    CHECK_THROWS_AS(cayley_group({{1, 1}, {1, 1}}), input_error);
    // associativity violation passes only with validate=false
    std::vector<std::vector<int>> z6(6, std::vector<int>(6));
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) z6[i][j] = (i + j) % 6;
    std::vector<std::vector<int>> corrupted = z6;
    corrupted[2][3] = 4; // 2+3 = 5 replaced
    CHECK_THROWS_AS(cayley_group(corrupted), input_error);
    MetricStructure M = cayley_group(corrupted, {}, false);
    CHECK(M.carrier("G").size() == 6);
    CHECK_THROWS_AS(validate_structure(M), input_error);
}

TEST_CASE("hilbert tower operations") {
    MetricStructure T = hilbert_tower({Field::Real, 2, 4, {}});
    int ip = *T.sig.resolve("ip", {"B1", "B1"});
    Point e1 = std::vector<double>{1.0, 0.0};
    Point e2 = std::vector<double>{0.0, 1.0};
    CHECK(T.apply_predicate(ip, {e1, e2}).dbl() == doctest::Approx(0.0));
    CHECK(T.metric("B1", e1, e2).dbl() == doctest::Approx(std::sqrt(2.0)));

    // lam3_2 maps B1 into B2 (k = 2 since 1 <= 3/2 < 2)
    auto lam32 = T.sig.resolve("lam3_2", {"B1"});
    REQUIRE(lam32.has_value());
    CHECK(T.sig.symbol(*lam32).result_sort == "B2");
    // lam2 needs k = 3
    CHECK(T.sig.resolve("lam2", {"B1"}).has_value());
    CHECK(T.sig.symbol(*T.sig.resolve("lam2", {"B1"})).result_sort == "B3");

    // |lam_r(x)| = |r| |x| within 1e-12
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int norm1 = *T.sig.resolve("norm", {"B3"});
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> v = {u(rng), u(rng)};
        Point scaled = T.apply_function(*T.sig.resolve("lam2", {"B1"}), {Point(v)});
        CHECK(std::fabs(T.apply_predicate(norm1, {scaled}).dbl() - 2 * vec_norm(v)) < 1e-12);
    }

    // inner products stay within the declared range on sampled vectors
    int ip2 = *T.sig.resolve("ip", {"B2", "B2"});
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> v = {2 * u(rng), 2 * u(rng)}, w = {2 * u(rng), 2 * u(rng)};
        double nv = vec_norm(v);
        if (nv > 2)
            for (double& x : v) x *= 2 / nv;
        double nw = vec_norm(w);
        if (nw > 2)
            for (double& x : w) x *= 2 / nw;
        double val = T.apply_predicate(ip2, {Point(v), Point(w)}).dbl();
        CHECK(val <= 4.0 + 1e-12);
        CHECK(val >= -4.0 - 1e-12);
    }

    // complex towers expose re/im parts and Q[i] scalars
    MetricStructure C = hilbert_tower({Field::Complex, 2, 2, {}});
    CHECK(C.sig.has_symbol("ipre"));
    CHECK(C.sig.has_symbol("ipim"));
    CHECK(C.sig.has_symbol("clam0i1")); // multiplication by i
    Point z1 = std::vector<double>{1.0, 0.0, 0.0, 0.0};
    Point iz = C.apply_function(*C.sig.resolve("clam0i1", {"B1"}), {z1});
    int ipim = *C.sig.resolve("ipim", {"B1", "B1"});
    CHECK(C.apply_predicate(ipim, {z1, iz}).dbl() == doctest::Approx(-1.0));
    CHECK_THROWS_AS(hilbert_tower({Field::Real, 2, 2, {{Rat(1), Rat(1)}}}), input_error);
}

TEST_CASE("tree spaces") {
    MetricStructure star = tree_space(
        {{{"c", "l1", Rat(1)}, {"c", "l2", Rat(1)}, {"c", "l3", Rat(1)}}, "c"});
    validate_structure(star);
    const SortCarrier& b1 = star.carrier("B1");
    CHECK(b1.size() == 4);
    CHECK(b1.finite_dist(star.point("B1", "l1"), star.point("B1", "l2")) == Rat(2));

    // path of length 4 from the basepoint: B2 holds exactly the vertices
    // within distance 2
    GraphInput path;
    path.basepoint = "v0";
    for (int i = 0; i < 4; ++i)
        path.edges.push_back(
            {"v" + std::to_string(i), "v" + std::to_string(i + 1), Rat(1)});
    MetricStructure P = tree_space(path);
    CHECK(P.carrier("B2").size() == 3);
    CHECK(P.carrier("B4").size() == 5);
    CHECK_THROWS_AS(P.point("B2", "v3"), input_error);

    // four-point condition, exhaustive oracle over vertex 4-tuples
    const SortCarrier& c = P.carrier("B4");
    for (int x = 0; x < c.size(); ++x)
        for (int y = 0; y < c.size(); ++y)
            for (int z = 0; z < c.size(); ++z)
                for (int w = 0; w < c.size(); ++w) {
                    Rat s1 = Rat(c.finite_dist(x, y) + c.finite_dist(z, w));
                    Rat s2 = Rat(c.finite_dist(x, z) + c.finite_dist(y, w));
                    Rat s3 = Rat(c.finite_dist(x, w) + c.finite_dist(y, z));
                    CHECK(s1 <= std::max(s2, s3));
                }

    // cyclic and disconnected inputs are rejected
    GraphInput cyc;
    cyc.basepoint = "a";
    cyc.edges = {{"a", "b", Rat(1)}, {"b", "c", Rat(1)}, {"c", "a", Rat(1)}};
    CHECK_THROWS_AS(tree_space(cyc), input_error);
    CHECK_NOTHROW(graph_space(cyc));
    GraphInput disc;
    disc.basepoint = "a";
    disc.edges = {{"a", "b", Rat(1)}, {"c", "d", Rat(1)}};
    CHECK_THROWS_AS(tree_space(disc), input_error);
    GraphInput negl;
    negl.basepoint = "a";
    negl.edges = {{"a", "b", Rat(-1)}};
    CHECK_THROWS_AS(tree_space(negl), input_error);
}

TEST_CASE("metric axioms validated exhaustively on small carriers") {
    for (int n : {2, 3, 4}) CHECK_NOTHROW(validate_structure(sym_hamming(n)));
    CHECK_NOTHROW(validate_structure(gn_family(2)));
    CHECK_NOTHROW(validate_structure(cyclic_group(12)));

    // a planted triangle violation is caught
    MetricStructure M = tree_space({{{"a", "b", Rat(1)}, {"b", "c", Rat(1)}}, "a"});
    SortCarrier& c = M.carrier_mut("B2");
    c.dist[0 * 3 + 2] = Rat(5);
    c.dist[2 * 3 + 0] = Rat(5);
    CHECK_THROWS_AS(validate_structure(M), input_error);
}

TEST_CASE("K-chain attachment orders carriers by level") {
    MetricStructure z4 = zm_rotation_action(4, 2);
    CHECK(z4.carriers.count("K1"));
    CHECK(z4.carriers.count("K2"));
    CHECK(z4.carrier("K1").size() == 3); // 1, g, g^-1
    CHECK(z4.carrier("K2").size() == 4);
    auto act = z4.sig.resolve("act", {"K1", "B1"});
    REQUIRE(act.has_value());
    CHECK(z4.sig.symbol(*act).result_sort == "B1");
    // the generator rotates by pi/2
    Point v = std::vector<double>{1.0, 0.0};
    Point gv = z4.apply_function(*act, {Point(z4.point("K1", "1")), v});
    CHECK(pt_vec(gv)[0] == doctest::Approx(0.0));
    CHECK(pt_vec(gv)[1] == doctest::Approx(1.0));
}
