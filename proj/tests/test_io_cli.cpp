#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "contilog/catgrp.hpp"
#include "contilog/json_io.hpp"
#include "contilog/parser.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

using namespace contilog;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    std::string path = "/tmp/contilog_test_" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

struct CliResult {
    int code;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    const char* bin = std::getenv("CONTILOG_BIN");
    REQUIRE(bin != nullptr);
    std::string cmd = std::string(bin) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    int status = pclose(p);
    return {WEXITSTATUS(status), out};
}

std::string strip_timing(const std::string& report) {
    std::string out;
    size_t pos = 0;
    while (pos < report.size()) {
        size_t eol = report.find('\n', pos);
        if (eol == std::string::npos) eol = report.size();
        std::string line = report.substr(pos, eol - pos);
        if (line.find("\"seconds\"") == std::string::npos) out += line + "\n";
        pos = eol + 1;
    }
    return out;
}

} // namespace

TEST_CASE("structure files: generator shorthands") {
    CHECK(structure_from_json(json::parse(R"({"kind":"sym_hamming","n":3})"))
              .carrier("G")
              .size() == 6);
    CHECK(structure_from_json(json::parse(R"({"kind":"gn","n":2})")).carrier("G").size() ==
          24);
    MetricStructure d = structure_from_json(
        json::parse(R"({"kind":"discrete","of":{"kind":"sym_hamming","n":3}})"));
    CHECK(d.carrier("G").finite_dist(0, 1) == Rat(1));
    MetricStructure h = structure_from_json(
        json::parse(R"({"kind":"hilbert","field":"real","dim":4,"balls":3})"));
    CHECK(h.carrier("B3").dim == 4);
    MetricStructure t = structure_from_json(json::parse(
        R"({"kind":"tree","edges":[["a","b",1],["b","c","1/2"]],"basepoint":"a"})"));
    CHECK(t.carrier("B2").size() == 3);
    MetricStructure cy = structure_from_json(
        json::parse(R"({"kind":"cayley","table":[[0,1],[1,0]]})"));
    CHECK(cy.carrier("G").size() == 2);
    MetricStructure zm =
        structure_from_json(json::parse(R"({"kind":"zm_rotation","m":4,"balls":2})"));
    CHECK(zm.sig.resolve("act", {"K2", "B1"}).has_value());
    CHECK_THROWS_AS(structure_from_json(json::parse(R"({"kind":"wat"})")), input_error);
}

TEST_CASE("structure files: explicit sections and group_action") {
    json explicit_spec = json::parse(R"({
        "sorts": [{"name": "X", "diameter": 2,
                   "points": ["a", "b", "c"],
                   "metric": [[0, 1, 2], [1, 0, 1], [2, 1, 0]]}],
        "predicates": [{"name": "P", "arity": ["X"], "range": [0, 1],
                        "values": [0, "1/2", 1]}]
    })");
    MetricStructure M = structure_from_json(explicit_spec);
    CHECK(M.carrier("X").finite_dist(0, 2) == Rat(2));
    CHECK(M.apply_predicate(*M.sig.resolve("P", {"X"}), {Point(1)}).rat() == Rat(1, 2));

    // bad metric tables are rejected on load
    json broken = explicit_spec;
    broken["sorts"][0]["metric"][0][2] = 9;
    CHECK_THROWS_AS(structure_from_json(broken), input_error);

    json action_spec = json::parse(R"({
        "kind": "group_action",
        "group": {"kind": "cyclic", "n": 4},
        "generators": [{"element": "1",
                        "matrix": [[0, -1], [1, 0]]}],
        "nu": [[1, 1, 1], [2, 1, 1]],
        "hilbert": {"field": "real", "dim": 2, "balls": 1}
    })");
    MetricStructure A = structure_from_json(action_spec);
    CHECK(A.carrier("K1").size() == 3);
    CHECK(A.sig.resolve("act", {"K1", "B1"}).has_value());
}

TEST_CASE("signature, scheme and sequence files") {
    json sig_spec = json::parse(R"({
        "sorts": [{"name": "G", "diameter": 1}],
        "functions": [{"name": "mul", "arity": ["G", "G"], "result": "G"},
                      {"name": "inv", "arity": ["G"], "result": "G"},
                      {"name": "1", "arity": [], "result": "G"}],
        "predicates": [{"name": "P", "arity": ["G"], "range": [0, 1],
                        "modulus": {"scale": 2}}]
    })");
    Signature sig = signature_from_json(sig_spec);
    CHECK(sig.resolve("mul", {"G", "G"}).has_value());
    CHECK(sig.symbol(*sig.resolve("P", {"G"})).moduli[0] == Modulus::scale(2));

    Scheme s = scheme_from_json(json::parse(R"({"name":"theta","m":2,"k":2,"eps":0.25})"));
    CHECK(s.m == 2);
    CHECK(s.eps == Rat(1, 4));
    Scheme nfh = scheme_from_json(json::parse(R"({"name":"nfh","eta":{"1":[2,4]}})"));
    CHECK(nfh.eta.at(1) == std::pair<int, int>{2, 4});

    StructureSequence seq =
        sequence_from_json(json::parse(R"({"family":"gn","range":[1,3]})"));
    CHECK(seq.max_index == 3);
    CHECK(seq.generator(2).carrier("G").size() == 24);
    StructureSequence lst = sequence_from_json(json::parse(
        R"({"members":[{"kind":"sym_hamming","n":2},{"kind":"sym_hamming","n":3}]})"));
    CHECK(lst.materialize().size() == 2);

    // moduli round-trip through json
    CHECK(modulus_from_json(modulus_to_json(Modulus::id())).is_id());
    Modulus pl = Modulus::breakpoints({{Rat(1, 2), Rat(1, 4)}, {Rat(1), Rat(1, 4)}});
    CHECK(modulus_from_json(modulus_to_json(pl)) == pl);
}

TEST_CASE("cli: eval and determinism") {
    std::string g1 = write_temp("g1.json", R"({"kind":"gn","n":1})");
    CliResult r = run_cli("eval --structure " + g1 +
                          " --formula \"sup x:G. sup y:G. d(mul(x,y),mul(y,x))\"");
    CHECK(r.code == 0);
    json rep = json::parse(r.out);
    CHECK(rep["schema"] == "contilog-report/1");
    CHECK(rep["result"]["value"]["hi"]["exact"] == "3/5");
    CHECK(rep["result"]["value"]["hi"]["approx"].get<double>() == doctest::Approx(0.6));
    CHECK(rep["result"]["value"]["certified"] == true);
    CHECK(rep["result"]["witness"].size() == 2);

    // identical invocations emit byte-identical reports modulo timing
    CliResult r2 = run_cli("eval --structure " + g1 +
                           " --formula \"sup x:G. sup y:G. d(mul(x,y),mul(y,x))\"");
    CHECK(strip_timing(r.out) == strip_timing(r2.out));

    // assignments bind free variables by point label
    CliResult ra = run_cli("eval --structure " + g1 +
                           " --formula \"d(x,1)\" --assign '{\"x\":\"()\"}'");
    CHECK(ra.code == 0);
    CHECK(json::parse(ra.out)["result"]["value"]["hi"]["exact"] == "0");
}

TEST_CASE("cli: scheme exit codes") {
    std::string s3 = write_temp("s3.json", R"({"kind":"sym_hamming","n":3})");
    CliResult ok = run_cli("scheme --name group --structure " + s3);
    CHECK(ok.code == 0);
    json rep = json::parse(ok.out);
    CHECK(rep["result"]["worst_defect"]["exact"] == "0");

    // corrupted multiplication table: defect above tol, exit 1, witness
    std::string bad = write_temp("bad.json",
                                 R"({"kind":"cayley","validate":false,
        "table":[[0,1,2,3,4,5],[1,2,3,4,5,0],[2,3,4,4,0,1],
                 [3,4,5,0,1,2],[4,5,0,1,2,3],[5,0,1,2,3,4]]})");
    CliResult fail = run_cli("scheme --name group --structure " + bad);
    CHECK(fail.code == 1);
    json frep = json::parse(fail.out);
    CHECK(frep["result"]["worst_defect"]["approx"].get<double>() > 0);
    CHECK(!frep["result"]["worst_witness"].empty());

    // malformed input: exit 2, no report
    std::string junk = write_temp("junk.json", "{not json");
    CHECK(run_cli("scheme --name group --structure " + junk).code == 2);
    CHECK(run_cli("eval --structure /tmp/contilog_missing.json --formula \"d(1,1)\"")
              .code == 2);
}

TEST_CASE("cli: ultra, modulus, aut, bound, cayley, chain, catreport, types") {
    std::string g1 = write_temp("g1.json", R"({"kind":"gn","n":1})");
    std::string s3 = write_temp("s3.json", R"({"kind":"sym_hamming","n":3})");

    CliResult u = run_cli(
        "ultra --family gn --range 1 5 --formula "
        "\"sup x:G. sup y:G. d(mul(x,y),mul(y,x))\"");
    CHECK(u.code == 0);
    json urep = json::parse(u.out);
    CHECK(urep["result"]["classification"] == "convergent");
    CHECK(urep["result"]["limit"]["exact"] == "0");
    CHECK(urep["result"]["values"][0]["exact"] == "3/5");
    CHECK(urep["result"]["values"][4]["exact"] == "3/35");

    std::string tower = write_temp(
        "tower.json", R"({"kind":"hilbert","field":"real","dim":2,"balls":4})");
    CliResult m = run_cli("modulus --structure " + tower +
                          " --formula \"norm(lam2(v))\"");
    CHECK(m.code == 0);
    CHECK(json::parse(m.out)["result"]["describe"] == "scale(2)");

    CliResult a = run_cli("aut --structure " + s3);
    CHECK(a.code == 0);
    CHECK(json::parse(a.out)["result"]["order"] == 6);

    CliResult o = run_cli("oligo --structure " + s3 + " --n 1 --eps 0");
    CHECK(json::parse(o.out)["result"]["F_size"] == 3);

    CliResult b = run_cli("bound --structure " + s3 + " --r 1/2 --k 2");
    CHECK(b.code == 0);
    CHECK(json::parse(b.out)["result"]["VFV"]["F_size"] == 6);

    std::string z6 = write_temp("z6.json", R"({"kind":"cyclic","n":6})");
    CliResult cb = run_cli("cayley --structure " + z6 + " --gens 1");
    CHECK(json::parse(cb.out)["result"]["n"] == 3);
    CliResult cb2 = run_cli("cayley --structure " + z6 + " --gens 2");
    CHECK(json::parse(cb2.out)["result"]["generates"] == false);

    CliResult ch = run_cli("chain --structure " + z6 +
                           " --sets '[[\"0\",\"1\"],[\"0\",\"1\",\"5\"]]'");
    CHECK(ch.code == 1); // 1+1 = 2 escapes the second set
    CHECK(json::parse(ch.out)["result"]["ok"] == false);
    CliResult ch2 =
        run_cli("chain --structure " + z6 +
                " --sets '[[\"0\"],[\"0\",\"1\",\"2\",\"3\",\"4\",\"5\"]]'");
    CHECK(ch2.code == 0);

    CliResult cat = run_cli("catreport --structure " + g1 + " --rho 3/10");
    CHECK(cat.code == 0);
    json catrep = json::parse(cat.out);
    CHECK(catrep["result"]["coset_count"] == 12);
    CHECK(catrep["result"]["subgroup_order"] == 1);
    CHECK(catrep["result"]["definability_defect"]["hi"]["exact"] == "0");

    CliResult tp = run_cli("types --structure " + s3 + " --n 1 --tuple \"(1 2)\"");
    CHECK(tp.code == 0);
    CliResult net = run_cli("types --structure " + s3 + " --n 1 --eps 0");
    CHECK(json::parse(net.out)["result"]["net_size"] == 3);
    CliResult dt = run_cli("types --structure " + s3 +
                           " --phi \"d(x,1)\" --psi \"d(x,1)\"");
    CHECK(json::parse(dt.out)["result"]["dT"]["hi"]["exact"] == "0");

    // the zm_rotation shorthand feeds the aiv scheme
    std::string z4 = write_temp("z4.json", R"({"kind":"zm_rotation","m":4,"balls":1})");
    CliResult aiv = run_cli("scheme --name aiv --structure " + z4 +
                            " --params '{\"m\":1,\"n\":1}'");
    CHECK(aiv.code == 1); // Z4 fails the almost-invariant-vector axiom
    json arep = json::parse(aiv.out);
    CHECK(arep["result"]["worst_defect"]["approx"].get<double>() ==
          doctest::Approx(std::sqrt(2.0) - 1).epsilon(1e-2));
}
