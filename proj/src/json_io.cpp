#include "contilog/json_io.hpp"

#include <cstdio>
#include <fstream>

namespace contilog {

Rat rat_from_json(const json& j) {
    if (j.is_string()) return rat_from_string(j.get<std::string>());
    if (j.is_number_integer()) return Rat(j.get<long long>());
    if (j.is_number_float()) return rat_from_double(j.get<double>());
    throw input_error("expected a rational (integer, double or \"p/q\")");
}

json rat_to_json(const Rat& q) {
    if (denominator(q) == 1 && numerator(q) >= std::numeric_limits<long long>::min() &&
        numerator(q) <= std::numeric_limits<long long>::max())
        return json(numerator(q).convert_to<long long>());
    return json(rat_to_string(q));
}

Modulus modulus_from_json(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "id") return Modulus::id();
        throw input_error("unknown modulus tag: " + j.get<std::string>());
    }
    if (j.is_object()) {
        if (j.contains("scale")) return Modulus::scale(rat_from_json(j["scale"]));
        if (j.contains("breakpoints")) {
            std::vector<std::pair<Rat, Rat>> pts;
            for (const auto& p : j["breakpoints"])
                pts.emplace_back(rat_from_json(p.at(0)), rat_from_json(p.at(1)));
            return Modulus::breakpoints(std::move(pts));
        }
    }
    throw input_error("bad modulus specification");
}

json modulus_to_json(const Modulus& m) {
    if (m.is_id()) return json("id");
    if (m.is_linear()) {
        json o;
        o["scale"] = rat_to_json(Rat(1 / m.linear_slope()));
        return o;
    }
    json pts = json::array();
    for (const auto& [x, y] : m.points()) pts.push_back({rat_to_json(x), rat_to_json(y)});
    json o;
    o["breakpoints"] = pts;
    return o;
}

static std::vector<Modulus> moduli_from_json(const json& j, size_t arity) {
    if (j.is_null()) return {};
    if (j.is_array()) {
        std::vector<Modulus> out;
        for (const auto& m : j) out.push_back(modulus_from_json(m));
        return out;
    }
    return std::vector<Modulus>(arity, modulus_from_json(j));
}

Signature signature_from_json(const json& j) {
    Signature sig;
    for (const auto& s : j.value("sorts", json::array())) {
        Sort srt;
        srt.name = s.at("name").get<std::string>();
        srt.diameter = s.contains("diameter") ? rat_from_json(s["diameter"]) : Rat(1);
        std::string kind = s.value("kind", "finite");
        if (kind == "finite") srt.kind = SortKind::Finite;
        else if (kind == "hilbert-ball") srt.kind = SortKind::HilbertBall;
        else if (kind == "tree-ball") srt.kind = SortKind::TreeBall;
        else throw input_error("unknown sort kind: " + kind);
        if (s.contains("ball_index")) srt.ball_index = s["ball_index"].get<int>();
        sig.add_sort(srt);
    }
    for (const auto& f : j.value("functions", json::array())) {
        std::vector<std::string> arity = f.value("arity", std::vector<std::string>{});
        sig.add_function(f.at("name").get<std::string>(), arity,
                         f.at("result").get<std::string>(),
                         moduli_from_json(f.value("modulus", json()), arity.size()));
    }
    for (const auto& p : j.value("predicates", json::array())) {
        std::vector<std::string> arity = p.value("arity", std::vector<std::string>{});
        Rat lo = 0, hi = 1;
        if (p.contains("range")) {
            lo = rat_from_json(p["range"].at(0));
            hi = rat_from_json(p["range"].at(1));
        }
        sig.add_predicate(p.at("name").get<std::string>(), arity, lo, hi,
                          moduli_from_json(p.value("modulus", json()), arity.size()));
    }
    return sig;
}

namespace {

std::string vertex_name(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    throw input_error("vertex names must be strings or integers");
}

GraphInput graph_from_json(const json& j) {
    GraphInput in;
    for (const auto& e : j.at("edges")) {
        GraphInput::E edge;
        edge.u = vertex_name(e.at(0));
        edge.v = vertex_name(e.at(1));
        edge.len = e.size() > 2 ? rat_from_json(e.at(2)) : Rat(1);
        in.edges.push_back(edge);
    }
    in.basepoint = vertex_name(j.at("basepoint"));
    return in;
}

SortMapNu nu_from_json(const json& j) {
    SortMapNu nu;
    if (j.is_array()) {
        for (const auto& t : j)
            nu.table[{t.at(0).get<int>(), t.at(1).get<int>()}] = t.at(2).get<int>();
    } else if (j.is_object()) {
        for (const auto& [l, row] : j.items())
            for (const auto& [m, v] : row.items())
                nu.table[{std::stoi(l), std::stoi(m)}] = v.get<int>();
    } else {
        throw input_error("nu must be a [[l,m,v],...] list or nested object");
    }
    nu.validate();
    return nu;
}

HilbertOptions hilbert_opts_from_json(const json& j) {
    HilbertOptions h;
    std::string field = j.value("field", "real");
    if (field == "real") h.field = Field::Real;
    else if (field == "complex") h.field = Field::Complex;
    else throw input_error("field must be real or complex");
    h.dim = j.value("dim", 2);
    h.max_ball = j.value("balls", 1);
    for (const auto& s : j.value("scalars", json::array())) {
        HilbertScalar hs;
        if (s.is_object()) {
            hs.re = rat_from_json(s.value("re", json(0)));
            hs.im = rat_from_json(s.value("im", json(0)));
        } else {
            hs.re = rat_from_json(s);
        }
        h.scalars.push_back(hs);
    }
    return h;
}

MetricStructure explicit_structure_from_json(const json& j) {
    MetricStructure M;
    json sig_json;
    sig_json["sorts"] = json::array();
    for (const auto& s : j.value("sorts", json::array())) {
        json copy = s;
        copy.erase("points");
        copy.erase("metric");
        sig_json["sorts"].push_back(copy);
    }
    sig_json["functions"] = json::array();
    json funcs = j.value("functions", json::array());
    for (const auto& f : j.value("actions", json::array())) funcs.push_back(f);
    for (const auto& f : funcs) {
        json copy = f;
        copy.erase("table");
        sig_json["functions"].push_back(copy);
    }
    sig_json["predicates"] = json::array();
    for (const auto& p : j.value("predicates", json::array())) {
        json copy = p;
        copy.erase("values");
        sig_json["predicates"].push_back(copy);
    }
    M.sig = signature_from_json(sig_json);

    for (const auto& s : j.value("sorts", json::array())) {
        SortCarrier c;
        c.kind = SortKind::Finite;
        for (const auto& p : s.at("points")) c.labels.push_back(vertex_name(p));
        const json& metric = s.at("metric");
        if (metric.is_string() && metric.get<std::string>() == "discrete") {
            c.metric = SortCarrier::MetricKind::Discrete;
        } else {
            c.metric = SortCarrier::MetricKind::Table;
            for (const auto& row : metric)
                for (const auto& v : row) c.dist.push_back(rat_from_json(v));
            if (c.dist.size() != c.labels.size() * c.labels.size())
                throw input_error("metric table size mismatch in sort " +
                                  s.at("name").get<std::string>());
        }
        c.index_labels();
        M.carriers[s.at("name").get<std::string>()] = std::move(c);
    }

    auto flat_table = [&](const json& table, const std::vector<std::string>& arity,
                          auto&& cell) {
        // nested arrays by argument position; leaves are labels / values
        std::function<void(const json&, size_t)> walk = [&](const json& t, size_t level) {
            if (level == arity.size()) {
                cell(t);
                return;
            }
            if (!t.is_array()) throw input_error("table nesting does not match arity");
            if (t.size() != static_cast<size_t>(M.carrier(arity[level]).size()))
                throw input_error("table size does not match the carrier of " + arity[level]);
            for (const auto& sub : t) walk(sub, level + 1);
        };
        walk(table, 0);
    };

    for (const auto& f : funcs) {
        std::vector<std::string> arity = f.value("arity", std::vector<std::string>{});
        std::string result = f.at("result").get<std::string>();
        int id = *M.sig.resolve(f.at("name").get<std::string>(), arity);
        Interp I;
        if (arity.empty()) {
            I.kind = Interp::Kind::ConstPoint;
            I.cpoint = M.point(result, vertex_name(f.at("table")));
        } else {
            I.kind = Interp::Kind::FuncTable;
            flat_table(f.at("table"), arity, [&](const json& leaf) {
                I.table.push_back(M.point(result, vertex_name(leaf)));
            });
        }
        M.interps[id] = I;
    }
    for (const auto& p : j.value("predicates", json::array())) {
        std::vector<std::string> arity = p.value("arity", std::vector<std::string>{});
        int id = *M.sig.resolve(p.at("name").get<std::string>(), arity);
        Interp I;
        I.kind = Interp::Kind::PredTable;
        flat_table(p.at("values"), arity,
                   [&](const json& leaf) { I.values.push_back(rat_from_json(leaf)); });
        M.interps[id] = I;
    }
    validate_structure(M);
    return M;
}

} // namespace

MetricStructure structure_from_json(const json& j) {
    if (!j.is_object()) throw input_error("structure file must be a JSON object");
    if (!j.contains("kind")) return explicit_structure_from_json(j);
    std::string kind = j["kind"].get<std::string>();
    if (kind == "sym_hamming") return sym_hamming(j.at("n").get<int>(), j.value("cap", 8));
    if (kind == "gn") return gn_family(j.at("n").get<int>(), j.value("cap", 6));
    if (kind == "cyclic") return cyclic_group(j.at("n").get<int>());
    if (kind == "cayley") {
        std::vector<std::vector<int>> table = j.at("table").get<std::vector<std::vector<int>>>();
        std::vector<std::string> labels;
        for (const auto& l : j.value("labels", json::array()))
            labels.push_back(vertex_name(l));
        return cayley_group(table, labels, j.value("validate", true));
    }
    if (kind == "discrete") return discrete_wrap(structure_from_json(j.at("of")));
    if (kind == "hilbert") return hilbert_tower(hilbert_opts_from_json(j));
    if (kind == "tree") return tree_space(graph_from_json(j));
    if (kind == "graph") return graph_space(graph_from_json(j));
    if (kind == "zm_rotation")
        return zm_rotation_action(j.at("m").get<int>(), j.value("balls", 1));
    if (kind == "group_action") {
        MetricStructure G = structure_from_json(j.at("group"));
        WrapActionSpec spec;
        for (const auto& g : j.at("generators")) {
            GeneratorMap gm;
            gm.element = vertex_name(g.at("element"));
            if (g.contains("matrix"))
                gm.matrix = g["matrix"].get<std::vector<std::vector<double>>>();
            if (g.contains("translation"))
                gm.translation = g["translation"].get<std::vector<double>>();
            if (g.contains("vertex_map"))
                for (const auto& [from, to] : g["vertex_map"].items())
                    gm.vertex_map[from] = vertex_name(to);
            spec.generators.push_back(std::move(gm));
        }
        spec.nu = nu_from_json(j.at("nu"));
        if (j.contains("hilbert")) spec.hilbert = hilbert_opts_from_json(j["hilbert"]);
        if (j.contains("tree")) spec.tree = graph_from_json(j["tree"]);
        return wrap_action(G, spec, j.value("sort", "G"));
    }
    throw input_error("unknown structure kind: " + kind);
}

Scheme scheme_from_json(const json& j) {
    Scheme s;
    s.name = j.at("name").get<std::string>();
    s.sort = j.value("sort", "G");
    s.m = j.value("m", 1);
    s.k = j.value("k", 1);
    s.n = j.value("n", 1);
    if (j.contains("eps")) s.eps = rat_from_json(j["eps"]);
    if (j.contains("r")) s.r = rat_from_json(j["r"]);
    for (const auto& e : j.value("eps_grid", json::array()))
        s.eps_grid.push_back(rat_from_json(e));
    if (j.contains("eta"))
        for (const auto& [kk, ls] : j["eta"].items())
            s.eta[std::stoi(kk)] = {ls.at(0).get<int>(), ls.at(1).get<int>()};
    s.onb_k = j.value("onb_k", 2);
    s.ball = j.value("ball", 0);
    return s;
}

StructureSequence sequence_from_json(const json& j) {
    if (j.contains("family")) {
        std::string fam = j["family"].get<std::string>();
        std::vector<int> range = j.value("range", std::vector<int>{1, 6});
        if (fam == "gn") return gn_sequence(range.at(0), range.at(1));
        if (fam == "sym") return sym_sequence(range.at(0), range.at(1));
        throw input_error("unknown sequence family: " + fam);
    }
    std::vector<json> members = j.at("members").get<std::vector<json>>();
    if (members.empty()) throw input_error("empty sequence");
    StructureSequence s;
    s.max_index = static_cast<int>(members.size());
    s.generator = [members](int i) { return structure_from_json(members.at(i - 1)); };
    return s;
}

json scalar_to_json(const Scalar& s) {
    json o;
    o["approx"] = s.dbl();
    o["repr"] = fmt17(s.dbl());
    if (s.exact()) o["exact"] = rat_to_string(s.rat());
    return o;
}

json bounds_to_json(const ValueBounds& b) {
    json o;
    o["lo"] = scalar_to_json(b.lo);
    o["hi"] = scalar_to_json(b.hi);
    o["certified"] = b.certified;
    return o;
}

std::string fmt17(double x) {
    char buf[64];
    snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string digest(const std::string& payload) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : payload) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[32];
    snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw input_error("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

} // namespace contilog
