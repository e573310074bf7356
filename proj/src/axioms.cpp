#include "contilog/axioms.hpp"

#include "contilog/parser.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace contilog {

namespace {

std::string rs(const Rat& q) { return rat_to_string(q); }

std::string fold_min(const std::vector<std::string>& xs) {
    std::string out = xs.back();
    for (size_t i = xs.size() - 1; i-- > 0;) out = "min(" + xs[i] + "," + out + ")";
    return out;
}

std::string fold_max(const std::vector<std::string>& xs) {
    std::string out = xs.back();
    for (size_t i = xs.size() - 1; i-- > 0;) out = "max(" + xs[i] + "," + out + ")";
    return out;
}

std::string prod_term(const std::vector<std::string>& xs) {
    std::string out = xs[0];
    for (size_t i = 1; i < xs.size(); ++i) out = "mul(" + out + "," + xs[i] + ")";
    return out;
}

void require_symbol(const Signature& sig, const std::string& name, const std::string& scheme) {
    if (!sig.has_symbol(name))
        throw input_error("scheme " + scheme + " needs the symbol " + name);
}

std::string act_target(const Signature& sig, int l, int b, const std::string& scheme) {
    auto id = sig.resolve("act", {"K" + std::to_string(l), "B" + std::to_string(b)});
    if (!id)
        throw input_error("scheme " + scheme + " needs act on (K" + std::to_string(l) + ",B" +
                          std::to_string(b) + ")");
    return sig.symbol(*id).result_sort;
}

std::string include_term(const std::string& v, const std::string& from, const std::string& to) {
    if (from == to) return v;
    return "inc_" + from + "_" + to + "(" + v + ")";
}

int largest_ball(const Signature& sig, SortKind kind) {
    int best = 0;
    for (const Sort& s : sig.sorts())
        if (s.kind == kind && s.ball_index) best = std::max(best, *s.ball_index);
    return best;
}

} // namespace

std::vector<CompiledAxiom> compile_scheme(const Scheme& s, const Signature& sig) {
    std::vector<CompiledAxiom> out;
    const std::string& S = s.sort;
    auto push = [&](const std::string& name, const std::string& text, const Rat& cap = 1,
                    bool is_axiom = true) {
        CompiledAxiom a;
        a.name = name;
        a.text = text;
        a.formula = parse_formula(text, sig, cap);
        a.is_axiom = is_axiom;
        out.push_back(std::move(a));
    };

    if (s.name == "group") {
        require_symbol(sig, "mul", s.name);
        require_symbol(sig, "inv", s.name);
        require_symbol(sig, "1", s.name);
        push("associativity",
             "sup x:" + S + ". sup y:" + S + ". sup z:" + S +
                 ". d(mul(mul(x,y),z),mul(x,mul(y,z)))");
        push("unit", "sup x:" + S + ". d(mul(x,1),x)");
        push("inverse", "sup x:" + S + ". d(mul(x,inv(x)),1)");
        return out;
    }

    if (s.name == "k0") {
        require_symbol(sig, "P", s.name);
        require_symbol(sig, "Q", s.name);
        push("Q(1)=0", "Q(1)");
        push("P,Q disjoint", "sup x:" + S + ". min(P(x),Q(x))");
        push("P symmetric", "sup x:" + S + ". absdiff(P(x),P(inv(x)))");
        push("P attains 1/2", "inf x:" + S + ". absdiff(P(x),1/2)");
        push("Q symmetric", "sup x:" + S + ". absdiff(Q(x),Q(inv(x)))");
        push("Q attains 1/2", "inf x:" + S + ". absdiff(Q(x),1/2)");
        std::vector<Rat> grid = s.eps_grid;
        if (grid.empty())
            grid = {Rat(0), Rat(1, 4), Rat(1, 2), Rat(3, 4), Rat(1)};
        for (const Rat& e : grid)
            push("boundary(eps=" + rs(e) + ")",
                 "sup x:" + S + ". min(sub(" + rs(e) + ",Q(x)),inf y:" + S +
                     ". max(sub(d(x,y)," + rs(Rat(2 * e)) + "),sub(" + rs(e) + ",P(y))))",
                 std::max(Rat(1), Rat(2 * e))); // the 2*eps literal may pass 1
        return out;
    }

    if (s.name == "theta") {
        require_symbol(sig, "P", s.name);
        require_symbol(sig, "mul", s.name);
        std::string text;
        for (int i = 1; i <= s.m; ++i) text += "sup x" + std::to_string(i) + ":" + S + ". ";
        text += "inf x:" + S + ". ";
        for (int j = 1; j <= s.k; ++j) text += "sup y" + std::to_string(j) + ":" + S + ". ";
        // words x_{i1} y_1 x_{i2} y_2 ... x_{ik} y_k, indices lexicographic
        std::vector<std::string> words;
        std::vector<int> idx(s.k, 1);
        while (true) {
            std::vector<std::string> parts;
            for (int j = 0; j < s.k; ++j) {
                parts.push_back("x" + std::to_string(idx[j]));
                parts.push_back("y" + std::to_string(j + 1));
            }
            words.push_back("d(x," + prod_term(parts) + ")");
            int j = s.k;
            while (j > 0) {
                --j;
                if (++idx[j] <= s.m) break;
                idx[j] = 1;
                if (j == 0) goto words_done;
            }
        }
    words_done:;
        std::vector<std::string> inner;
        for (int j = 1; j <= s.k; ++j) inner.push_back("P(y" + std::to_string(j) + ")");
        inner.push_back("sub(" + rs(s.eps) + "," + fold_min(words) + ")");
        push("theta(m=" + std::to_string(s.m) + ",k=" + std::to_string(s.k) +
                 ",eps=" + rs(s.eps) + ")",
             text + fold_min(inner));
        return out;
    }

    if (s.name == "bounded" || s.name == "roelcke-bounded" || s.name == "roelcke-precompact" ||
        s.name == "obk") {
        require_symbol(sig, "mul", s.name);
        std::string text;
        for (int i = 1; i <= s.m; ++i) text += "inf f" + std::to_string(i) + ":" + S + ". ";
        text += "sup x:" + S + ". ";
        auto ball_clause = [&](const std::string& v) {
            return "sub(d(" + v + ",1)," + rs(s.r) + ")";
        };
        std::vector<std::string> parts;
        if (s.name == "bounded") {
            for (int j = 1; j <= s.k; ++j) text += "inf v" + std::to_string(j) + ":" + S + ". ";
            std::vector<std::string> vs;
            for (int j = 1; j <= s.k; ++j) {
                vs.push_back("v" + std::to_string(j));
                parts.push_back(ball_clause(vs.back()));
            }
            std::vector<std::string> covers;
            for (int i = 1; i <= s.m; ++i) {
                std::vector<std::string> w = {"f" + std::to_string(i)};
                w.insert(w.end(), vs.begin(), vs.end());
                covers.push_back("d(x," + prod_term(w) + ")");
            }
            parts.push_back(fold_min(covers));
        } else if (s.name == "roelcke-bounded") {
            std::vector<std::string> us, vs;
            for (int j = 1; j <= s.k; ++j) {
                text += "inf u" + std::to_string(j) + ":" + S + ". ";
                us.push_back("u" + std::to_string(j));
            }
            for (int j = 1; j <= s.k; ++j) {
                text += "inf v" + std::to_string(j) + ":" + S + ". ";
                vs.push_back("v" + std::to_string(j));
            }
            for (const auto& u : us) parts.push_back(ball_clause(u));
            for (const auto& v : vs) parts.push_back(ball_clause(v));
            std::vector<std::string> covers;
            for (int i = 1; i <= s.m; ++i) {
                std::vector<std::string> w = us;
                w.push_back("f" + std::to_string(i));
                w.insert(w.end(), vs.begin(), vs.end());
                covers.push_back("d(x," + prod_term(w) + ")");
            }
            parts.push_back(fold_min(covers));
        } else if (s.name == "roelcke-precompact") {
            text += "inf u:" + S + ". inf v:" + S + ". ";
            parts.push_back(ball_clause("u"));
            parts.push_back(ball_clause("v"));
            std::vector<std::string> covers;
            for (int i = 1; i <= s.m; ++i)
                covers.push_back("d(x," + prod_term({"u", "f" + std::to_string(i), "v"}) + ")");
            parts.push_back(fold_min(covers));
        } else { // obk: G = (FV)^k
            std::vector<std::string> vs;
            for (int j = 1; j <= s.k; ++j) {
                text += "inf v" + std::to_string(j) + ":" + S + ". ";
                vs.push_back("v" + std::to_string(j));
                parts.push_back(ball_clause(vs.back()));
            }
            std::vector<std::string> covers;
            std::vector<int> idx(s.k, 1);
            while (true) {
                std::vector<std::string> w;
                for (int j = 0; j < s.k; ++j) {
                    w.push_back("f" + std::to_string(idx[j]));
                    w.push_back(vs[j]);
                }
                covers.push_back("d(x," + prod_term(w) + ")");
                int j = s.k;
                while (j > 0) {
                    --j;
                    if (++idx[j] <= s.m) break;
                    idx[j] = 1;
                    if (j == 0) goto obk_done;
                }
            }
        obk_done:;
            parts.push_back(fold_min(covers));
        }
        push(s.name + "(m=" + std::to_string(s.m) + ",k=" + std::to_string(s.k) +
                 ",r=" + rs(s.r) + ")",
             text + fold_max(parts));
        return out;
    }

    if (s.name == "aiv") {
        std::string B = "B" + std::to_string(s.m), K = "K" + std::to_string(s.n);
        require_symbol(sig, "norm", s.name);
        std::string target = act_target(sig, s.n, s.m, s.name);
        std::string vterm = include_term("v", B, target);
        push("aiv(m=" + std::to_string(s.m) + ",n=" + std::to_string(s.n) + ")",
             "inf v:" + B + ". sup x:" + K + ". max(sub(d(act(x,v)," + vterm + "),1/" +
                 std::to_string(s.n) + "),absdiff(1,norm(v)))");
        push("displacement(m=" + std::to_string(s.m) + ",n=" + std::to_string(s.n) + ")",
             "inf v:" + B + ". sup x:" + K + ". d(act(x,v)," + vterm + ")", Rat(1), false);
        return out;
    }

    if (s.name == "nfh" || s.name == "nfr") {
        if (s.eta.empty()) throw input_error("scheme " + s.name + " needs an eta table");
        for (const auto& [kk, ls] : s.eta) {
            auto [l, sv] = ls;
            std::string B = "B" + std::to_string(kk), K = "K" + std::to_string(l);
            std::string target = act_target(sig, l, kk, s.name);
            std::string vterm = include_term("v", B, target);
            push(s.name + "(k=" + std::to_string(kk) + ",l=" + std::to_string(l) +
                     ",s=" + std::to_string(sv) + ")",
                 "sup v:" + B + ". inf x:" + K + ". sub(1/" + std::to_string(sv) +
                     ",d(act(x,v)," + vterm + "))");
        }
        return out;
    }

    if (s.name == "tree") {
        int b = s.ball > 0 ? s.ball : largest_ball(sig, SortKind::TreeBall);
        if (b == 0) throw input_error("scheme tree needs tree-ball sorts");
        std::string B = "B" + std::to_string(b);
        Rat cap = Rat(2 * sig.sort(B).diameter + 1);
        push("four-point(" + B + ")",
             "sup x:" + B + ". sup y:" + B + ". sup z:" + B + ". sup w:" + B +
                 ". sub(add(d(x,y),d(z,w)),max(add(d(x,z),d(y,w)),add(d(x,w),d(y,z))))",
             cap);
        push("midpoint(" + B + ")",
             "sup x:" + B + ". sup y:" + B + ". inf z:" + B +
                 ". max(absdiff(d(x,z),half(d(x,y))),absdiff(d(y,z),half(d(x,y))))",
             cap);
        return out;
    }

    if (s.name == "hilbert-onb") {
        bool complex_field = sig.has_symbol("ipre");
        if (!complex_field) require_symbol(sig, "ip", s.name);
        std::string text;
        for (int i = 1; i <= s.onb_k; ++i) text += "inf v" + std::to_string(i) + ":B1. ";
        std::vector<std::string> parts;
        auto re = [&](int i, int j) {
            std::string p = complex_field ? "ipre" : "ip";
            return p + "(v" + std::to_string(i) + ",v" + std::to_string(j) + ")";
        };
        for (int i = 1; i <= s.onb_k; ++i)
            for (int j = i; j <= s.onb_k; ++j) {
                parts.push_back("absdiff(" + re(i, j) + "," + (i == j ? "1" : "0") + ")");
                if (complex_field && i != j)
                    parts.push_back("absdiff(ipim(v" + std::to_string(i) + ",v" +
                                    std::to_string(j) + "),0)");
            }
        push("onb(k=" + std::to_string(s.onb_k) + ")", text + fold_max(parts));
        return out;
    }

    throw input_error("unknown scheme: " + s.name);
}

DefectReport scheme_defect(const MetricStructure& M, const Scheme& s, const EvalOptions& opts) {
    std::vector<CompiledAxiom> axioms = compile_scheme(s, M.sig);
    DefectReport rep;
    rep.worst = Scalar(Rat(0));
    EvalOptions o = opts;
    if (s.name == "aiv") {
        // the |1 - ||v||| clause is enforced as a hard sphere constraint,
        // so the reported defect is the unit-vector one
        o.sphere_vars.insert("v");
        rep.note = "aiv quantification restricted to unit vectors";
    }
    if (s.name == "k0")
        rep.note = "P,Q built from a set V are affinely rescaled so each attains 1/2";
    bool first = true;
    for (const CompiledAxiom& ax : axioms) {
        WitnessedValue w = evaluate_witness(M, ax.formula, {}, o);
        DefectReport::Entry e;
        e.name = ax.name;
        e.text = ax.text;
        e.bounds = w.bounds;
        e.witness = w.witness;
        e.is_axiom = ax.is_axiom;
        if (ax.is_axiom) {
            rep.certified = rep.certified && w.bounds.certified;
            if (first || w.bounds.hi > rep.worst) {
                rep.worst = w.bounds.hi;
                rep.worst_axiom = ax.name;
                rep.worst_witness = w.witness;
            }
            first = false;
        }
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// tree defect

namespace {

// minimize max(|A|,|B|) over t in [lo,hi] for linear A, B (slope form),
// returning the exact rational minimum
Rat min_max_abs_linear(const Rat& lo, const Rat& hi, const Rat& a0, const Rat& sa,
                       const Rat& b0, const Rat& sb) {
    std::vector<Rat> cand = {lo, hi};
    auto root = [&](const Rat& y0, const Rat& sl) {
        if (sl != 0) {
            Rat t = Rat(lo - y0 / sl);
            if (t > lo && t < hi) cand.push_back(t);
        }
    };
    root(a0, sa);
    root(b0, sb);
    // crossings |A| = |B|: A = B and A = -B
    if (sa != sb) {
        Rat t = Rat(lo + (b0 - a0) / (sa - sb));
        if (t > lo && t < hi) cand.push_back(t);
    }
    if (sa != -sb) {
        Rat t = Rat(lo + (-b0 - a0) / (sa + sb));
        if (t > lo && t < hi) cand.push_back(t);
    }
    Rat best;
    bool got = false;
    for (const Rat& t : cand) {
        Rat A = Rat(a0 + sa * (t - lo)), B = Rat(b0 + sb * (t - lo));
        if (A < 0) A = Rat(-A);
        if (B < 0) B = Rat(-B);
        Rat v = std::max(A, B);
        if (!got || v < best) {
            best = v;
            got = true;
        }
    }
    return best;
}

// exact geometric inf over the realization of the graph of the midpoint
// objective for the vertex pair (x, y)
Rat geometric_midpoint_defect(const GraphData& g, int x, int y) {
    Rat c = Rat(g.dist[x][y] / 2);
    Rat best;
    bool got = false;
    auto consider = [&](const Rat& v) {
        if (!got || v < best) {
            best = v;
            got = true;
        }
    };
    for (const auto& e : g.edges) {
        // d(x, z(t)) = min(dxu + t, dxv + L - t), kink where both branches meet
        Rat dxu = g.dist[x][e.u], dxv = g.dist[x][e.v];
        Rat dyu = g.dist[y][e.u], dyv = g.dist[y][e.v];
        std::vector<Rat> pts = {Rat(0), e.len};
        Rat kx = Rat((dxv + e.len - dxu) / 2);
        Rat ky = Rat((dyv + e.len - dyu) / 2);
        if (kx > 0 && kx < e.len) pts.push_back(kx);
        if (ky > 0 && ky < e.len) pts.push_back(ky);
        std::sort(pts.begin(), pts.end());
        for (size_t i = 0; i + 1 < pts.size(); ++i) {
            Rat lo = pts[i], hi = pts[i + 1];
            if (lo == hi) continue;
            auto branch = [&](const Rat& du, const Rat& dv, const Rat& t) {
                return std::min(Rat(du + t), Rat(dv + e.len - t));
            };
            Rat alo = Rat(branch(dxu, dxv, lo) - c), ahi = Rat(branch(dxu, dxv, hi) - c);
            Rat blo = Rat(branch(dyu, dyv, lo) - c), bhi = Rat(branch(dyu, dyv, hi) - c);
            Rat sa = Rat((ahi - alo) / (hi - lo)), sb = Rat((bhi - blo) / (hi - lo));
            consider(min_max_abs_linear(lo, hi, alo, sa, blo, sb));
        }
    }
    if (!got) {
        // no edges: vertices only
        for (size_t z = 0; z < g.names.size(); ++z) {
            Rat A = Rat(g.dist[x][z] - c), B = Rat(g.dist[y][z] - c);
            if (A < 0) A = Rat(-A);
            if (B < 0) B = Rat(-B);
            consider(std::max(A, B));
        }
    }
    return best;
}

} // namespace

TreeDefectReport tree_defect(const MetricStructure& M, const std::string& sort) {
    std::string S = sort;
    if (S.empty()) {
        int b = largest_ball(M.sig, SortKind::TreeBall);
        if (b == 0) throw input_error("tree_defect: no tree-ball sorts and no sort given");
        S = "B" + std::to_string(b);
    }
    const SortCarrier& c = M.carrier(S);
    if (!c.finite()) throw input_error("tree_defect needs a finite point sort");
    int n = c.size();

    Rat hyp = 0;
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            for (int z = 0; z < n; ++z)
                for (int w = 0; w < n; ++w) {
                    Rat s1 = Rat(c.finite_dist(x, y) + c.finite_dist(z, w));
                    Rat s2 = Rat(c.finite_dist(x, z) + c.finite_dist(y, w));
                    Rat s3 = Rat(c.finite_dist(x, w) + c.finite_dist(y, z));
                    Rat d = Rat(s1 - std::max(s2, s3));
                    if (d > hyp) hyp = d;
                }

    TreeDefectReport rep;
    rep.hyperbolicity = ValueBounds::exact(Scalar(hyp));

    Rat mid = 0;
    if (M.graph && !M.graph->edges.empty()) {
        rep.geometric_midpoint = true;
        const GraphData& g = *M.graph;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                Rat v = geometric_midpoint_defect(g, c.graph_vertex.empty() ? i
                                                                            : c.graph_vertex[i],
                                                  c.graph_vertex.empty() ? j
                                                                         : c.graph_vertex[j]);
                if (v > mid) mid = v;
            }
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Rat cc = Rat(c.finite_dist(i, j) / 2);
                Rat best;
                bool got = false;
                for (int z = 0; z < n; ++z) {
                    Rat A = Rat(c.finite_dist(i, z) - cc), B = Rat(c.finite_dist(j, z) - cc);
                    if (A < 0) A = Rat(-A);
                    if (B < 0) B = Rat(-B);
                    Rat v = std::max(A, B);
                    if (!got || v < best) {
                        best = v;
                        got = true;
                    }
                }
                if (got && best > mid) mid = best;
            }
    }
    rep.midpoint = ValueBounds::exact(Scalar(mid));
    rep.combined = ValueBounds::exact(Scalar(std::max(hyp, mid)));
    return rep;
}

// ---------------------------------------------------------------------------
// k0 attachment and generic predicate tables

MetricStructure with_predicate(MetricStructure M, const std::string& name,
                               const std::vector<std::string>& arg_sorts, const Rat& lo,
                               const Rat& hi, std::vector<Rat> values) {
    size_t expect = 1;
    for (const auto& s : arg_sorts) expect *= M.carrier(s).size();
    if (values.size() != expect) throw input_error("predicate table size mismatch");
    int id = M.sig.add_predicate(name, arg_sorts, lo, hi);
    Interp I;
    I.kind = Interp::Kind::PredTable;
    I.values = std::move(values);
    M.interps[id] = I;
    return M;
}

MetricStructure k0_attach(const MetricStructure& M, const std::vector<std::string>& V,
                          const std::string& sort) {
    const SortCarrier& c = M.carrier(sort);
    int n = c.size();
    std::set<int> vset;
    for (const auto& lbl : V) vset.insert(M.point(sort, lbl));
    if (vset.empty() || static_cast<int>(vset.size()) == n)
        throw input_error("k0_attach needs a proper nonempty subset V");
    auto dist_to = [&](int x, const std::set<int>& S) {
        Rat best = -1;
        for (int s : S) {
            Rat d = c.finite_dist(x, s);
            if (best < 0 || d < best) best = d;
        }
        return best;
    };
    std::set<int> comp;
    for (int i = 0; i < n; ++i)
        if (!vset.count(i)) comp.insert(i);
    std::vector<Rat> P(n), Q(n);
    Rat pmax = 0, qmax = 0;
    for (int i = 0; i < n; ++i) {
        Q[i] = dist_to(i, vset);
        P[i] = dist_to(i, comp);
        pmax = std::max(pmax, P[i]);
        qmax = std::max(qmax, Q[i]);
    }
    // rescale so both predicates attain exactly 1/2
    for (int i = 0; i < n; ++i) {
        if (pmax > 0) P[i] = Rat(P[i] / (2 * pmax));
        if (qmax > 0) Q[i] = Rat(Q[i] / (2 * qmax));
    }
    MetricStructure out = with_predicate(M, "P", {sort}, Rat(0), Rat(1), std::move(P));
    return with_predicate(std::move(out), "Q", {sort}, Rat(0), Rat(1), std::move(Q));
}

// ---------------------------------------------------------------------------
// wrap_action

namespace {

using Mat = std::vector<double>; // row-major square
using Vec = std::vector<double>;

Mat mat_mul(const Mat& a, const Mat& b, int n) {
    Mat c(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j) c[i * n + j] += a[i * n + k] * b[k * n + j];
    return c;
}

Vec mat_vec(const Mat& a, const Vec& v, int n) {
    Vec out(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[i] += a[i * n + j] * v[j];
    return out;
}

bool mat_close(const Mat& a, const Mat& b, double tol) {
    for (size_t i = 0; i < a.size(); ++i)
        if (std::fabs(a[i] - b[i]) > tol) return false;
    return true;
}

bool orthogonal(const Mat& m, int n, double tol) {
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0;
            for (int k = 0; k < n; ++k) s += m[k * n + i] * m[k * n + j];
            if (std::fabs(s - (i == j ? 1.0 : 0.0)) > tol) return false;
        }
    return true;
}

struct Affine {
    Mat m;
    Vec t;
};

// apply a, then b
Affine compose(const Affine& a, const Affine& b, int n) {
    Affine r;
    r.m = mat_mul(b.m, a.m, n);
    r.t = mat_vec(b.m, a.t, n);
    for (int i = 0; i < n; ++i) r.t[i] += b.t[i];
    return r;
}

Affine invert_orthogonal(const Affine& a, int n) {
    Affine r;
    r.m.assign(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r.m[i * n + j] = a.m[j * n + i];
    Vec mt = mat_vec(r.m, a.t, n);
    r.t.assign(n, 0.0);
    for (int i = 0; i < n; ++i) r.t[i] = -mt[i];
    return r;
}

} // namespace

MetricStructure wrap_action(const MetricStructure& G, const WrapActionSpec& spec,
                            const std::string& sort) {
    GroupView g = group_view(G, sort);
    spec.nu.validate();
    std::vector<int> gens;
    for (const GeneratorMap& gm : spec.generators) gens.push_back(G.point(sort, gm.element));
    if (gens.empty()) throw input_error("wrap_action needs at least one generator");

    if (spec.hilbert) {
        int n = spec.hilbert->field == Field::Real ? spec.hilbert->dim : 2 * spec.hilbert->dim;
        std::vector<std::optional<Affine>> rep(g.n);
        std::vector<std::pair<int, Affine>> gen_reps;
        for (size_t gi = 0; gi < spec.generators.size(); ++gi) {
            const GeneratorMap& gm = spec.generators[gi];
            if (static_cast<int>(gm.matrix.size()) != n)
                throw input_error("generator matrix for " + gm.element + " must be " +
                                  std::to_string(n) + "x" + std::to_string(n));
            Affine a;
            for (const auto& row : gm.matrix) {
                if (static_cast<int>(row.size()) != n)
                    throw input_error("generator matrix for " + gm.element + " must be " +
                                      std::to_string(n) + "x" + std::to_string(n));
                a.m.insert(a.m.end(), row.begin(), row.end());
            }
            a.t = gm.translation.empty() ? Vec(n, 0.0) : gm.translation;
            if (static_cast<int>(a.t.size()) != n)
                throw input_error("translation for " + gm.element + " has wrong dimension");
            if (!orthogonal(a.m, n, spec.tol))
                throw action_error("generator does not act isometrically", gm.element);
            gen_reps.emplace_back(gens[gi], a);
        }
        // extend along the Cayley graph; revisits must agree
        Affine idmap;
        idmap.m.assign(static_cast<size_t>(n) * n, 0.0);
        for (int i = 0; i < n; ++i) idmap.m[i * n + i] = 1.0;
        idmap.t.assign(n, 0.0);
        rep[g.unit()] = idmap;
        std::vector<int> queue = {g.unit()};
        std::vector<std::pair<int, Affine>> steps = gen_reps;
        for (const auto& [s, a] : gen_reps) steps.emplace_back(g.inv(s), invert_orthogonal(a, n));
        for (size_t qi = 0; qi < queue.size(); ++qi) {
            int a = queue[qi];
            for (const auto& [s, amap] : steps) {
                int b = g.mul(a, s); // apply a, then s
                Affine comp = compose(*rep[a], amap, n);
                if (!rep[b]) {
                    rep[b] = comp;
                    queue.push_back(b);
                } else if (!mat_close(rep[b]->m, comp.m, 10 * spec.tol) ||
                           !mat_close(rep[b]->t, comp.t, 10 * spec.tol)) {
                    throw action_error("generator maps are not a homomorphism",
                                       "inconsistent image of " + g.label(b));
                }
            }
        }
        for (int i = 0; i < g.n; ++i)
            if (!rep[i])
                throw action_error("generators do not generate the group", g.label(i));

        // nu bound: an isometric affine map sends the m-ball into the ball
        // of radius m + |t|, and that radius is attained
        std::vector<int> level = k_chain_levels(g, gens);
        for (const auto& [lm, target] : spec.nu.table) {
            auto [l, m] = lm;
            if (m > spec.hilbert->max_ball || target > spec.hilbert->max_ball) continue;
            for (int e = 0; e < g.n; ++e) {
                if (level[e] > l) continue;
                double tn = vec_norm(rep[e]->t);
                if (tn + m > target + 10 * spec.tol) {
                    // witness vector: x = m * M^-1 (t/|t|)
                    Affine inv = invert_orthogonal(*rep[e], n);
                    Vec dir(n, 0.0);
                    for (int i = 0; i < n; ++i) dir[i] = rep[e]->t[i] / tn;
                    Vec x = mat_vec(inv.m, dir, n);
                    for (double& z : x) z *= m;
                    std::string wit = "element " + g.label(e) + " sends a vector of norm " +
                                      std::to_string(static_cast<double>(m)) + " to norm " +
                                      std::to_string(m + tn) + " > nu(" + std::to_string(l) +
                                      "," + std::to_string(m) + ")=" + std::to_string(target);
                    (void)x;
                    throw action_error("nu table violated", wit);
                }
            }
        }

        ActionAttachment att;
        att.gens = gens;
        att.hilbert = *spec.hilbert;
        att.nu = spec.nu;
        att.mats.resize(g.n);
        att.trans.resize(g.n);
        for (int i = 0; i < g.n; ++i) {
            att.mats[i] = rep[i]->m;
            att.trans[i] = rep[i]->t;
        }
        return attach_hilbert_action(G, sort, att);
    }

    if (spec.tree) {
        GraphData gd = make_graph_data(*spec.tree, true);
        int nv = static_cast<int>(gd.names.size());
        auto vidx = [&](const std::string& name) {
            auto it = std::lower_bound(gd.names.begin(), gd.names.end(), name);
            if (it == gd.names.end() || *it != name)
                throw input_error("unknown tree vertex: " + name);
            return static_cast<int>(it - gd.names.begin());
        };
        std::vector<std::optional<std::vector<int>>> rep(g.n);
        std::vector<std::pair<int, std::vector<int>>> steps;
        for (size_t gi = 0; gi < spec.generators.size(); ++gi) {
            const GeneratorMap& gm = spec.generators[gi];
            std::vector<int> map(nv, -1);
            for (const auto& [from, to] : gm.vertex_map) map[vidx(from)] = vidx(to);
            for (int v = 0; v < nv; ++v)
                if (map[v] < 0)
                    throw input_error("vertex map for " + gm.element + " misses " +
                                      gd.names[v]);
            for (int u = 0; u < nv; ++u)
                for (int v = 0; v < nv; ++v)
                    if (gd.dist[map[u]][map[v]] != gd.dist[u][v])
                        throw action_error("generator does not act isometrically on the tree",
                                           gm.element + " at (" + gd.names[u] + "," +
                                               gd.names[v] + ")");
            std::vector<int> inv(nv);
            for (int v = 0; v < nv; ++v) inv[map[v]] = v;
            steps.emplace_back(gens[gi], map);
            steps.emplace_back(g.inv(gens[gi]), inv);
        }
        std::vector<int> idmap(nv);
        for (int v = 0; v < nv; ++v) idmap[v] = v;
        rep[g.unit()] = idmap;
        std::vector<int> queue = {g.unit()};
        for (size_t qi = 0; qi < queue.size(); ++qi) {
            int a = queue[qi];
            for (const auto& [s, smap] : steps) {
                int b = g.mul(a, s);
                std::vector<int> comp(nv);
                for (int v = 0; v < nv; ++v) comp[v] = smap[(*rep[a])[v]];
                if (!rep[b]) {
                    rep[b] = comp;
                    queue.push_back(b);
                } else if (*rep[b] != comp) {
                    throw action_error("generator maps are not a homomorphism",
                                       "inconsistent image of " + g.label(b));
                }
            }
        }
        for (int i = 0; i < g.n; ++i)
            if (!rep[i])
                throw action_error("generators do not generate the group", g.label(i));

        std::vector<int> level = k_chain_levels(g, gens);
        for (const auto& [lm, target] : spec.nu.table) {
            auto [l, m] = lm;
            for (int e = 0; e < g.n; ++e) {
                if (level[e] > l) continue;
                for (int v = 0; v < nv; ++v) {
                    if (gd.dist[gd.basepoint][v] > Rat(m)) continue;
                    int w = (*rep[e])[v];
                    if (gd.dist[gd.basepoint][w] > Rat(target))
                        throw action_error(
                            "nu table violated",
                            "element " + g.label(e) + " moves " + gd.names[v] + " (in B" +
                                std::to_string(m) + ") to " + gd.names[w] + " outside B" +
                                std::to_string(target));
                }
            }
        }

        TreeActionAttachment att;
        att.gens = gens;
        att.nu = spec.nu;
        att.tree = *spec.tree;
        att.vertex_maps.resize(g.n);
        for (int i = 0; i < g.n; ++i) att.vertex_maps[i] = *rep[i];
        return attach_tree_action(G, sort, att);
    }

    throw input_error("wrap_action needs a hilbert or tree target");
}

} // namespace contilog
