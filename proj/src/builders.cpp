#include "contilog/builders.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace contilog {

std::vector<uint8_t> perm_compose(const std::vector<uint8_t>& a, const std::vector<uint8_t>& b) {
    std::vector<uint8_t> r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = b[a[i]];
    return r;
}

std::vector<uint8_t> perm_inverse(const std::vector<uint8_t>& a) {
    std::vector<uint8_t> r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[a[i]] = static_cast<uint8_t>(i);
    return r;
}

std::string perm_label(const std::vector<uint8_t>& p) {
    std::string s;
    std::vector<bool> seen(p.size(), false);
    for (size_t i = 0; i < p.size(); ++i) {
        if (seen[i] || p[i] == i) continue;
        s += "(";
        size_t j = i;
        bool first = true;
        while (!seen[j]) {
            seen[j] = true;
            if (!first) s += " ";
            first = false;
            s += std::to_string(j + 1);
            j = p[j];
        }
        s += ")";
    }
    return s.empty() ? "()" : s;
}

Signature group_signature(const std::string& sort, const Rat& diameter) {
    Signature sig;
    sig.add_sort(Sort{sort, diameter, SortKind::Finite, std::nullopt});
    sig.add_function("mul", {sort, sort}, sort);
    sig.add_function("inv", {sort}, sort);
    sig.add_function("1", {}, sort);
    return sig;
}

namespace {

MetricStructure perm_group_structure(std::vector<std::vector<uint8_t>> perms) {
    std::sort(perms.begin(), perms.end());
    MetricStructure M;
    M.sig = group_signature();
    SortCarrier c;
    c.kind = SortKind::Finite;
    c.metric = SortCarrier::MetricKind::PermHamming;
    c.degree = static_cast<int>(perms[0].size());
    for (const auto& p : perms) c.labels.push_back(perm_label(p));
    c.perms = std::move(perms);
    c.index_labels();
    int identity = -1;
    for (int i = 0; i < c.size(); ++i) {
        bool id = true;
        for (size_t k = 0; k < c.perms[i].size(); ++k)
            if (c.perms[i][k] != k) id = false;
        if (id) identity = i;
    }
    if (identity < 0) throw input_error("permutation carrier lacks the identity");
    M.carriers["G"] = std::move(c);
    Interp mul;
    mul.kind = Interp::Kind::PermMul;
    Interp inv;
    inv.kind = Interp::Kind::PermInv;
    Interp unit;
    unit.kind = Interp::Kind::ConstPoint;
    unit.cpoint = identity;
    M.interps[*M.sig.resolve("mul", {"G", "G"})] = mul;
    M.interps[*M.sig.resolve("inv", {"G"})] = inv;
    M.interps[*M.sig.resolve("1", {})] = unit;
    return M;
}

} // namespace

MetricStructure sym_hamming(int n, int cap) {
    if (n < 1 || n > cap)
        throw input_error("sym_hamming degree out of range 1.." + std::to_string(cap));
    std::vector<uint8_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<uint8_t>> perms;
    do {
        perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return perm_group_structure(std::move(perms));
}

MetricStructure gn_family(int n, int cap) {
    if (n < 1 || n > cap)
        throw input_error("gn_family index out of range 1.." + std::to_string(cap));
    int block = 1 << n;
    int degree = block + 3;
    std::vector<uint8_t> s3(3);
    std::iota(s3.begin(), s3.end(), 0);
    std::vector<std::vector<uint8_t>> s3perms;
    do {
        s3perms.push_back(s3);
    } while (std::next_permutation(s3.begin(), s3.end()));

    std::vector<std::vector<uint8_t>> perms;
    for (int a = 0; a < block; ++a)
        for (const auto& sigma : s3perms) {
            std::vector<uint8_t> p(degree);
            for (int x = 0; x < block; ++x) p[x] = static_cast<uint8_t>(x ^ a);
            for (int i = 0; i < 3; ++i) p[block + i] = static_cast<uint8_t>(block + sigma[i]);
            perms.push_back(std::move(p));
        }
    return perm_group_structure(std::move(perms));
}

MetricStructure cayley_group(const std::vector<std::vector<int>>& table,
                             std::vector<std::string> labels, bool validate) {
    int n = static_cast<int>(table.size());
    if (n == 0) throw input_error("empty Cayley table");
    for (const auto& row : table) {
        if (static_cast<int>(row.size()) != n)
            throw input_error("Cayley table is not square");
        for (int v : row)
            if (v < 0 || v >= n) throw input_error("Cayley table entry out of range");
    }
    if (labels.empty())
        for (int i = 0; i < n; ++i) labels.push_back("g" + std::to_string(i));
    int identity = -1;
    for (int e = 0; e < n; ++e) {
        bool ok = true;
        for (int j = 0; j < n; ++j)
            if (table[e][j] != j || table[j][e] != j) ok = false;
        if (ok) {
            identity = e;
            break;
        }
    }
    if (identity < 0) throw input_error("non-group table: no two-sided identity");
    std::vector<int> inv(n, -1);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (table[a][b] == identity && table[b][a] == identity) inv[a] = b;
    for (int a = 0; a < n; ++a)
        if (inv[a] < 0) throw input_error("non-group table: " + labels[a] + " has no inverse");
    if (validate) {
        for (int a = 0; a < n; ++a) {
            std::set<int> row(table[a].begin(), table[a].end());
            if (static_cast<int>(row.size()) != n)
                throw input_error("non-group table: row of " + labels[a] +
                                  " is not a permutation");
        }
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    if (table[table[a][b]][c] != table[a][table[b][c]])
                        throw input_error("non-group table: associativity fails at (" +
                                          labels[a] + "," + labels[b] + "," + labels[c] + ")");
    }

    MetricStructure M;
    M.sig = group_signature();
    SortCarrier c;
    c.kind = SortKind::Finite;
    c.metric = SortCarrier::MetricKind::Discrete;
    c.labels = std::move(labels);
    c.index_labels();
    M.carriers["G"] = std::move(c);

    Interp mul;
    mul.kind = Interp::Kind::FuncTable;
    mul.table.reserve(static_cast<size_t>(n) * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) mul.table.push_back(table[a][b]);
    Interp invI;
    invI.kind = Interp::Kind::FuncTable;
    for (int a = 0; a < n; ++a) invI.table.push_back(inv[a]);
    Interp unit;
    unit.kind = Interp::Kind::ConstPoint;
    unit.cpoint = identity;
    M.interps[*M.sig.resolve("mul", {"G", "G"})] = mul;
    M.interps[*M.sig.resolve("inv", {"G"})] = invI;
    M.interps[*M.sig.resolve("1", {})] = unit;
    return M;
}

MetricStructure cyclic_group(int n) {
    std::vector<std::vector<int>> t(n, std::vector<int>(n));
    std::vector<std::string> labels;
    for (int i = 0; i < n; ++i) {
        labels.push_back(std::to_string(i));
        for (int j = 0; j < n; ++j) t[i][j] = (i + j) % n;
    }
    return cayley_group(t, labels);
}

MetricStructure discrete_wrap(MetricStructure M) {
    // rebuild the signature with unit diameters, keep operations
    Signature sig;
    for (const Sort& s : M.sig.sorts())
        sig.add_sort(Sort{s.name, Rat(1), s.kind, s.ball_index});
    for (int i = 0; i < M.sig.symbol_count(); ++i) {
        const SymbolDecl& d = M.sig.symbol(i);
        if (d.is_predicate)
            sig.add_predicate(d.name, d.arg_sorts, d.range_lo, d.range_hi, d.moduli);
        else
            sig.add_function(d.name, d.arg_sorts, d.result_sort, d.moduli);
    }
    M.sig = sig;
    for (auto& [name, c] : M.carriers) {
        if (!c.finite()) throw input_error("discrete wrap needs finite carriers");
        // keep permutation data: group operations still run through it
        c.metric = SortCarrier::MetricKind::Discrete;
        c.dist.clear();
    }
    return M;
}

std::string scalar_symbol_name(const HilbertScalar& s, Field field) {
    auto enc = [](const Rat& q) {
        std::string out;
        if (q < 0) out += "m";
        out += numerator(q < 0 ? Rat(-q) : q).str();
        if (denominator(q) != 1) out += "_" + denominator(q).str();
        return out;
    };
    if (field == Field::Real) return "lam" + enc(s.re);
    return "clam" + enc(s.re) + "i" + enc(s.im);
}

namespace {

std::vector<HilbertScalar> default_scalars(Field field) {
    std::vector<HilbertScalar> v = {{Rat(2), 0}, {Rat(3, 2), 0}, {Rat(1), 0},
                                    {Rat(1, 2), 0}, {Rat(-1), 0}};
    if (field == Field::Complex) v.push_back({Rat(0), Rat(1)});
    return v;
}

// the unique k >= 1 with k-1 <= |c| < k, via the rational |c|^2
int scalar_ball_factor(const HilbertScalar& s) {
    Rat n2 = Rat(s.re * s.re + s.im * s.im);
    int k = 1;
    while (Rat(k) * Rat(k) <= n2) ++k;
    return k;
}

} // namespace

void add_hilbert_tower(MetricStructure& M, const HilbertOptions& opts) {
    if (opts.dim < 1 || opts.max_ball < 1)
        throw input_error("hilbert tower needs dim >= 1 and at least one ball");
    auto ball = [](int n) { return "B" + std::to_string(n); };
    int N = opts.max_ball;
    for (int n = 1; n <= N; ++n) {
        M.sig.add_sort(Sort{ball(n), Rat(2 * n), SortKind::HilbertBall, n});
        SortCarrier c;
        c.kind = SortKind::HilbertBall;
        c.dim = opts.dim;
        c.radius = n;
        c.field = opts.field;
        M.carriers[ball(n)] = c;
    }
    auto put = [&](int id, Interp::Kind k) {
        Interp I;
        I.kind = k;
        M.interps[id] = I;
    };
    put(M.sig.add_function("zero", {}, ball(1)), Interp::Kind::HilbertZero);
    for (int m = 1; m <= N; ++m)
        for (int n = m + 1; n <= N; ++n)
            put(M.sig.add_function("inc_B" + std::to_string(m) + "_B" + std::to_string(n),
                                   {ball(m)}, ball(n)),
                Interp::Kind::HilbertInclude);
    for (int n = 1; 2 * n <= N; ++n) {
        put(M.sig.add_function("vadd", {ball(n), ball(n)}, ball(2 * n)),
            Interp::Kind::HilbertAdd);
        put(M.sig.add_function("vsub", {ball(n), ball(n)}, ball(2 * n)),
            Interp::Kind::HilbertSub);
    }
    const auto scalars = opts.scalars.empty() ? default_scalars(opts.field) : opts.scalars;
    for (const HilbertScalar& s : scalars) {
        if (opts.field == Field::Real && s.im != 0)
            throw input_error("complex scalar in a real tower");
        int k = scalar_ball_factor(s);
        Rat abs2 = Rat(s.re * s.re + s.im * s.im);
        Modulus mod = abs2 == 0 ? Modulus::id()
                      : (s.im == 0 && s.re != 0)
                          ? Modulus::scale(Rat(s.re < 0 ? Rat(-s.re) : s.re))
                          : Modulus::scale(Rat(k)); // rational upper bound on |c|
        std::string name = scalar_symbol_name(s, opts.field);
        for (int m = 1; k * m <= N; ++m) {
            Interp I;
            I.kind = Interp::Kind::HilbertScale;
            I.scale_re = s.re;
            I.scale_im = s.im;
            M.interps[M.sig.add_function(name, {ball(m)}, ball(k * m), {mod})] = I;
        }
    }
    for (int n = 1; n <= N; ++n) {
        Interp I;
        I.kind = Interp::Kind::Norm;
        M.interps[M.sig.add_predicate("norm", {ball(n)}, Rat(0), Rat(n))] = I;
        Rat n2(n * n);
        if (opts.field == Field::Real) {
            Interp ip;
            ip.kind = Interp::Kind::InnerRe;
            M.interps[M.sig.add_predicate("ip", {ball(n), ball(n)}, Rat(-n2), n2,
                                          {Modulus::scale(Rat(n)), Modulus::scale(Rat(n))})] =
                ip;
        } else {
            Interp re;
            re.kind = Interp::Kind::InnerRe;
            M.interps[M.sig.add_predicate("ipre", {ball(n), ball(n)}, Rat(-n2), n2,
                                          {Modulus::scale(Rat(n)), Modulus::scale(Rat(n))})] =
                re;
            Interp im;
            im.kind = Interp::Kind::InnerIm;
            M.interps[M.sig.add_predicate("ipim", {ball(n), ball(n)}, Rat(-n2), n2,
                                          {Modulus::scale(Rat(n)), Modulus::scale(Rat(n))})] =
                im;
        }
    }
}

MetricStructure hilbert_tower(const HilbertOptions& opts) {
    MetricStructure M;
    add_hilbert_tower(M, opts);
    return M;
}

// ---------------------------------------------------------------------------
// graph and tree spaces

GraphData make_graph_data(const GraphInput& in, bool require_tree) {
    GraphData g;
    std::set<std::string> nameset;
    nameset.insert(in.basepoint);
    for (const auto& e : in.edges) {
        nameset.insert(e.u);
        nameset.insert(e.v);
    }
    g.names.assign(nameset.begin(), nameset.end());
    auto idx = [&](const std::string& s) {
        return static_cast<int>(std::lower_bound(g.names.begin(), g.names.end(), s) -
                                g.names.begin());
    };
    g.basepoint = idx(in.basepoint);
    std::set<std::pair<int, int>> seen;
    for (const auto& e : in.edges) {
        if (e.len <= 0) throw input_error("edge lengths must be positive");
        int u = idx(e.u), v = idx(e.v);
        if (u == v) throw input_error("self-loop at " + e.u);
        auto key = std::minmax(u, v);
        if (!seen.insert({key.first, key.second}).second)
            throw input_error("duplicate edge " + e.u + "-" + e.v);
        g.edges.push_back({u, v, e.len});
    }
    int n = static_cast<int>(g.names.size());
    Rat inf = 1;
    for (const auto& e : g.edges) inf += e.len;
    g.dist.assign(n, std::vector<Rat>(n, inf));
    for (int i = 0; i < n; ++i) g.dist[i][i] = 0;
    for (const auto& e : g.edges) {
        g.dist[e.u][e.v] = std::min(g.dist[e.u][e.v], e.len);
        g.dist[e.v][e.u] = g.dist[e.u][e.v];
    }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Rat via = Rat(g.dist[i][k] + g.dist[k][j]);
                if (via < g.dist[i][j]) g.dist[i][j] = via;
            }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (g.dist[i][j] >= inf) throw input_error("graph is disconnected");
    g.is_tree = static_cast<int>(g.edges.size()) == n - 1;
    if (require_tree && !g.is_tree)
        throw input_error("input graph is not a tree (cycle detected)");
    return g;
}

namespace {

void add_graph_balls(MetricStructure& M, const GraphData& g) {
    int n = static_cast<int>(g.names.size());
    // vertices by distance from the basepoint, ball sorts are prefixes
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (g.dist[g.basepoint][a] != g.dist[g.basepoint][b])
            return g.dist[g.basepoint][a] < g.dist[g.basepoint][b];
        return g.names[a] < g.names[b];
    });
    Rat ecc = 0;
    for (int v = 0; v < n; ++v) ecc = std::max(ecc, g.dist[g.basepoint][v]);
    int R = 1;
    while (Rat(R) < ecc) ++R;
    auto ball = [](int r) { return "B" + std::to_string(r); };
    for (int r = 1; r <= R; ++r) {
        std::vector<int> verts;
        for (int v : order)
            if (g.dist[g.basepoint][v] <= r) verts.push_back(v);
        SortCarrier c;
        c.kind = SortKind::TreeBall;
        c.metric = SortCarrier::MetricKind::Table;
        Rat diam = 0;
        for (int a : verts)
            for (int b : verts) diam = std::max(diam, g.dist[a][b]);
        for (int v : verts) c.labels.push_back(g.names[v]);
        c.graph_vertex = verts;
        c.dist.reserve(verts.size() * verts.size());
        for (int a : verts)
            for (int b : verts) c.dist.push_back(g.dist[a][b]);
        c.index_labels();
        M.sig.add_sort(Sort{ball(r), diam > 0 ? diam : Rat(1), SortKind::TreeBall, r});
        M.carriers[ball(r)] = std::move(c);
    }
    for (int m = 1; m <= R; ++m)
        for (int r = m + 1; r <= R; ++r) {
            Interp I;
            I.kind = Interp::Kind::FuncTable;
            int sz = M.carriers[ball(m)].size();
            for (int i = 0; i < sz; ++i) I.table.push_back(i);
            M.interps[M.sig.add_function("inc_B" + std::to_string(m) + "_B" +
                                             std::to_string(r),
                                         {ball(m)}, ball(r))] = I;
        }
    Interp o;
    o.kind = Interp::Kind::ConstPoint;
    o.cpoint = 0; // the basepoint sorts first
    M.interps[M.sig.add_function("o", {}, ball(1))] = o;
}

} // namespace

MetricStructure tree_space(const GraphInput& in) {
    MetricStructure M;
    GraphData g = make_graph_data(in, true);
    add_graph_balls(M, g);
    M.graph = std::move(g);
    return M;
}

MetricStructure graph_space(const GraphInput& in) {
    MetricStructure M;
    GraphData g = make_graph_data(in, false);
    add_graph_balls(M, g);
    M.graph = std::move(g);
    return M;
}

// ---------------------------------------------------------------------------
// group actions

std::vector<int> k_chain_levels(const GroupView& g, const std::vector<int>& gens) {
    int n = g.n;
    std::vector<int> level(n, -1);
    std::set<int> cur;
    cur.insert(g.unit());
    for (int s : gens) {
        cur.insert(s);
        cur.insert(g.inv(s));
    }
    int l = 1;
    while (true) {
        for (int x : cur)
            if (level[x] < 0) level[x] = l;
        std::set<int> next = cur;
        next.insert(g.unit());
        for (int x : cur) next.insert(g.inv(x));
        for (int x : cur)
            for (int y : cur) next.insert(g.mul(x, y));
        if (next == cur) break;
        cur = std::move(next);
        ++l;
        if (l > n + 1) throw input_error("K-chain failed to stabilize");
    }
    for (int x = 0; x < n; ++x)
        if (level[x] < 0)
            throw input_error("generators do not generate the group (element " + g.label(x) +
                              " unreached)");
    return level;
}

namespace {

struct KChain {
    std::vector<int> order;    // new position -> original index
    std::vector<int> newpos;   // original index -> new position
    std::vector<int> ksize;    // carrier size of K_1..K_L (prefix lengths)
};

KChain kchain_order(const GroupView& g, const std::vector<int>& gens) {
    std::vector<int> level = k_chain_levels(g, gens);
    int n = g.n;
    KChain kc;
    kc.order.resize(n);
    std::iota(kc.order.begin(), kc.order.end(), 0);
    std::stable_sort(kc.order.begin(), kc.order.end(), [&](int a, int b) {
        if (level[a] != level[b]) return level[a] < level[b];
        return g.label(a) < g.label(b);
    });
    kc.newpos.resize(n);
    for (int i = 0; i < n; ++i) kc.newpos[kc.order[i]] = i;
    int L = *std::max_element(level.begin(), level.end());
    kc.ksize.resize(L);
    for (int l = 1; l <= L; ++l) {
        int cnt = 0;
        for (int x = 0; x < n; ++x)
            if (level[x] <= l) ++cnt;
        kc.ksize[l - 1] = cnt;
    }
    return kc;
}

// K-chain sorts with group operations; returns the chain layout
KChain add_k_sorts(MetricStructure& M, const MetricStructure& G, const std::string& sort,
                   const std::vector<int>& gens) {
    GroupView g = group_view(G, sort);
    KChain kc = kchain_order(g, gens);
    int L = static_cast<int>(kc.ksize.size());
    const SortCarrier& src = G.carrier(sort);
    auto kname = [](int l) { return "K" + std::to_string(l); };
    for (int l = 1; l <= L; ++l) {
        int sz = kc.ksize[l - 1];
        SortCarrier c;
        c.kind = SortKind::Finite;
        c.metric = SortCarrier::MetricKind::Table;
        Rat diam = 0;
        for (int i = 0; i < sz; ++i) c.labels.push_back(src.labels[kc.order[i]]);
        c.dist.reserve(static_cast<size_t>(sz) * sz);
        for (int i = 0; i < sz; ++i)
            for (int j = 0; j < sz; ++j) {
                Rat d = src.finite_dist(kc.order[i], kc.order[j]);
                diam = std::max(diam, d);
                c.dist.push_back(d);
            }
        c.index_labels();
        M.sig.add_sort(Sort{kname(l), diam > 0 ? diam : Rat(1), SortKind::Finite,
                            std::nullopt});
        M.carriers[kname(l)] = std::move(c);
    }
    for (int l = 1; l <= L; ++l) {
        int tgt = std::min(l + 1, L);
        Interp mul;
        mul.kind = Interp::Kind::FuncTable;
        int sz = kc.ksize[l - 1];
        for (int i = 0; i < sz; ++i)
            for (int j = 0; j < sz; ++j)
                mul.table.push_back(kc.newpos[g.mul(kc.order[i], kc.order[j])]);
        M.interps[M.sig.add_function("mul", {kname(l), kname(l)}, kname(tgt))] = mul;
        Interp inv;
        inv.kind = Interp::Kind::FuncTable;
        for (int i = 0; i < sz; ++i) inv.table.push_back(kc.newpos[g.inv(kc.order[i])]);
        M.interps[M.sig.add_function("inv", {kname(l)}, kname(tgt))] = inv;
    }
    for (int m = 1; m <= L; ++m)
        for (int l = m + 1; l <= L; ++l) {
            Interp I;
            I.kind = Interp::Kind::FuncTable;
            for (int i = 0; i < kc.ksize[m - 1]; ++i) I.table.push_back(i);
            M.interps[M.sig.add_function("inc_K" + std::to_string(m) + "_K" +
                                             std::to_string(l),
                                         {kname(m)}, kname(l))] = I;
        }
    Interp unit;
    unit.kind = Interp::Kind::ConstPoint;
    unit.cpoint = kc.newpos[g.unit()];
    M.interps[M.sig.add_function("1", {}, kname(1))] = unit;
    return kc;
}

Modulus discrete_arg_modulus(const SortCarrier& c) {
    // group arguments of an action: any gap below the least nonzero
    // distance pins the element, so the modulus may flatten out there
    Rat delta = 0;
    for (int i = 0; i < c.size(); ++i)
        for (int j = i + 1; j < c.size(); ++j) {
            Rat d = c.finite_dist(i, j);
            if (d > 0 && (delta == 0 || d < delta)) delta = d;
        }
    if (delta == 0) return Modulus::id();
    Rat h = Rat(delta / 2);
    return Modulus::breakpoints({{h, h}, {delta, h}});
}

} // namespace

MetricStructure attach_hilbert_action(const MetricStructure& G, const std::string& sort,
                                      const ActionAttachment& a) {
    MetricStructure M;
    KChain kc = add_k_sorts(M, G, sort, a.gens);
    add_hilbert_tower(M, a.hilbert);
    int L = static_cast<int>(kc.ksize.size());
    int n = G.carrier(sort).size();
    if (static_cast<int>(a.mats.size()) != n)
        throw input_error("need one matrix per group element");
    // reorder matrices into the K-chain carrier order
    Interp act;
    act.kind = Interp::Kind::MatrixAction;
    act.mats.resize(n);
    act.trans.resize(n);
    for (int i = 0; i < n; ++i) {
        act.mats[i] = a.mats[kc.order[i]];
        if (!a.trans.empty()) act.trans[i] = a.trans[kc.order[i]];
    }
    for (int l = 1; l <= L; ++l)
        for (int m = 1; m <= a.hilbert.max_ball; ++m) {
            if (!a.nu.has(l, m)) continue;
            int t = a.nu(l, m);
            if (t > a.hilbert.max_ball)
                throw input_error("nu(" + std::to_string(l) + "," + std::to_string(m) +
                                  ") exceeds the tower");
            std::string kl = "K" + std::to_string(l);
            Modulus gm = discrete_arg_modulus(M.carrier(kl));
            M.interps[M.sig.add_function("act", {kl, "B" + std::to_string(m)},
                                         "B" + std::to_string(t),
                                         {gm, Modulus::id()})] = act;
        }
    return M;
}

MetricStructure attach_tree_action(const MetricStructure& G, const std::string& sort,
                                   const TreeActionAttachment& a) {
    MetricStructure M;
    KChain kc = add_k_sorts(M, G, sort, a.gens);
    GraphData g = make_graph_data(a.tree, true);
    add_graph_balls(M, g);
    int L = static_cast<int>(kc.ksize.size());
    int n = G.carrier(sort).size();
    if (static_cast<int>(a.vertex_maps.size()) != n)
        throw input_error("need one vertex map per group element");
    int R = 0;
    for (const Sort& s : M.sig.sorts())
        if (s.kind == SortKind::TreeBall) R = std::max(R, *s.ball_index);
    for (int l = 1; l <= L; ++l)
        for (int m = 1; m <= R; ++m) {
            if (!a.nu.has(l, m)) continue;
            int t = a.nu(l, m);
            if (t > R)
                throw input_error("nu(" + std::to_string(l) + "," + std::to_string(m) +
                                  ") exceeds the ball tower");
            std::string kl = "K" + std::to_string(l);
            std::string bm = "B" + std::to_string(m), bt = "B" + std::to_string(t);
            const SortCarrier& cm = M.carrier(bm);
            const SortCarrier& ct = M.carrier(bt);
            Interp act;
            act.kind = Interp::Kind::FuncTable;
            for (int i = 0; i < kc.ksize[l - 1]; ++i)
                for (int v = 0; v < cm.size(); ++v) {
                    int img = a.vertex_maps[kc.order[i]][cm.graph_vertex[v]];
                    auto it = ct.label_index.find(g.names[img]);
                    if (it == ct.label_index.end())
                        throw input_error("action leaves B" + std::to_string(t) + ": " +
                                          g.names[img]);
                    act.table.push_back(it->second);
                }
            Modulus gm = discrete_arg_modulus(M.carrier(kl));
            M.interps[M.sig.add_function("act", {kl, bm}, bt, {gm, Modulus::id()})] = act;
        }
    M.graph = std::move(g);
    return M;
}

MetricStructure zm_rotation_action(int m, int max_ball) {
    if (m < 1) throw input_error("rotation order must be positive");
    MetricStructure zm = cyclic_group(m);
    ActionAttachment a;
    a.gens = {m > 1 ? 1 : 0};
    a.mats.resize(m);
    for (int j = 0; j < m; ++j) {
        double th = 2.0 * M_PI * j / m;
        a.mats[j] = {std::cos(th), -std::sin(th), std::sin(th), std::cos(th)};
    }
    a.hilbert.field = Field::Real;
    a.hilbert.dim = 2;
    a.hilbert.max_ball = max_ball;
    GroupView g = group_view(zm);
    int L = 0;
    for (int lv : k_chain_levels(g, a.gens)) L = std::max(L, lv);
    for (int l = 1; l <= L; ++l)
        for (int b = 1; b <= max_ball; ++b) a.nu.table[{l, b}] = b;
    return attach_hilbert_action(zm, "G", a);
}

} // namespace contilog
