#include "contilog/catgrp.hpp"

#include "contilog/axioms.hpp"
#include "contilog/parser.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

namespace contilog {

namespace {

bool preserves_everything(const MetricStructure& M, const AutMap& a, double tol) {
    for (const auto& [sname, c] : M.carriers) {
        if (!c.finite()) return false;
        const std::vector<int>& p = a.perm.at(sname);
        int n = c.size();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (c.finite_dist(i, j) != c.finite_dist(p[i], p[j])) return false;
    }
    for (const auto& [sym, interp] : M.interps) {
        (void)interp;
        const SymbolDecl& d = M.sig.symbol(sym);
        std::vector<int> sizes;
        size_t prod = 1;
        for (const auto& s : d.arg_sorts) {
            sizes.push_back(M.carrier(s).size());
            prod *= sizes.back();
        }
        std::vector<Point> args(d.arg_sorts.size()), mapped(d.arg_sorts.size());
        for (size_t flat = 0; flat < prod; ++flat) {
            size_t rest = flat;
            for (size_t j = d.arg_sorts.size(); j-- > 0;) {
                int idx = static_cast<int>(rest % sizes[j]);
                rest /= sizes[j];
                args[j] = Point(idx);
                mapped[j] = Point(a.perm.at(d.arg_sorts[j])[idx]);
            }
            if (d.is_predicate) {
                Scalar v1 = M.apply_predicate(sym, args);
                Scalar v2 = M.apply_predicate(sym, mapped);
                if (std::fabs(v1.dbl() - v2.dbl()) > tol) return false;
            } else {
                int r1 = pt_index(M.apply_function(sym, args));
                int r2 = pt_index(M.apply_function(sym, mapped));
                if (a.perm.at(d.result_sort)[r1] != r2) return false;
            }
        }
    }
    return true;
}

int element_order(const GroupView& g, int x) {
    int e = g.unit(), y = x, k = 1;
    while (y != e) {
        y = g.mul(y, x);
        ++k;
        if (k > g.n) throw input_error("order computation ran away");
    }
    return k;
}

std::vector<int> greedy_generators(const GroupView& g) {
    std::set<int> closure = {g.unit()};
    std::vector<int> gens;
    auto close = [&]() {
        bool grew = true;
        while (grew) {
            grew = false;
            std::vector<int> cur(closure.begin(), closure.end());
            for (int a : cur)
                for (int b : cur) {
                    if (closure.insert(g.mul(a, b)).second) grew = true;
                }
            for (int a : cur)
                if (closure.insert(g.inv(a)).second) grew = true;
        }
    };
    for (int x = 0; x < g.n && static_cast<int>(closure.size()) < g.n; ++x) {
        if (closure.count(x)) continue;
        gens.push_back(x);
        closure.insert(x);
        close();
    }
    return gens;
}

// profile used to prune generator images: order, distance to 1, sorted
// distance row
struct ElemProfile {
    int order;
    Rat to_unit;
    std::vector<Rat> row;
    bool operator==(const ElemProfile& o) const {
        return order == o.order && to_unit == o.to_unit && row == o.row;
    }
};

ElemProfile profile_of(const GroupView& g, int x) {
    ElemProfile p;
    p.order = element_order(g, x);
    p.to_unit = g.dist(x, g.unit());
    for (int y = 0; y < g.n; ++y) p.row.push_back(g.dist(x, y));
    std::sort(p.row.begin(), p.row.end());
    return p;
}

// extend generator images to a full map via the Cayley graph; empty result
// on conflict
std::vector<int> extend_hom(const GroupView& g, const std::vector<int>& gens,
                            const std::vector<int>& images) {
    std::vector<int> img(g.n, -1);
    img[g.unit()] = g.unit();
    std::vector<int> queue = {g.unit()};
    std::vector<std::pair<int, int>> steps;
    for (size_t i = 0; i < gens.size(); ++i) {
        steps.emplace_back(gens[i], images[i]);
        steps.emplace_back(g.inv(gens[i]), g.inv(images[i]));
    }
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        int a = queue[qi];
        for (const auto& [s, si] : steps) {
            int b = g.mul(a, s);
            int bi = g.mul(img[a], si);
            if (img[b] < 0) {
                img[b] = bi;
                queue.push_back(b);
            } else if (img[b] != bi) {
                return {};
            }
        }
    }
    for (int x = 0; x < g.n; ++x)
        if (img[x] < 0) return {};
    std::vector<bool> hit(g.n, false);
    for (int x = 0; x < g.n; ++x) {
        if (hit[img[x]]) return {};
        hit[img[x]] = true;
    }
    return img;
}

std::vector<AutMap> group_automorphisms(const MetricStructure& M, const std::string& sort,
                                        double tol) {
    GroupView g = group_view(M, sort);
    std::vector<int> gens = greedy_generators(g);
    std::vector<ElemProfile> profiles;
    for (int x = 0; x < g.n; ++x) profiles.push_back(profile_of(g, x));
    std::vector<std::vector<int>> candidates;
    for (int s : gens) {
        std::vector<int> cand;
        for (int t = 0; t < g.n; ++t)
            if (profiles[t] == profiles[s]) cand.push_back(t);
        candidates.push_back(cand);
    }
    std::vector<AutMap> out;
    std::vector<int> pick(gens.size(), 0);
    std::vector<int> images(gens.size());
    std::function<void(size_t)> rec = [&](size_t i) {
        if (i == gens.size()) {
            std::vector<int> img = extend_hom(g, gens, images);
            if (img.empty()) return;
            AutMap a;
            a.perm[sort] = img;
            if (preserves_everything(M, a, tol)) out.push_back(std::move(a));
            return;
        }
        for (int t : candidates[i]) {
            images[i] = t;
            rec(i + 1);
        }
    };
    if (gens.empty()) {
        // trivial group
        AutMap a;
        a.perm[sort] = {g.unit()};
        out.push_back(a);
        return out;
    }
    rec(0);
    return out;
}

std::vector<AutMap> generic_automorphisms(const MetricStructure& M, double tol) {
    struct Cell {
        std::string sort;
        int index;
    };
    std::vector<Cell> cells;
    for (const Sort& s : M.sig.sorts()) {
        const SortCarrier& c = M.carrier(s.name);
        if (!c.finite()) throw input_error("automorphisms: carrier is not finite");
        for (int i = 0; i < c.size(); ++i) cells.push_back({s.name, i});
    }
    // unary predicate profile and constant pinning
    std::map<std::string, std::vector<std::vector<double>>> uprof;
    for (const Sort& s : M.sig.sorts())
        uprof[s.name].assign(M.carrier(s.name).size(), {});
    for (const auto& [sym, interp] : M.interps) {
        (void)interp;
        const SymbolDecl& d = M.sig.symbol(sym);
        if (d.is_predicate && d.arg_sorts.size() == 1) {
            for (int i = 0; i < M.carrier(d.arg_sorts[0]).size(); ++i)
                uprof[d.arg_sorts[0]][i].push_back(
                    M.apply_predicate(sym, {Point(i)}).dbl());
        }
    }
    std::map<std::string, std::set<int>> pinned;
    for (const auto& [sym, interp] : M.interps) {
        const SymbolDecl& d = M.sig.symbol(sym);
        if (!d.is_predicate && d.arg_sorts.empty())
            pinned[d.result_sort].insert(pt_index(M.apply_function(sym, {})));
    }

    std::map<std::string, std::vector<int>> img;
    std::map<std::string, std::vector<bool>> used;
    for (const Sort& s : M.sig.sorts()) {
        img[s.name].assign(M.carrier(s.name).size(), -1);
        used[s.name].assign(M.carrier(s.name).size(), false);
    }
    std::vector<AutMap> out;
    std::function<void(size_t)> rec = [&](size_t ci) {
        if (ci == cells.size()) {
            AutMap a;
            a.perm = img;
            if (preserves_everything(M, a, tol)) out.push_back(a);
            return;
        }
        const Cell& cell = cells[ci];
        const SortCarrier& c = M.carrier(cell.sort);
        bool pin = pinned[cell.sort].count(cell.index) > 0;
        for (int j = 0; j < c.size(); ++j) {
            if (used[cell.sort][j]) continue;
            if (pin && j != cell.index) continue;
            bool ok = true;
            for (size_t k = 0; k < uprof[cell.sort][cell.index].size(); ++k)
                if (std::fabs(uprof[cell.sort][cell.index][k] - uprof[cell.sort][j][k]) > tol)
                    ok = false;
            if (!ok) continue;
            for (int prev = 0; prev < cell.index && ok; ++prev)
                if (c.finite_dist(cell.index, prev) != c.finite_dist(j, img[cell.sort][prev]))
                    ok = false;
            if (!ok) continue;
            img[cell.sort][cell.index] = j;
            used[cell.sort][j] = true;
            rec(ci + 1);
            img[cell.sort][cell.index] = -1;
            used[cell.sort][j] = false;
        }
    };
    rec(0);
    return out;
}

} // namespace

AutGroup automorphisms(const MetricStructure& M, long cap, double tol) {
    long prod = 1;
    for (const auto& [name, c] : M.carriers) {
        if (!c.finite()) throw input_error("automorphisms needs finite carriers");
        prod *= std::max(1, c.size());
        if (prod > cap) throw input_error("automorphisms: carrier product exceeds the cap");
    }
    std::vector<AutMap> members;
    bool single_group = false;
    std::string gsort;
    if (M.carriers.size() == 1) {
        gsort = M.carriers.begin()->first;
        try {
            group_view(M, gsort);
            single_group = true;
        } catch (const input_error&) {
        }
    }
    members = single_group ? group_automorphisms(M, gsort, tol)
                           : generic_automorphisms(M, tol);
    std::sort(members.begin(), members.end(), [](const AutMap& a, const AutMap& b) {
        return a.perm < b.perm;
    });
    AutGroup out;
    out.members = std::move(members);
    // a small generating subset, greedily
    std::set<std::map<std::string, std::vector<int>>> closure;
    auto compose = [](const AutMap& a, const AutMap& b) {
        AutMap c;
        for (const auto& [s, p] : a.perm) {
            std::vector<int> q(p.size());
            for (size_t i = 0; i < p.size(); ++i) q[i] = b.perm.at(s)[p[i]];
            c.perm[s] = q;
        }
        return c;
    };
    AutMap idm;
    for (const auto& [s, p] : out.members.empty() ? std::map<std::string, std::vector<int>>{}
                                                  : out.members[0].perm) {
        std::vector<int> q(p.size());
        std::iota(q.begin(), q.end(), 0);
        idm.perm[s] = q;
    }
    closure.insert(idm.perm);
    for (size_t i = 0; i < out.members.size(); ++i) {
        if (closure.count(out.members[i].perm)) continue;
        out.generators.push_back(static_cast<int>(i));
        bool grew = true;
        closure.insert(out.members[i].perm);
        while (grew) {
            grew = false;
            std::vector<std::map<std::string, std::vector<int>>> cur(closure.begin(),
                                                                     closure.end());
            for (const auto& pa : cur)
                for (const auto& pb : cur) {
                    AutMap a;
                    a.perm = pa;
                    AutMap b;
                    b.perm = pb;
                    AutMap c = compose(a, b);
                    if (closure.insert(c.perm).second) grew = true;
                }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

OligoResult approx_oligo(const MetricStructure& M, int n, double eps, const AutGroup& aut,
                         const std::string& sort) {
    const SortCarrier& c = M.carrier(sort);
    int sz = c.size();
    std::vector<std::vector<int>> tuples;
    std::vector<int> cur(n, 0);
    while (true) {
        tuples.push_back(cur);
        int j = n;
        while (j > 0) {
            --j;
            if (++cur[j] < sz) break;
            cur[j] = 0;
            if (j == 0) goto enum_done;
        }
    }
enum_done:;
    auto orbit_dist = [&](const std::vector<int>& f, const std::vector<int>& t, int& aut_idx) {
        double best = std::numeric_limits<double>::infinity();
        for (size_t ai = 0; ai < aut.members.size(); ++ai) {
            const std::vector<int>& p = aut.members[ai].perm.at(sort);
            Rat worst = 0;
            for (int i = 0; i < n; ++i)
                worst = std::max(worst, c.finite_dist(p[f[i]], t[i]));
            double w = rat_to_double(worst);
            if (w < best) {
                best = w;
                aut_idx = static_cast<int>(ai);
            }
        }
        return best;
    };
    OligoResult out;
    for (const auto& t : tuples) {
        bool covered = false;
        for (const auto& f : out.F) {
            int ai = 0;
            if (orbit_dist(f, t, ai) <= eps + 1e-12) {
                covered = true;
                break;
            }
        }
        if (!covered) out.F.push_back(t);
    }
    for (const auto& t : tuples) {
        OligoResult::Entry e;
        e.tuple = t;
        double best = std::numeric_limits<double>::infinity();
        for (size_t fi = 0; fi < out.F.size(); ++fi) {
            int ai = 0;
            double d = orbit_dist(out.F[fi], t, ai);
            if (d < best) {
                best = d;
                e.f_index = static_cast<int>(fi);
                e.aut_index = ai;
            }
        }
        e.distance = best;
        out.certificate.push_back(e);
    }
    return out;
}

// ---------------------------------------------------------------------------
// covering battery

namespace {

using Bits = std::vector<char>;

Bits set_mul(const GroupView& g, const Bits& A, const Bits& B) {
    Bits out(g.n, 0);
    for (int a = 0; a < g.n; ++a)
        if (A[a])
            for (int b = 0; b < g.n; ++b)
                if (B[b]) out[g.mul(a, b)] = 1;
    return out;
}

int popcount(const Bits& b) {
    int c = 0;
    for (char x : b) c += x;
    return c;
}

bool full(const Bits& b) { return popcount(b) == static_cast<int>(b.size()); }

// greedy set cover where candidate f contributes translate(f)
CoverResult greedy_cover(const GroupView& g, const std::function<Bits(int)>& translate,
                         int cap_F) {
    CoverResult res;
    Bits covered(g.n, 0);
    std::vector<Bits> tr;
    for (int f = 0; f < g.n; ++f) tr.push_back(translate(f));
    while (!full(covered) && static_cast<int>(res.F.size()) < cap_F) {
        int best = -1, best_gain = 0;
        for (int f = 0; f < g.n; ++f) {
            int gain = 0;
            for (int x = 0; x < g.n; ++x)
                if (tr[f][x] && !covered[x]) ++gain;
            if (gain > best_gain) {
                best_gain = gain;
                best = f;
            }
        }
        if (best < 0) break;
        res.F.push_back(g.label(best));
        for (int x = 0; x < g.n; ++x)
            if (tr[best][x]) covered[x] = 1;
    }
    res.success = full(covered);
    res.F_size = static_cast<int>(res.F.size());
    return res;
}

} // namespace

BoundednessReport boundedness_battery(const MetricStructure& M, const Rat& r, int k,
                                      const std::string& sort, int cap_F) {
    GroupView g = group_view(M, sort);
    if (cap_F <= 0) cap_F = g.n;
    BoundednessReport rep;
    rep.r = r;
    rep.k = k;
    Bits V(g.n, 0);
    for (int x = 0; x < g.n; ++x)
        if (g.dist(x, g.unit()) <= r) V[x] = 1;
    rep.V_size = popcount(V);

    std::vector<Bits> Vl = {Bits(g.n, 0)}; // Vl[l] = V^l
    Vl[0][g.unit()] = 1;
    for (int l = 1; l <= k; ++l) Vl.push_back(set_mul(g, Vl[l - 1], V));

    auto singleton = [&](int f) {
        Bits b(g.n, 0);
        b[f] = 1;
        return b;
    };

    for (int l = 1; l <= k && !rep.fvk.success; ++l) {
        CoverResult c = greedy_cover(
            g, [&](int f) { return set_mul(g, singleton(f), Vl[l]); }, cap_F);
        c.length_used = l;
        rep.fvk = c;
    }
    for (int l = 1; l <= k && !rep.vkfvk.success; ++l) {
        CoverResult c = greedy_cover(
            g,
            [&](int f) { return set_mul(g, set_mul(g, Vl[l], singleton(f)), Vl[l]); },
            cap_F);
        c.length_used = l;
        rep.vkfvk = c;
    }
    {
        CoverResult c = greedy_cover(
            g, [&](int f) { return set_mul(g, set_mul(g, V, singleton(f)), V); }, cap_F);
        c.length_used = 1;
        rep.vfv = c;
    }
    // (FV)^l: greedy on the whole F set, recomputing coverage per candidate
    for (int l = 1; l <= k && !rep.fvpk.success; ++l) {
        CoverResult res;
        res.length_used = l;
        Bits Fset(g.n, 0);
        auto coverage = [&](const Bits& F) {
            Bits FV = set_mul(g, F, V);
            Bits acc = FV;
            for (int i = 1; i < l; ++i) acc = set_mul(g, acc, FV);
            return acc;
        };
        while (static_cast<int>(res.F.size()) < cap_F) {
            Bits cur = coverage(Fset);
            if (full(cur)) break;
            int best = -1, best_gain = -1;
            for (int f = 0; f < g.n; ++f) {
                if (Fset[f]) continue;
                Bits trial = Fset;
                trial[f] = 1;
                int gain = popcount(coverage(trial));
                if (gain > best_gain) {
                    best_gain = gain;
                    best = f;
                }
            }
            if (best < 0) break;
            Fset[best] = 1;
            res.F.push_back(g.label(best));
        }
        res.success = full(coverage(Fset));
        res.F_size = static_cast<int>(res.F.size());
        rep.fvpk = res;
    }
    return rep;
}

CayleyBoundResult cayley_bound(const MetricStructure& M, const std::vector<std::string>& U,
                               int cap_n, const std::string& sort) {
    GroupView g = group_view(M, sort);
    Bits gen(g.n, 0);
    gen[g.unit()] = 1;
    for (const auto& lbl : U) {
        int x = M.point(sort, lbl);
        gen[x] = 1;
        gen[g.inv(x)] = 1;
    }
    CayleyBoundResult res;
    Bits ball = gen;
    for (int n = 1; n <= cap_n; ++n) {
        if (n > 1) ball = set_mul(g, ball, gen);
        if (full(ball)) {
            res.generates = true;
            res.n = n;
            return res;
        }
        Bits next = set_mul(g, ball, gen);
        if (next == ball) break; // stabilized on a proper subgroup
    }
    for (int x = 0; x < g.n; ++x)
        if (ball[x]) res.reached.push_back(g.label(x));
    return res;
}

ChainReport chain_validate(const MetricStructure& M,
                           const std::vector<std::vector<std::string>>& sets,
                           const std::string& sort) {
    GroupView g = group_view(M, sort);
    ChainReport rep;
    std::vector<Bits> X;
    for (const auto& lbls : sets) {
        Bits b(g.n, 0);
        for (const auto& l : lbls) b[M.point(sort, l)] = 1;
        X.push_back(b);
    }
    for (size_t i = 0; i + 1 < X.size(); ++i) {
        bool strict = false;
        for (int x = 0; x < g.n; ++x) {
            if (X[i][x] && !X[i + 1][x]) {
                rep.ok = false;
                rep.violations.push_back("X" + std::to_string(i + 1) + " is not a subset of X" +
                                         std::to_string(i + 2) + " (element " + g.label(x) +
                                         ")");
            }
            if (!X[i][x] && X[i + 1][x]) strict = true;
        }
        if (!strict) {
            rep.ok = false;
            rep.violations.push_back("X" + std::to_string(i + 1) + " to X" +
                                     std::to_string(i + 2) + " is not strictly increasing");
        }
        if (!X[i + 1][g.unit()]) {
            rep.ok = false;
            rep.violations.push_back("1 missing from X" + std::to_string(i + 2));
        }
        for (int x = 0; x < g.n; ++x)
            if (X[i][x] && !X[i + 1][g.inv(x)]) {
                rep.ok = false;
                rep.violations.push_back("X" + std::to_string(i + 1) + "^-1 escapes X" +
                                         std::to_string(i + 2) + " (element " + g.label(x) +
                                         ")");
            }
        for (int x = 0; x < g.n; ++x)
            for (int y = 0; y < g.n; ++y)
                if (X[i][x] && X[i][y] && !X[i + 1][g.mul(x, y)]) {
                    rep.ok = false;
                    rep.violations.push_back("X" + std::to_string(i + 1) + "*X" +
                                             std::to_string(i + 1) + " escapes X" +
                                             std::to_string(i + 2) + " (witness " +
                                             g.label(x) + "*" + g.label(y) + ")");
                }
    }
    for (size_t i = 0; i < X.size(); ++i)
        if (full(X[i])) {
            rep.covering_level = static_cast<int>(i) + 1;
            break;
        }
    return rep;
}

// ---------------------------------------------------------------------------
// section-3 constructions

GRhoResult g_rho(const MetricStructure& M, const Rat& rho, const std::string& sort) {
    GroupView g = group_view(M, sort);
    GRhoResult res;
    res.rho = rho;
    Bits B(g.n, 0);
    for (int x = 0; x < g.n; ++x)
        if (g.dist(x, g.unit()) <= rho) B[x] = 1;
    for (int x = 0; x < g.n; ++x)
        if (B[x]) res.ball.push_back(x);
    Bits power = B;
    int n = 1;
    while (true) {
        Bits next = set_mul(g, power, B);
        if (next == power) break;
        power = next;
        ++n;
    }
    res.exponent = n;
    for (int x = 0; x < g.n; ++x)
        if (power[x]) res.subgroup.push_back(x);
    std::vector<int> coset_of(g.n, -1);
    for (int x = 0; x < g.n; ++x) {
        if (coset_of[x] >= 0) continue;
        std::vector<int> coset;
        for (int h : res.subgroup) coset.push_back(g.mul(x, h));
        std::sort(coset.begin(), coset.end());
        int id = static_cast<int>(res.cosets.size());
        for (int y : coset) coset_of[y] = id;
        res.cosets.push_back(std::move(coset));
    }
    return res;
}

WitnessedValue definability_defect(const MetricStructure& M, const Rat& rho, int n,
                                   const Rat& eps, const EvalOptions& opts,
                                   const std::string& sort) {
    GRhoResult gr = g_rho(M, rho, sort);
    const SortCarrier& c = M.carrier(sort);
    std::vector<Rat> P(c.size());
    Rat pmax = 0;
    for (int x = 0; x < c.size(); ++x) {
        Rat best = -1;
        for (int h : gr.subgroup) {
            Rat d = c.finite_dist(x, h);
            if (best < 0 || d < best) best = d;
        }
        P[x] = best;
        pmax = std::max(pmax, best);
    }
    MetricStructure E = with_predicate(M, "Prho", {sort}, Rat(0),
                                       std::max(pmax, Rat(1)), std::move(P));
    std::string text = "sup x:" + sort + ". ";
    for (int i = 1; i <= n; ++i) text += "inf y" + std::to_string(i) + ":" + sort + ". ";
    std::vector<std::string> parts;
    std::vector<std::string> ys;
    for (int i = 1; i <= n; ++i) {
        ys.push_back("y" + std::to_string(i));
        parts.push_back("sub(d(y" + std::to_string(i) + ",1)," + rat_to_string(rho) + ")");
    }
    std::string prod = ys[0];
    for (size_t i = 1; i < ys.size(); ++i) prod = "mul(" + prod + "," + ys[i] + ")";
    parts.push_back("sub(absdiff(Prho(x),d(x," + prod + "))," + rat_to_string(eps) + ")");
    std::string folded = parts.back();
    for (size_t i = parts.size() - 1; i-- > 0;) folded = "max(" + parts[i] + "," + folded + ")";
    Formula f = parse_formula(text + folded, E.sig, std::max(Rat(1), rho));
    return evaluate_witness(E, f, {}, opts);
}

int quotient_orbits(const MetricStructure& M, const GRhoResult& grho, const AutGroup& aut,
                    const std::string& sort) {
    int n = M.carrier(sort).size();
    std::vector<int> coset_of(n, -1);
    for (size_t ci = 0; ci < grho.cosets.size(); ++ci)
        for (int x : grho.cosets[ci]) coset_of[x] = static_cast<int>(ci);
    int k = static_cast<int>(grho.cosets.size());
    std::vector<int> parent(k);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    for (const AutMap& a : aut.members) {
        const std::vector<int>& p = a.perm.at(sort);
        for (int ci = 0; ci < k; ++ci) {
            int image = coset_of[p[grho.cosets[ci][0]]];
            parent[find(ci)] = find(image);
        }
    }
    std::set<int> roots;
    for (int ci = 0; ci < k; ++ci) roots.insert(find(ci));
    return static_cast<int>(roots.size());
}

NearHomogReport near_homog_defect(const MetricStructure& M, int n, const TypeFamily& family,
                                  double eps, const AutGroup& aut, const EvalOptions& opts) {
    if (static_cast<int>(family.vars.size()) != n)
        throw input_error("near_homog_defect: family arity mismatch");
    const std::string& sort = family.vars[0].second;
    const SortCarrier& c = M.carrier(sort);
    // enumerate tuples and group them into type classes
    std::vector<std::vector<int>> tuples;
    {
        std::vector<int> cur(n, 0);
        while (true) {
            tuples.push_back(cur);
            int j = n;
            while (j > 0) {
                --j;
                if (++cur[j] < c.size()) break;
                cur[j] = 0;
                if (j == 0) goto tuples_done;
            }
        }
    }
tuples_done:;
    std::vector<TypePoint> tps;
    tps.reserve(tuples.size());
    for (const auto& t : tuples) tps.push_back(tp(M, t, family, opts));
    std::vector<int> class_of(tuples.size(), -1);
    std::vector<int> class_rep;
    for (size_t i = 0; i < tuples.size(); ++i) {
        for (size_t r = 0; r < class_rep.size(); ++r) {
            bool same = true;
            for (size_t v = 0; v < tps[i].values.size(); ++v) {
                const Scalar &x = tps[i].values[v], &y = tps[class_rep[r]].values[v];
                if (x.exact() && y.exact() ? !(x == y)
                                           : std::fabs(x.dbl() - y.dbl()) > opts.tol) {
                    same = false;
                    break;
                }
            }
            if (same) {
                class_of[i] = static_cast<int>(r);
                break;
            }
        }
        if (class_of[i] < 0) {
            class_of[i] = static_cast<int>(class_rep.size());
            class_rep.push_back(static_cast<int>(i));
        }
    }
    // realized type distance between classes
    size_t K = class_rep.size();
    std::vector<std::vector<double>> cls_dist(K, std::vector<double>(K, 0));
    for (size_t a = 0; a < K; ++a)
        for (size_t b = a; b < K; ++b) {
            double best = std::numeric_limits<double>::infinity();
            for (size_t i = 0; i < tuples.size(); ++i) {
                if (class_of[i] != static_cast<int>(a)) continue;
                for (size_t j = 0; j < tuples.size(); ++j) {
                    if (class_of[j] != static_cast<int>(b)) continue;
                    Rat worst = 0;
                    for (int v = 0; v < n; ++v)
                        worst = std::max(worst, c.finite_dist(tuples[i][v], tuples[j][v]));
                    best = std::min(best, rat_to_double(worst));
                }
            }
            cls_dist[a][b] = cls_dist[b][a] = best;
        }

    NearHomogReport rep;
    rep.defect = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < tuples.size(); ++i)
        for (size_t j = 0; j < tuples.size(); ++j) {
            double lhs = std::numeric_limits<double>::infinity();
            for (const AutMap& al : aut.members) {
                const std::vector<int>& p = al.perm.at(sort);
                Rat worst = 0;
                for (int v = 0; v < n; ++v)
                    worst = std::max(worst, c.finite_dist(p[tuples[j][v]], tuples[i][v]));
                lhs = std::min(lhs, rat_to_double(worst));
            }
            double val = lhs - cls_dist[class_of[i]][class_of[j]] - eps;
            if (val > rep.defect) {
                rep.defect = val;
                rep.witness_a = tuples[i];
                rep.witness_c = tuples[j];
            }
        }
    return rep;
}

} // namespace contilog
