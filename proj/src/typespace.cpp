#include "contilog/typespace.hpp"

#include "contilog/enumerate.hpp"

#include <algorithm>
#include <cmath>

namespace contilog {

TypeFamily TypeFamily::make(const Signature& sig, const std::vector<std::string>& sorts,
                            int depth, size_t cap) {
    TypeFamily fam;
    for (size_t i = 0; i < sorts.size(); ++i)
        fam.vars.emplace_back("x" + std::to_string(i + 1), sorts[i]);
    EnumOptions eo;
    eo.max_depth = depth;
    eo.total_cap = cap;
    fam.formulas = enum_formulas(sig, fam.vars, eo);
    return fam;
}

namespace {

Assignment bind_tuple(const TypeFamily& family, const std::vector<int>& tuple) {
    Assignment a;
    for (size_t i = 0; i < family.vars.size(); ++i)
        a.set(family.vars[i].first, family.vars[i].second, Point(tuple[i]));
    return a;
}

bool values_match(const std::vector<Scalar>& a, const std::vector<Scalar>& b, double tol) {
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].exact() && b[i].exact()) {
            if (!(a[i] == b[i])) return false;
        } else if (std::fabs(a[i].dbl() - b[i].dbl()) > tol) {
            return false;
        }
    }
    return true;
}

std::vector<std::vector<int>> all_tuples(const MetricStructure& M, const TypeFamily& family) {
    std::vector<int> sizes;
    for (const auto& [v, s] : family.vars) {
        const SortCarrier& c = M.carrier(s);
        if (!c.finite()) throw input_error("type space needs finite sorts");
        sizes.push_back(c.size());
    }
    std::vector<std::vector<int>> out;
    std::vector<int> cur(sizes.size(), 0);
    while (true) {
        out.push_back(cur);
        size_t j = cur.size();
        while (j > 0) {
            --j;
            if (++cur[j] < sizes[j]) break;
            cur[j] = 0;
            if (j == 0) return out;
        }
    }
}

Scalar tuple_distance(const MetricStructure& M, const TypeFamily& family,
                      const std::vector<int>& a, const std::vector<int>& b) {
    Scalar best(Rat(0));
    for (size_t i = 0; i < a.size(); ++i)
        best = Scalar::max(best,
                           M.metric(family.vars[i].second, Point(a[i]), Point(b[i])));
    return best;
}

} // namespace

TypePoint tp(const MetricStructure& M, const std::vector<int>& tuple, const TypeFamily& family,
             const EvalOptions& opts) {
    if (tuple.size() != family.vars.size())
        throw input_error("tp: tuple arity does not match the family");
    TypePoint p;
    p.arity = static_cast<int>(tuple.size());
    p.realizer = tuple;
    Assignment a = bind_tuple(family, tuple);
    for (const Formula& f : family.formulas) p.values.push_back(evaluate(M, f, a, opts).hi);
    return p;
}

Scalar type_distance(const MetricStructure& M, const TypePoint& p, const TypePoint& q,
                     const TypeFamily& family, const EvalOptions& opts) {
    std::vector<std::vector<int>> tuples = all_tuples(M, family);
    std::vector<std::vector<int>> rp, rq;
    for (const auto& t : tuples) {
        TypePoint tt = tp(M, t, family, opts);
        if (values_match(tt.values, p.values, opts.tol)) rp.push_back(t);
        if (values_match(tt.values, q.values, opts.tol)) rq.push_back(t);
    }
    if (rp.empty() || rq.empty()) throw input_error("type_distance: unrealized type");
    std::optional<Scalar> best;
    for (const auto& a : rp)
        for (const auto& b : rq) {
            Scalar d = tuple_distance(M, family, a, b);
            if (!best || d < *best) best = d;
        }
    return *best;
}

ValueBounds formula_pseudometric(const std::vector<const MetricStructure*>& structures,
                                 const Formula& phi, const Formula& psi,
                                 const EvalOptions& opts) {
    auto fv1 = free_vars(phi), fv2 = free_vars(psi);
    std::map<std::string, std::string> s1(fv1.begin(), fv1.end()),
        s2(fv2.begin(), fv2.end());
    for (const auto& [v, s] : s2) {
        auto it = s1.find(v);
        if (it != s1.end() && it->second != s)
            throw input_error("formula_pseudometric: sort mismatch on " + v);
        s1[v] = s;
    }
    Formula diff = fabsdiff(phi, psi);
    // close off by quantifying over the union of the free variables
    std::vector<std::pair<std::string, std::string>> vars(s1.begin(), s1.end());
    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
        diff = fsup(it->first, it->second, diff);
    diff.cap = phi.cap;
    std::optional<ValueBounds> best;
    for (const MetricStructure* M : structures) {
        Formula f = diff;
        resolve_formula(f, M->sig);
        ValueBounds v = evaluate(*M, f, {}, opts);
        if (!best) best = v;
        else
            best = ValueBounds{Scalar::max(best->lo, v.lo), Scalar::max(best->hi, v.hi),
                               best->certified && v.certified};
    }
    if (!best) throw input_error("formula_pseudometric needs at least one structure");
    return *best;
}

std::vector<TypePoint> realized_types(const MetricStructure& M, const TypeFamily& family,
                                      const EvalOptions& opts) {
    std::vector<TypePoint> classes;
    for (const auto& t : all_tuples(M, family)) {
        TypePoint p = tp(M, t, family, opts);
        bool found = false;
        for (const TypePoint& c : classes)
            if (values_match(c.values, p.values, opts.tol)) {
                found = true;
                break;
            }
        if (!found) classes.push_back(std::move(p));
    }
    return classes;
}

EpsNet eps_net(const MetricStructure& M, int n, double eps, const TypeFamily& family,
               const EvalOptions& opts) {
    if (static_cast<int>(family.vars.size()) != n)
        throw input_error("eps_net: family arity does not match n");
    std::vector<TypePoint> classes = realized_types(M, family, opts);
    size_t k = classes.size();
    std::vector<std::vector<Scalar>> dist(k, std::vector<Scalar>(k, Scalar(Rat(0))));
    for (size_t i = 0; i < k; ++i)
        for (size_t j = i + 1; j < k; ++j)
            dist[i][j] = dist[j][i] = type_distance(M, classes[i], classes[j], family, opts);

    EpsNet net;
    std::vector<size_t> chosen = {0}; // farthest-point greedy from the first class
    while (true) {
        double far = -1;
        size_t far_i = 0;
        for (size_t i = 0; i < k; ++i) {
            double near = std::numeric_limits<double>::infinity();
            for (size_t c : chosen) near = std::min(near, dist[i][c].dbl());
            if (near > far) {
                far = near;
                far_i = i;
            }
        }
        if (far <= eps + opts.tol) break;
        chosen.push_back(far_i);
    }
    for (size_t c : chosen) net.net.push_back(classes[c]);
    for (size_t i = 0; i < k; ++i) {
        double best = std::numeric_limits<double>::infinity();
        int best_c = 0;
        for (size_t ci = 0; ci < chosen.size(); ++ci)
            if (dist[i][chosen[ci]].dbl() < best) {
                best = dist[i][chosen[ci]].dbl();
                best_c = static_cast<int>(ci);
            }
        net.certificate.push_back({classes[i].realizer, best_c, best});
    }
    return net;
}

} // namespace contilog
