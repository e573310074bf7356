#include "contilog/structure.hpp"

#include <cmath>

namespace contilog {

Rat SortCarrier::finite_dist(int i, int j) const {
    if (i == j) return Rat(0);
    switch (metric) {
        case MetricKind::Discrete: return Rat(1);
        case MetricKind::Table: return dist[static_cast<size_t>(i) * labels.size() + j];
        case MetricKind::PermHamming: {
            const auto &a = perms[i], &b = perms[j];
            int moved = 0;
            for (size_t k = 0; k < a.size(); ++k)
                if (a[k] != b[k]) ++moved;
            return Rat(moved, static_cast<long>(a.size()));
        }
    }
    return Rat(0);
}

void SortCarrier::index_labels() {
    label_index.clear();
    for (int i = 0; i < size(); ++i) {
        if (label_index.count(labels[i]))
            throw input_error("duplicate point label: " + labels[i]);
        label_index[labels[i]] = i;
    }
    if (metric == MetricKind::PermHamming) {
        perm_index.clear();
        for (int i = 0; i < size(); ++i) perm_index[perms[i]] = i;
    }
}

const SortCarrier& MetricStructure::carrier(const std::string& sort) const {
    auto it = carriers.find(sort);
    if (it == carriers.end()) throw input_error("no carrier for sort: " + sort);
    return it->second;
}

SortCarrier& MetricStructure::carrier_mut(const std::string& sort) {
    auto it = carriers.find(sort);
    if (it == carriers.end()) throw input_error("no carrier for sort: " + sort);
    return it->second;
}

double vec_norm(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double vec_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

Scalar MetricStructure::metric(const std::string& sort, const Point& a, const Point& b) const {
    const SortCarrier& c = carrier(sort);
    if (c.finite()) return Scalar(c.finite_dist(pt_index(a), pt_index(b)));
    return Scalar::approx(vec_dist(pt_vec(a), pt_vec(b)));
}

std::string MetricStructure::label(const std::string& sort, const Point& p) const {
    const SortCarrier& c = carrier(sort);
    if (c.finite()) return c.labels[pt_index(p)];
    std::string s = "[";
    const auto& v = pt_vec(p);
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        char buf[32];
        snprintf(buf, sizeof buf, "%.6g", v[i]);
        s += buf;
    }
    return s + "]";
}

int MetricStructure::point(const std::string& sort, const std::string& lbl) const {
    const SortCarrier& c = carrier(sort);
    auto it = c.label_index.find(lbl);
    if (it == c.label_index.end())
        throw input_error("no point '" + lbl + "' in sort " + sort);
    return it->second;
}

Point MetricStructure::apply_function(int symbol, const std::vector<Point>& args) const {
    auto it = interps.find(symbol);
    if (it == interps.end())
        throw input_error("no interpretation for symbol " + sig.symbol(symbol).name);
    const Interp& I = it->second;
    const SymbolDecl& decl = sig.symbol(symbol);
    switch (I.kind) {
        case Interp::Kind::ConstPoint: return I.cpoint;
        case Interp::Kind::FuncTable: {
            size_t idx = 0;
            for (size_t i = 0; i < args.size(); ++i) {
                const SortCarrier& c = carrier(decl.arg_sorts[i]);
                idx = idx * c.size() + pt_index(args[i]);
            }
            return I.table[idx];
        }
        case Interp::Kind::PermMul: {
            const SortCarrier& c = carrier(decl.arg_sorts[0]);
            const auto &a = c.perms[pt_index(args[0])], &b = c.perms[pt_index(args[1])];
            std::vector<uint8_t> ab(a.size());
            // composition acts left-to-right: (a*b)(i) = b(a(i))
            for (size_t i = 0; i < a.size(); ++i) ab[i] = b[a[i]];
            const SortCarrier& rc = carrier(decl.result_sort);
            auto f = rc.perm_index.find(ab);
            if (f == rc.perm_index.end())
                throw input_error("product escapes the carrier of " + decl.result_sort);
            return f->second;
        }
        case Interp::Kind::PermInv: {
            const SortCarrier& c = carrier(decl.arg_sorts[0]);
            const auto& a = c.perms[pt_index(args[0])];
            std::vector<uint8_t> inv(a.size());
            for (size_t i = 0; i < a.size(); ++i) inv[a[i]] = static_cast<uint8_t>(i);
            const SortCarrier& rc = carrier(decl.result_sort);
            auto f = rc.perm_index.find(inv);
            if (f == rc.perm_index.end())
                throw input_error("inverse escapes the carrier of " + decl.result_sort);
            return f->second;
        }
        case Interp::Kind::HilbertInclude: return pt_vec(args[0]);
        case Interp::Kind::HilbertZero: {
            const SortCarrier& rc = carrier(decl.result_sort);
            return std::vector<double>(rc.vec_len(), 0.0);
        }
        case Interp::Kind::HilbertScale: {
            const SortCarrier& c = carrier(decl.arg_sorts[0]);
            std::vector<double> v = pt_vec(args[0]);
            if (c.field == Field::Real) {
                double r = rat_to_double(I.scale_re);
                for (double& x : v) x *= r;
            } else {
                double re = rat_to_double(I.scale_re), im = rat_to_double(I.scale_im);
                for (size_t i = 0; i + 1 < v.size(); i += 2) {
                    double a = v[i], b = v[i + 1];
                    v[i] = re * a - im * b;
                    v[i + 1] = re * b + im * a;
                }
            }
            return v;
        }
        case Interp::Kind::HilbertAdd:
        case Interp::Kind::HilbertSub: {
            std::vector<double> v = pt_vec(args[0]);
            const auto& w = pt_vec(args[1]);
            double s = I.kind == Interp::Kind::HilbertAdd ? 1.0 : -1.0;
            for (size_t i = 0; i < v.size(); ++i) v[i] += s * w[i];
            return v;
        }
        case Interp::Kind::MatrixAction: {
            int g = pt_index(args[0]);
            const auto& v = pt_vec(args[1]);
            const auto& m = I.mats[g];
            size_t nrow = v.size();
            std::vector<double> out(nrow, 0.0);
            for (size_t r = 0; r < nrow; ++r)
                for (size_t c2 = 0; c2 < nrow; ++c2) out[r] += m[r * nrow + c2] * v[c2];
            if (!I.trans.empty() && !I.trans[g].empty())
                for (size_t r = 0; r < nrow; ++r) out[r] += I.trans[g][r];
            return out;
        }
        default: throw input_error("not a function interpretation");
    }
}

Scalar MetricStructure::apply_predicate(int symbol, const std::vector<Point>& args) const {
    auto it = interps.find(symbol);
    if (it == interps.end())
        throw input_error("no interpretation for symbol " + sig.symbol(symbol).name);
    const Interp& I = it->second;
    const SymbolDecl& decl = sig.symbol(symbol);
    switch (I.kind) {
        case Interp::Kind::PredTable: {
            size_t idx = 0;
            for (size_t i = 0; i < args.size(); ++i) {
                const SortCarrier& c = carrier(decl.arg_sorts[i]);
                idx = idx * c.size() + pt_index(args[i]);
            }
            return Scalar(I.values[idx]);
        }
        case Interp::Kind::Norm: return Scalar::approx(vec_norm(pt_vec(args[0])));
        case Interp::Kind::InnerRe: {
            const SortCarrier& c = carrier(decl.arg_sorts[0]);
            const auto &x = pt_vec(args[0]), &y = pt_vec(args[1]);
            double s = 0;
            if (c.field == Field::Real) {
                for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
            } else {
                // Re<x,y> with <x,y> = sum x_i conj(y_i)
                for (size_t i = 0; i + 1 < x.size(); i += 2)
                    s += x[i] * y[i] + x[i + 1] * y[i + 1];
            }
            return Scalar::approx(s);
        }
        case Interp::Kind::InnerIm: {
            const auto &x = pt_vec(args[0]), &y = pt_vec(args[1]);
            double s = 0;
            for (size_t i = 0; i + 1 < x.size(); i += 2)
                s += x[i + 1] * y[i] - x[i] * y[i + 1];
            return Scalar::approx(s);
        }
        default: throw input_error("not a predicate interpretation");
    }
}

int GroupView::mul(int a, int b) const {
    return pt_index(M->apply_function(mul_sym, {Point(a), Point(b)}));
}
int GroupView::inv(int a) const { return pt_index(M->apply_function(inv_sym, {Point(a)})); }
int GroupView::unit() const { return pt_index(M->apply_function(unit_sym, {})); }
Rat GroupView::dist(int a, int b) const { return M->carrier(sort).finite_dist(a, b); }

GroupView group_view(const MetricStructure& M, const std::string& sort) {
    GroupView g;
    g.M = &M;
    g.sort = sort;
    auto mul = M.sig.resolve("mul", {sort, sort});
    auto inv = M.sig.resolve("inv", {sort});
    auto unit = M.sig.resolve("1", {});
    if (!mul || !inv || !unit)
        throw input_error("sort " + sort + " does not carry group operations");
    if (M.sig.symbol(*mul).result_sort != sort || M.sig.symbol(*inv).result_sort != sort ||
        M.sig.symbol(*unit).result_sort != sort)
        throw input_error("sort " + sort + " is not closed under its group operations");
    g.mul_sym = *mul;
    g.inv_sym = *inv;
    g.unit_sym = *unit;
    g.n = M.carrier(sort).size();
    return g;
}

void validate_structure(const MetricStructure& M, const ValidationOptions& opts) {
    for (const Sort& s : M.sig.sorts()) {
        const SortCarrier& c = M.carrier(s.name);
        if (!c.finite()) continue;
        int n = c.size();
        if (n == 0) throw input_error("empty carrier for sort " + s.name);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Rat dij = c.finite_dist(i, j);
                if ((dij == 0) != (i == j))
                    throw input_error("metric identity fails at (" + c.labels[i] + "," +
                                      c.labels[j] + ") in " + s.name);
                if (dij < 0 || dij > s.diameter)
                    throw input_error("metric exceeds diameter at (" + c.labels[i] + "," +
                                      c.labels[j] + ") in " + s.name);
                if (dij != c.finite_dist(j, i))
                    throw input_error("metric asymmetry at (" + c.labels[i] + "," +
                                      c.labels[j] + ") in " + s.name);
            }
        if (n <= opts.exhaustive_cap) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        if (c.finite_dist(i, k) >
                            Rat(c.finite_dist(i, j) + c.finite_dist(j, k)))
                            throw input_error("triangle inequality fails at (" + c.labels[i] +
                                              "," + c.labels[j] + "," + c.labels[k] + ") in " +
                                              s.name);
        }
        // group laws wherever the sort carries closed group operations
        bool has_group = M.sig.resolve("mul", {s.name, s.name}).has_value() &&
                         M.sig.resolve("inv", {s.name}).has_value() &&
                         M.sig.resolve("1", {}).has_value();
        if (has_group) {
            GroupView g;
            try {
                g = group_view(M, s.name);
            } catch (const input_error&) {
                continue; // tower sorts: mul lands in the next sort up
            }
            int e = g.unit();
            for (int a = 0; a < n; ++a) {
                if (g.mul(a, e) != a || g.mul(e, a) != a)
                    throw input_error("unit law fails at " + c.labels[a]);
                if (g.mul(a, g.inv(a)) != e)
                    throw input_error("inverse law fails at " + c.labels[a]);
            }
            if (n <= opts.exhaustive_cap)
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b)
                        for (int cc = 0; cc < n; ++cc)
                            if (g.mul(g.mul(a, b), cc) != g.mul(a, g.mul(b, cc)))
                                throw input_error("associativity fails at (" + c.labels[a] +
                                                  "," + c.labels[b] + "," + c.labels[cc] + ")");
        }
    }
}

} // namespace contilog
