#include "contilog/ultra.hpp"

#include "contilog/builders.hpp"

namespace contilog {

std::vector<MetricStructure> StructureSequence::materialize() const {
    std::vector<MetricStructure> out;
    out.reserve(max_index);
    for (int i = 1; i <= max_index; ++i) out.push_back(generator(i));
    for (size_t i = 1; i < out.size(); ++i)
        if (!(out[i].sig == out[0].sig))
            throw input_error("sequence members disagree on the signature at index " +
                              std::to_string(i + 1));
    return out;
}

ConvergenceReport classify_tail(const std::vector<Scalar>& values, int window, double tol,
                                const Rat& value_cap) {
    ConvergenceReport rep;
    rep.values = values;
    rep.window = window;
    if (values.empty()) return rep;
    int n = static_cast<int>(values.size());
    int w = std::min(window, n);
    std::vector<Scalar> tail(values.end() - w, values.end());

    const Scalar& last = tail.back();
    Scalar spread(Rat(0));
    for (const Scalar& v : tail) spread = Scalar::max(spread, (v - last).abs());
    if (spread.dbl() <= tol) {
        rep.tail = Tail::Convergent;
        rep.limit = last;
        rep.limit_tol = spread;
        return rep;
    }

    if (w >= 3) {
        std::vector<Scalar> diff;
        for (int i = 1; i < w; ++i) diff.push_back(tail[i] - tail[i - 1]);
        bool monotone = true, shrinking = true, alternating = true;
        for (size_t i = 0; i < diff.size(); ++i) {
            if (i > 0) {
                bool same_sign = (diff[i].dbl() >= 0) == (diff[i - 1].dbl() >= 0);
                if (!same_sign) monotone = false;
                else alternating = false;
                if (diff[i].abs() >= diff[i - 1].abs()) shrinking = false;
            }
        }
        if (monotone && shrinking) {
            // geometric extrapolation from the last two gaps, clamped into
            // the value range
            const Scalar& d1 = diff[diff.size() - 2];
            const Scalar& d2 = diff[diff.size() - 1];
            Scalar limit = last;
            if (d1.abs().dbl() > 0) {
                if (d1.exact() && d2.exact() && last.exact()) {
                    Rat q = Rat(d2.rat() / d1.rat());
                    if (q > -1 && q < 1)
                        limit = Scalar(Rat(last.rat() + d2.rat() * q / (1 - q)));
                } else {
                    double q = d2.dbl() / d1.dbl();
                    if (q > -1 && q < 1)
                        limit = Scalar::approx(last.dbl() + d2.dbl() * q / (1 - q));
                }
            }
            if (limit < Scalar(Rat(0))) limit = Scalar(Rat(0));
            if (limit > Scalar(value_cap)) limit = Scalar(value_cap);
            rep.tail = Tail::Convergent;
            rep.limit = limit;
            Scalar t(Rat(0));
            for (const Scalar& v : tail) t = Scalar::max(t, (v - limit).abs());
            rep.limit_tol = t;
            return rep;
        }
        if (alternating && diff.size() >= 2) {
            rep.tail = Tail::Oscillating;
            return rep;
        }
    }
    rep.tail = Tail::Undetermined;
    return rep;
}

ConvergenceReport ultra_eval(const StructureSequence& seq, const Formula& f, int window,
                             const EvalOptions& opts) {
    if (!is_closed(f)) throw input_error("ultra_eval needs a closed formula");
    std::vector<MetricStructure> members = seq.materialize();
    std::vector<Scalar> values;
    bool certified = true;
    for (const MetricStructure& M : members) {
        ValueBounds v = evaluate(M, f, {}, opts);
        values.push_back(v.hi);
        certified = certified && v.certified;
    }
    ConvergenceReport rep = classify_tail(values, window, opts.tol, f.cap);
    rep.values_certified = certified;
    return rep;
}

ConvergenceReport point_distance(const StructureSequence& seq, const PointSequence& p,
                                 const PointSequence& q, int window, const EvalOptions& opts) {
    if (p.sort != q.sort) throw input_error("point sequences live in different sorts");
    std::vector<MetricStructure> members = seq.materialize();
    if (p.labels.size() < members.size() || q.labels.size() < members.size())
        throw input_error("point sequences must cover every index");
    std::vector<Scalar> values;
    Rat diam = 1;
    for (size_t i = 0; i < members.size(); ++i) {
        const MetricStructure& M = members[i];
        diam = std::max(diam, M.sig.sort(p.sort).diameter);
        int a = M.point(p.sort, p.labels[i]);
        int b = M.point(q.sort, q.labels[i]);
        values.push_back(M.metric(p.sort, Point(a), Point(b)));
    }
    return classify_tail(values, window, opts.tol, diam);
}

QuotientReport quotient_classes(const StructureSequence& seq,
                                const std::vector<PointSequence>& points, double tol,
                                int window, const EvalOptions& opts) {
    int n = static_cast<int>(points.size());
    QuotientReport rep;
    std::vector<std::vector<double>> limit(n, std::vector<double>(n, 0));
    std::vector<std::vector<bool>> known(n, std::vector<bool>(n, true));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            ConvergenceReport r = point_distance(seq, points[i], points[j], window, opts);
            if (r.tail == Tail::Convergent) {
                limit[i][j] = limit[j][i] = r.limit.dbl();
            } else {
                known[i][j] = known[j][i] = false;
                rep.flags.push_back("pair (" + std::to_string(i) + "," + std::to_string(j) +
                                    ") has an undetermined tail; not merged");
            }
        }
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (known[i][j] && limit[i][j] < tol) parent[find(i)] = find(j);
    std::map<int, std::vector<int>> groups;
    for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
    for (auto& [root, members] : groups) {
        // transitivity audit within the class
        for (size_t a = 0; a < members.size(); ++a)
            for (size_t b = a + 1; b < members.size(); ++b) {
                int i = members[a], j = members[b];
                if (!known[i][j] || limit[i][j] >= 3 * tol)
                    rep.flags.push_back("class around " + std::to_string(root) +
                                        ": pair (" + std::to_string(i) + "," +
                                        std::to_string(j) + ") exceeds 3*tol");
            }
        rep.classes.push_back(members);
    }
    return rep;
}

StructureSequence gn_sequence(int lo, int hi) {
    if (lo < 1 || hi < lo) throw input_error("bad gn_family range");
    StructureSequence s;
    s.max_index = hi - lo + 1;
    s.generator = [lo](int i) { return gn_family(lo + i - 1); };
    return s;
}

StructureSequence sym_sequence(int lo, int hi) {
    if (lo < 1 || hi < lo) throw input_error("bad sym_hamming range");
    StructureSequence s;
    s.max_index = hi - lo + 1;
    s.generator = [lo](int i) { return sym_hamming(lo + i - 1); };
    return s;
}

} // namespace contilog
