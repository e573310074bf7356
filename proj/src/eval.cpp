#include "contilog/eval.hpp"

#include "contilog/enumerate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

namespace contilog {

namespace {

using Env = std::map<std::string, std::pair<std::string, Point>>;

struct Recorder {
    std::vector<std::pair<std::string, std::string>> trail;
    bool active = true;
};

ValueBounds vb(const Scalar& lo, const Scalar& hi, bool cert) { return ValueBounds{lo, hi, cert}; }

ValueBounds apply_connective(FKind k, const ValueBounds& a, const ValueBounds& b,
                             const Scalar& cap) {
    bool c = a.certified && b.certified;
    switch (k) {
        case FKind::Sub:
            return vb(Scalar::dotminus(a.lo, b.hi), Scalar::dotminus(a.hi, b.lo), c);
        case FKind::Add:
            return vb(Scalar::min(a.lo + b.lo, cap), Scalar::min(a.hi + b.hi, cap), c);
        case FKind::Min:
            return vb(Scalar::min(a.lo, b.lo), Scalar::min(a.hi, b.hi), c);
        case FKind::Max:
            return vb(Scalar::max(a.lo, b.lo), Scalar::max(a.hi, b.hi), c);
        case FKind::AbsDiff: {
            Scalar lo = Scalar::max(Scalar::max(a.lo - b.hi, b.lo - a.hi), Scalar(Rat(0)));
            Scalar hi = Scalar::max((a.hi - b.lo).abs(), (b.hi - a.lo).abs());
            return vb(lo, hi, c);
        }
        default: throw eval_error("not a binary connective");
    }
}

// ---------------------------------------------------------------------------
// projected multistart descent over (products of) Hilbert balls

struct Block {
    int len = 0;
    double radius = 1;
    bool sphere = false;
};

void project(std::vector<double>& x, const std::vector<Block>& blocks) {
    size_t off = 0;
    for (const Block& b : blocks) {
        double n2 = 0;
        for (int i = 0; i < b.len; ++i) n2 += x[off + i] * x[off + i];
        double n = std::sqrt(n2);
        if (b.sphere) {
            if (n < 1e-12) {
                for (int i = 0; i < b.len; ++i) x[off + i] = 0;
                x[off] = b.radius;
            } else {
                for (int i = 0; i < b.len; ++i) x[off + i] *= b.radius / n;
            }
        } else if (n > b.radius) {
            for (int i = 0; i < b.len; ++i) x[off + i] *= b.radius / n;
        }
        off += b.len;
    }
}

struct OptResult {
    std::vector<double> arg;
    double value = 0;
};

OptResult minimize_multistart(const std::function<double(const std::vector<double>&)>& f,
                              const std::vector<Block>& blocks, const EvalOptions& opts,
                              uint64_t salt) {
    int total = 0;
    double rmax = 0;
    for (const Block& b : blocks) {
        total += b.len;
        rmax = std::max(rmax, b.radius);
    }
    std::mt19937_64 rng(opts.seed * 0x9e3779b97f4a7c15ULL + salt);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    std::vector<std::vector<double>> starts;
    {
        // structured starts: zero (projected), each axis at full radius
        std::vector<double> z(total, 0.0);
        project(z, blocks);
        starts.push_back(z);
        for (int i = 0; i < total && static_cast<int>(starts.size()) < opts.starts; ++i) {
            std::vector<double> a(total, 0.0);
            size_t off = 0;
            for (const Block& b : blocks) {
                if (i >= static_cast<int>(off) && i < static_cast<int>(off) + b.len)
                    a[i] = b.radius;
                off += b.len;
            }
            project(a, blocks);
            starts.push_back(a);
        }
        while (static_cast<int>(starts.size()) < opts.starts) {
            std::vector<double> a(total);
            size_t off = 0;
            for (const Block& b : blocks) {
                double n2 = 0;
                for (int i = 0; i < b.len; ++i) {
                    a[off + i] = gauss(rng);
                    n2 += a[off + i] * a[off + i];
                }
                double n = std::sqrt(std::max(n2, 1e-30));
                double r = b.sphere ? b.radius
                                    : b.radius * std::pow(unif(rng), 1.0 / std::max(b.len, 1));
                for (int i = 0; i < b.len; ++i) a[off + i] *= r / n;
                off += b.len;
            }
            starts.push_back(a);
        }
    }

    OptResult best;
    best.value = std::numeric_limits<double>::infinity();
    double h = 1e-6 * std::max(rmax, 1.0);
    for (auto& x0 : starts) {
        std::vector<double> x = x0;
        double fx = f(x);
        double step = 0.2 * std::max(rmax, 1.0);
        for (int it = 0; it < opts.max_iter && step > opts.stationarity; ++it) {
            // central-difference gradient
            std::vector<double> g(total);
            double gn = 0;
            for (int i = 0; i < total; ++i) {
                std::vector<double> xp = x, xm = x;
                xp[i] += h;
                xm[i] -= h;
                project(xp, blocks);
                project(xm, blocks);
                g[i] = (f(xp) - f(xm)) / 2;
                gn += g[i] * g[i];
            }
            gn = std::sqrt(gn);
            if (gn < 1e-14) break;
            bool moved = false;
            while (step > opts.stationarity) {
                std::vector<double> x2 = x;
                for (int i = 0; i < total; ++i) x2[i] -= step * g[i] / gn;
                project(x2, blocks);
                double f2 = f(x2);
                if (f2 < fx - 1e-15) {
                    x = std::move(x2);
                    fx = f2;
                    step *= 1.4;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if (!moved) break;
        }
        if (fx < best.value) {
            best.value = fx;
            best.arg = x;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------

struct Evaluator {
    const MetricStructure& M;
    const EvalOptions& opts;
    Scalar cap;

    Point term(const Term& t, const Env& env) const {
        if (t.is_var) {
            auto it = env.find(t.head);
            if (it == env.end()) throw eval_error("unbound variable: " + t.head);
            if (!t.sort.empty() && it->second.first != t.sort)
                throw eval_error("variable " + t.head + " bound at sort " +
                                 it->second.first + ", expected " + t.sort);
            return it->second.second;
        }
        if (t.symbol < 0) throw eval_error("unresolved term: " + print_term(t));
        std::vector<Point> args;
        args.reserve(t.args.size());
        for (const Term& a : t.args) args.push_back(term(a, env));
        return M.apply_function(t.symbol, args);
    }

    std::string point_label(const std::string& sort, const Point& p) const {
        return M.label(sort, p);
    }

    ValueBounds eval(const Formula& f, Env& env, Recorder* rec) const {
        switch (f.kind) {
            case FKind::Const:
                if (rec) rec->active = false;
                return ValueBounds::exact(Scalar(f.constant));
            case FKind::Dist: {
                if (rec) rec->active = false;
                Point a = term(f.terms[0], env);
                Point b = term(f.terms[1], env);
                return ValueBounds::exact(M.metric(f.terms[0].sort, a, b));
            }
            case FKind::Atomic: {
                if (rec) rec->active = false;
                std::vector<Point> args;
                for (const Term& t : f.terms) args.push_back(term(t, env));
                return ValueBounds::exact(M.apply_predicate(f.symbol, args));
            }
            case FKind::Half: {
                if (rec) rec->active = false;
                ValueBounds a = eval(f.kids[0], env, nullptr);
                return vb(a.lo.half(), a.hi.half(), a.certified);
            }
            case FKind::Neg: {
                if (rec) rec->active = false;
                ValueBounds a = eval(f.kids[0], env, nullptr);
                return vb(cap - a.hi, cap - a.lo, a.certified);
            }
            case FKind::Sub:
            case FKind::Add:
            case FKind::Min:
            case FKind::Max:
            case FKind::AbsDiff: {
                if (rec) rec->active = false;
                ValueBounds a = eval(f.kids[0], env, nullptr);
                ValueBounds b = eval(f.kids[1], env, nullptr);
                return apply_connective(f.kind, a, b, cap);
            }
            case FKind::Sup:
            case FKind::Inf:
                return quantifier(f, env, rec);
        }
        throw eval_error("unreachable");
    }

    ValueBounds quantifier(const Formula& f, Env& env, Recorder* rec) const {
        const SortCarrier& c = M.carrier(f.var_sort);
        if (c.finite()) return finite_quantifier(f, env, rec);
        return hilbert_quantifier(f, env, rec);
    }

    ValueBounds finite_quantifier(const Formula& f, Env& env, Recorder* rec) const {
        const SortCarrier& c = M.carrier(f.var_sort);
        int n = c.size();
        if (n == 0) throw eval_error("quantifier over the empty sort " + f.var_sort);
        bool is_sup = f.kind == FKind::Sup;
        auto saved = env.find(f.var) != env.end()
                         ? std::optional<std::pair<std::string, Point>>(env[f.var])
                         : std::nullopt;
        std::optional<ValueBounds> acc;
        int best_point = 0;
        for (int i = 0; i < n; ++i) {
            env[f.var] = {f.var_sort, Point(i)};
            ValueBounds v = eval(f.kids[0], env, nullptr);
            if (!acc) {
                acc = v;
                best_point = i;
            } else if (is_sup) {
                // track the argmax by the sound (lo) side
                if (v.lo > acc->lo) best_point = i;
                acc = vb(Scalar::max(acc->lo, v.lo), Scalar::max(acc->hi, v.hi),
                         acc->certified && v.certified);
            } else {
                if (v.hi < acc->hi) best_point = i;
                acc = vb(Scalar::min(acc->lo, v.lo), Scalar::min(acc->hi, v.hi),
                         acc->certified && v.certified);
            }
        }
        if (rec && rec->active) {
            rec->trail.emplace_back(f.var, c.labels[best_point]);
            env[f.var] = {f.var_sort, Point(best_point)};
            eval(f.kids[0], env, rec); // extend the trail down the optimal branch
        }
        if (saved) env[f.var] = *saved;
        else env.erase(f.var);
        return *acc;
    }

    ValueBounds hilbert_quantifier(const Formula& f, Env& env, Recorder* rec) const {
        // flatten a contiguous same-direction prefix of Hilbert quantifiers
        // into one joint optimization
        bool is_sup = f.kind == FKind::Sup;
        std::vector<const Formula*> chain;
        const Formula* node = &f;
        while ((node->kind == (is_sup ? FKind::Sup : FKind::Inf)) &&
               !M.carrier(node->var_sort).finite()) {
            chain.push_back(node);
            if (node->kids[0].kind != node->kind) break;
            node = &node->kids[0];
            if (M.carrier(node->var_sort).finite()) break;
        }
        const Formula& body = chain.back()->kids[0];

        std::vector<Block> blocks;
        for (const Formula* q : chain) {
            const SortCarrier& c = M.carrier(q->var_sort);
            Block b;
            b.len = c.vec_len();
            b.radius = c.radius;
            b.sphere = opts.sphere_vars.count(q->var) > 0;
            blocks.push_back(b);
        }

        auto bind = [&](Env& e, const std::vector<double>& x) {
            size_t off = 0;
            for (size_t i = 0; i < chain.size(); ++i) {
                std::vector<double> v(x.begin() + off, x.begin() + off + blocks[i].len);
                e[chain[i]->var] = {chain[i]->var_sort, Point(std::move(v))};
                off += blocks[i].len;
            }
        };
        auto objective = [&](const std::vector<double>& x) {
            Env e = env;
            bind(e, x);
            ValueBounds v = eval(body, e, nullptr);
            return is_sup ? -v.lo.dbl() : v.hi.dbl();
        };
        uint64_t salt = std::hash<std::string>{}(print_formula(f));
        OptResult r = minimize_multistart(objective, blocks, opts, salt);

        Env e = env;
        bind(e, r.arg);
        ValueBounds at_best = eval(body, e, nullptr);
        if (rec && rec->active) {
            size_t off = 0;
            for (size_t i = 0; i < chain.size(); ++i) {
                std::vector<double> v(r.arg.begin() + off, r.arg.begin() + off + blocks[i].len);
                rec->trail.emplace_back(chain[i]->var,
                                        point_label(chain[i]->var_sort, Point(v)));
                off += blocks[i].len;
            }
            eval(body, e, rec);
        }
        Scalar margin = Scalar::approx(opts.heuristic_margin);
        if (is_sup)
            return vb(at_best.lo, Scalar::approx(at_best.hi.dbl()) + margin, false);
        return vb(Scalar::approx(at_best.lo.dbl()) - margin, at_best.hi, false);
    }
};

Env env_from_assignment(const MetricStructure& M, const Formula& f, const Assignment& a) {
    Env env;
    for (const auto& [var, sp] : a.vals) {
        if (!M.carriers.count(sp.first))
            throw eval_error("assignment binds " + var + " to unknown sort " + sp.first);
        env[var] = sp;
    }
    for (const auto& [var, sort] : free_vars(f)) {
        auto it = env.find(var);
        if (it == env.end()) throw eval_error("unbound variable: " + var);
        if (!sort.empty() && it->second.first != sort)
            throw eval_error("assignment binds " + var + " at sort " + it->second.first +
                             ", formula uses it at " + sort);
    }
    return env;
}

} // namespace

ValueBounds evaluate(const MetricStructure& M, const Formula& f, const Assignment& a,
                     const EvalOptions& opts) {
    Evaluator ev{M, opts, Scalar(f.cap)};
    Env env = env_from_assignment(M, f, a);
    return ev.eval(f, env, nullptr);
}

WitnessedValue evaluate_witness(const MetricStructure& M, const Formula& f, const Assignment& a,
                                const EvalOptions& opts) {
    Evaluator ev{M, opts, Scalar(f.cap)};
    Env env = env_from_assignment(M, f, a);
    Recorder rec;
    ValueBounds b = ev.eval(f, env, &rec);
    return WitnessedValue{b, std::move(rec.trail)};
}

// ---------------------------------------------------------------------------
// modulus verification

ModulusReport check_modulus(const MetricStructure& M, int symbol,
                            const std::vector<Rat>& eps_grid, const EvalOptions& opts) {
    const SymbolDecl& decl = M.sig.symbol(symbol);
    if (decl.arg_sorts.empty()) return ModulusReport{};
    bool all_finite = true;
    for (const auto& s : decl.arg_sorts)
        if (!M.carrier(s).finite()) all_finite = false;

    ModulusReport rep;
    auto delta_of = [&](const std::vector<Point>& x, const std::vector<Point>& y) {
        if (decl.is_predicate) {
            Scalar a = M.apply_predicate(symbol, x);
            Scalar b = M.apply_predicate(symbol, y);
            return std::fabs(a.dbl() - b.dbl());
        }
        Point a = M.apply_function(symbol, x);
        Point b = M.apply_function(symbol, y);
        return M.metric(decl.result_sort, a, b).dbl();
    };

    for (const Rat& eps : eps_grid) {
        if (eps <= 0) continue;
        ModulusReport::Entry entry;
        entry.eps = eps;
        auto consider = [&](const std::vector<Point>& x, size_t j, const Point& alt,
                            double dist, double gamma) {
            if (dist >= gamma) return;
            std::vector<Point> y = x;
            y[j] = alt;
            double margin = delta_of(x, y) - rat_to_double(eps);
            if (margin > entry.worst_margin) {
                entry.worst_margin = margin;
                entry.witness = decl.name + " arg " + std::to_string(j + 1) + ": " +
                                M.label(decl.arg_sorts[j], x[j]) + " ~ " +
                                M.label(decl.arg_sorts[j], alt);
            }
        };

        if (all_finite) {
            std::vector<int> sizes;
            size_t prod = 1;
            for (const auto& s : decl.arg_sorts) {
                sizes.push_back(M.carrier(s).size());
                prod *= sizes.back();
            }
            std::vector<Point> x(decl.arg_sorts.size());
            for (size_t flat = 0; flat < prod; ++flat) {
                size_t rest = flat;
                for (size_t j = decl.arg_sorts.size(); j-- > 0;) {
                    x[j] = Point(static_cast<int32_t>(rest % sizes[j]));
                    rest /= sizes[j];
                }
                for (size_t j = 0; j < decl.arg_sorts.size(); ++j) {
                    double gamma = rat_to_double(decl.moduli[j](eps));
                    const SortCarrier& c = M.carrier(decl.arg_sorts[j]);
                    for (int alt = 0; alt < c.size(); ++alt) {
                        if (alt == pt_index(x[j])) continue;
                        double dist = rat_to_double(c.finite_dist(pt_index(x[j]), alt));
                        consider(x, j, Point(alt), dist, gamma);
                    }
                }
            }
        } else {
            std::mt19937_64 rng(opts.seed + 77);
            std::normal_distribution<double> gauss(0.0, 1.0);
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            auto random_point = [&](const std::string& sort) {
                const SortCarrier& c = M.carrier(sort);
                if (c.finite())
                    return Point(static_cast<int32_t>(rng() % c.size()));
                std::vector<double> v(c.vec_len());
                double n2 = 0;
                for (double& z : v) {
                    z = gauss(rng);
                    n2 += z * z;
                }
                double r = 0.9 * c.radius * std::pow(unif(rng), 1.0 / v.size());
                for (double& z : v) z *= r / std::sqrt(std::max(n2, 1e-30));
                return Point(std::move(v));
            };
            int samples = std::max(64, opts.starts * 8);
            for (int s = 0; s < samples; ++s) {
                std::vector<Point> x;
                for (const auto& srt : decl.arg_sorts) x.push_back(random_point(srt));
                for (size_t j = 0; j < decl.arg_sorts.size(); ++j) {
                    const SortCarrier& c = M.carrier(decl.arg_sorts[j]);
                    double gamma = rat_to_double(decl.moduli[j](eps));
                    if (c.finite()) {
                        for (int alt = 0; alt < c.size(); ++alt) {
                            if (alt == pt_index(x[j])) continue;
                            double dist = rat_to_double(c.finite_dist(pt_index(x[j]), alt));
                            consider(x, j, Point(alt), dist, gamma);
                        }
                    } else {
                        std::vector<double> v = pt_vec(x[j]);
                        double n2 = 0;
                        std::vector<double> dir(v.size());
                        for (double& z : dir) {
                            z = gauss(rng);
                            n2 += z * z;
                        }
                        double len = unif(rng) * std::min(gamma, 0.1 * c.radius) * 0.999;
                        for (size_t i = 0; i < v.size(); ++i)
                            v[i] += dir[i] * len / std::sqrt(std::max(n2, 1e-30));
                        double vn = vec_norm(v);
                        if (vn > c.radius)
                            for (double& z : v) z *= c.radius / vn;
                        double dist = vec_dist(pt_vec(x[j]), v);
                        consider(x, j, Point(std::move(v)), dist, gamma);
                    }
                }
            }
        }
        if (entry.worst_margin > rep.worst_margin) {
            rep.worst_margin = entry.worst_margin;
            rep.worst_witness = entry.witness;
        }
        rep.entries.push_back(std::move(entry));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// depth-bounded elementary equivalence

EquivReport elem_equiv_depth(const MetricStructure& M, const MetricStructure& N, int depth,
                             const EvalOptions& opts) {
    if (!(M.sig == N.sig))
        throw eval_error("elem_equiv_depth: signatures differ (carrier mismatch)");
    EnumOptions eo;
    eo.max_depth = depth;
    std::vector<Formula> sentences = enum_formulas(M.sig, {}, eo);
    EquivReport rep;
    for (const Formula& s : sentences) {
        if (!is_closed(s)) continue;
        ValueBounds a = evaluate(M, s, {}, opts);
        ValueBounds b = evaluate(N, s, {}, opts);
        ++rep.sentences_checked;
        double disc = std::fabs(a.hi.dbl() - b.hi.dbl());
        if (disc > rep.max_discrepancy) rep.max_discrepancy = disc;
        if (disc > opts.tol && rep.first_distinguishing.empty()) {
            rep.first_distinguishing = print_formula(s);
            rep.lhs = a.hi.dbl();
            rep.rhs = b.hi.dbl();
        }
    }
    return rep;
}

} // namespace contilog
