#include "contilog/enumerate.hpp"

#include <map>
#include <random>
#include <set>

namespace contilog {

namespace {

using Ctx = std::vector<std::pair<std::string, std::string>>; // (var, sort)

std::string ctx_key(const Ctx& ctx) {
    std::string k;
    for (const auto& [v, s] : ctx) k += v + ":" + s + ";";
    return k;
}

struct Enumerator {
    const Signature& sig;
    const EnumOptions& opts;
    std::vector<std::string> asorts; // every sort (distance atoms)
    std::vector<std::string> qsorts; // quantifiable sorts (finite kinds)
    std::map<std::string, std::vector<Term>> term_memo;     // per (ctx, sort, depth)
    std::map<std::string, std::vector<Formula>> level_memo; // per (ctx, depth)

    explicit Enumerator(const Signature& s, const EnumOptions& o) : sig(s), opts(o) {
        for (const Sort& srt : sig.sorts()) {
            asorts.push_back(srt.name);
            if (srt.kind != SortKind::HilbertBall) qsorts.push_back(srt.name);
        }
    }

    std::vector<Term> terms(const Ctx& ctx, const std::string& sort, int depth) {
        std::string key = ctx_key(ctx) + "|" + sort + "|" + std::to_string(depth);
        auto it = term_memo.find(key);
        if (it != term_memo.end()) return it->second;
        std::vector<Term> out;
        for (const auto& [v, s] : ctx)
            if (s == sort) {
                Term t = Term::var(v);
                t.sort = sort;
                out.push_back(t);
            }
        for (int id = 0; id < sig.symbol_count(); ++id) {
            const SymbolDecl& d = sig.symbol(id);
            if (d.is_predicate || !d.arg_sorts.empty() || d.result_sort != sort) continue;
            Term t = Term::app(d.name);
            t.symbol = id;
            t.sort = sort;
            out.push_back(t);
        }
        if (depth > 0) {
            for (int id = 0; id < sig.symbol_count(); ++id) {
                const SymbolDecl& d = sig.symbol(id);
                if (d.is_predicate || d.arg_sorts.empty() || d.result_sort != sort) continue;
                std::vector<std::vector<Term>> arglists;
                bool feasible = true;
                for (const auto& as : d.arg_sorts) {
                    arglists.push_back(terms(ctx, as, depth - 1));
                    if (arglists.back().empty()) feasible = false;
                }
                if (!feasible) continue;
                std::vector<size_t> idx(d.arg_sorts.size(), 0);
                while (true) {
                    std::vector<Term> args;
                    for (size_t j = 0; j < idx.size(); ++j) args.push_back(arglists[j][idx[j]]);
                    Term t = Term::app(d.name, std::move(args));
                    t.symbol = id;
                    t.sort = sort;
                    out.push_back(std::move(t));
                    size_t j = idx.size();
                    while (j > 0) {
                        --j;
                        if (++idx[j] < arglists[j].size()) break;
                        idx[j] = 0;
                        if (j == 0) goto done;
                    }
                    if (out.size() > 4 * opts.per_level_cap) break;
                }
            done:;
            }
        }
        term_memo[key] = out;
        return out;
    }

    std::vector<Formula> atoms(const Ctx& ctx) {
        std::vector<Formula> out;
        for (const std::string& sort : asorts) {
            auto ts = terms(ctx, sort, opts.term_depth);
            for (size_t i = 0; i < ts.size() && out.size() <= opts.per_level_cap; ++i)
                for (size_t j = 0; j < ts.size(); ++j) {
                    out.push_back(fdist(ts[i], ts[j]));
                    if (out.size() > opts.per_level_cap) break;
                }
        }
        for (int id = 0; id < sig.symbol_count(); ++id) {
            const SymbolDecl& d = sig.symbol(id);
            if (!d.is_predicate) continue;
            std::vector<std::vector<Term>> arglists;
            bool feasible = true;
            for (const auto& as : d.arg_sorts) {
                arglists.push_back(terms(ctx, as, opts.term_depth));
                if (arglists.back().empty()) feasible = false;
            }
            if (!feasible || d.arg_sorts.empty()) continue;
            std::vector<size_t> idx(d.arg_sorts.size(), 0);
            while (out.size() <= opts.per_level_cap) {
                std::vector<Term> args;
                for (size_t j = 0; j < idx.size(); ++j) args.push_back(arglists[j][idx[j]]);
                Formula a = fatom(d.name, std::move(args));
                a.symbol = id;
                out.push_back(std::move(a));
                size_t j = idx.size();
                while (j > 0) {
                    --j;
                    if (++idx[j] < arglists[j].size()) break;
                    idx[j] = 0;
                    if (j == 0) goto done;
                }
            }
        done:;
        }
        if (opts.include_consts) {
            out.push_back(fconst(Rat(0)));
            out.push_back(fconst(Rat(1)));
        }
        return out;
    }

    std::string fresh_var(const Ctx& ctx) const {
        int k = 1;
        while (true) {
            std::string name = "q" + std::to_string(k);
            bool taken = false;
            for (const auto& [v, s] : ctx)
                if (v == name) taken = true;
            if (!taken) return name;
            ++k;
        }
    }

    // formulas of depth exactly d in the given context
    std::vector<Formula> level(int d, const Ctx& ctx) {
        std::string key = ctx_key(ctx) + "#" + std::to_string(d);
        auto mit = level_memo.find(key);
        if (mit != level_memo.end()) return mit->second;
        std::vector<Formula> out;
        if (d <= 1) {
            out = atoms(ctx);
        } else {
            // slice the level budget per connective kind so quantified
            // formulas cannot crowd everything else out
            size_t qcap = opts.per_level_cap / 2;
            size_t ucap = opts.per_level_cap / 10;
            std::string qv = fresh_var(ctx);
            for (const std::string& sort : qsorts) {
                Ctx inner = ctx;
                inner.emplace_back(qv, sort);
                for (const Formula& b : level(d - 1, inner)) {
                    out.push_back(fsup(qv, sort, b));
                    out.push_back(finf(qv, sort, b));
                    if (out.size() > qcap) break;
                }
                if (out.size() > qcap) break;
            }
            std::vector<Formula> pool = all_up_to(d - 2, ctx);
            size_t off = pool.size(); // indices >= off sit at depth d-1
            for (const Formula& f : level(d - 1, ctx)) pool.push_back(f);
            size_t upto = out.size() + ucap;
            for (size_t i = off; i < pool.size() && out.size() <= upto; ++i) {
                if (opts.allow_half) out.push_back(fhalf(pool[i]));
                out.push_back(fneg(pool[i]));
            }
            // binary connectives, pairs in diagonal blocks so small operands
            // come first; at least one side must sit at depth d-1
            auto push_pair = [&](size_t i, size_t j) {
                if (i < off && j < off) return;
                out.push_back(fsub(pool[i], pool[j]));
                out.push_back(fadd(pool[i], pool[j]));
                out.push_back(fmin(pool[i], pool[j]));
                out.push_back(fmax(pool[i], pool[j]));
                out.push_back(fabsdiff(pool[i], pool[j]));
            };
            for (size_t m = 0; m < pool.size() && out.size() <= opts.per_level_cap; ++m) {
                for (size_t i = 0; i < m; ++i) push_pair(i, m);
                for (size_t j = 0; j <= m; ++j) push_pair(m, j);
            }
        }
        // dedup by printed form, keep first occurrences
        std::set<std::string> seen;
        std::vector<Formula> dedup;
        for (Formula& fml : out) {
            std::string p = print_formula(fml);
            if (seen.insert(p).second) dedup.push_back(std::move(fml));
            if (dedup.size() >= opts.per_level_cap) break;
        }
        level_memo[key] = dedup;
        return dedup;
    }

    std::vector<Formula> all_up_to(int d, const Ctx& ctx) {
        std::vector<Formula> out;
        for (int k = 1; k <= d; ++k)
            for (const Formula& f : level(k, ctx)) out.push_back(f);
        return out;
    }
};

} // namespace

std::vector<Formula> enum_formulas(const Signature& sig,
                                   const std::vector<std::pair<std::string, std::string>>& vars,
                                   const EnumOptions& opts) {
    if (opts.max_depth < 1 || opts.max_depth > 4)
        throw input_error("enum_formulas supports depth 1..4");
    Enumerator e(sig, opts);
    Ctx ctx = vars;
    std::vector<Formula> out;
    std::set<std::string> seen;
    for (int d = 1; d <= opts.max_depth && out.size() < opts.total_cap; ++d)
        for (Formula& f : e.level(d, ctx)) {
            std::string p = print_formula(f);
            if (!seen.insert(p).second) continue;
            resolve_formula(f, sig);
            out.push_back(std::move(f));
            if (out.size() >= opts.total_cap) break;
        }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

struct RandomGen {
    const Signature& sig;
    const RandomFormulaOptions& opts;
    std::mt19937_64 rng;
    std::vector<std::string> asorts;
    std::vector<std::string> qsorts;

    RandomGen(const Signature& s, const RandomFormulaOptions& o) : sig(s), opts(o), rng(o.seed) {
        for (const Sort& srt : sig.sorts()) {
            asorts.push_back(srt.name);
            if (srt.kind != SortKind::HilbertBall) qsorts.push_back(srt.name);
        }
    }

    size_t pick(size_t n) { return static_cast<size_t>(rng() % n); }

    std::optional<Term> random_term(const Ctx& ctx, const std::string& sort, int depth) {
        std::vector<Term> base;
        for (const auto& [v, s] : ctx)
            if (s == sort) {
                Term t = Term::var(v);
                t.sort = sort;
                base.push_back(t);
            }
        for (int id = 0; id < sig.symbol_count(); ++id) {
            const SymbolDecl& d = sig.symbol(id);
            if (!d.is_predicate && d.arg_sorts.empty() && d.result_sort == sort) {
                Term t = Term::app(d.name);
                t.symbol = id;
                t.sort = sort;
                base.push_back(t);
            }
        }
        if (depth > 0 && rng() % 2 == 0) {
            std::vector<int> fns;
            for (int id = 0; id < sig.symbol_count(); ++id) {
                const SymbolDecl& d = sig.symbol(id);
                if (!d.is_predicate && !d.arg_sorts.empty() && d.result_sort == sort)
                    fns.push_back(id);
            }
            if (!fns.empty()) {
                int id = fns[pick(fns.size())];
                const SymbolDecl& d = sig.symbol(id);
                std::vector<Term> args;
                for (const auto& as : d.arg_sorts) {
                    auto a = random_term(ctx, as, depth - 1);
                    if (!a) return base.empty() ? std::nullopt
                                                : std::optional<Term>(base[pick(base.size())]);
                    args.push_back(*a);
                }
                Term t = Term::app(d.name, std::move(args));
                t.symbol = id;
                t.sort = sort;
                return t;
            }
        }
        if (base.empty()) return std::nullopt;
        return base[pick(base.size())];
    }

    std::optional<Formula> random_atom(const Ctx& ctx) {
        for (int attempts = 0; attempts < 8; ++attempts) {
            // distance atoms and predicate atoms with equal weight
            std::vector<int> preds;
            for (int id = 0; id < sig.symbol_count(); ++id)
                if (sig.symbol(id).is_predicate && !sig.symbol(id).arg_sorts.empty())
                    preds.push_back(id);
            bool use_pred = !preds.empty() && rng() % 2 == 0;
            if (use_pred) {
                int id = preds[pick(preds.size())];
                const SymbolDecl& d = sig.symbol(id);
                std::vector<Term> args;
                bool ok = true;
                for (const auto& as : d.arg_sorts) {
                    auto t = random_term(ctx, as, opts.term_depth);
                    if (!t) ok = false;
                    else args.push_back(*t);
                }
                if (!ok) continue;
                Formula a = fatom(d.name, std::move(args));
                a.symbol = id;
                return a;
            }
            const std::string& sort = asorts[pick(asorts.size())];
            auto t1 = random_term(ctx, sort, opts.term_depth);
            auto t2 = random_term(ctx, sort, opts.term_depth);
            if (t1 && t2) return fdist(*t1, *t2);
        }
        return std::nullopt;
    }

    Formula gen(const Ctx& ctx, int depth, bool must_quantify) {
        if (depth <= 1) {
            if (!must_quantify) {
                auto a = random_atom(ctx);
                if (a) {
                    if (rng() % 8 == 0)
                        return fconst(opts.consts_01_only ? Rat(static_cast<long>(rng() % 2))
                                                          : Rat(static_cast<long>(rng() % 5), 4));
                    return *a;
                }
            }
            return fconst(Rat(static_cast<long>(rng() % 2)));
        }
        int nkinds = opts.allow_half ? 9 : 8;
        int k = static_cast<int>(rng() % nkinds);
        if (must_quantify && ctx.empty()) k = 0; // need a variable before any atom helps
        if (k <= 1 && qsorts.empty()) k = 2;     // nothing to quantify over
        switch (k) {
            case 0:
            case 1: { // quantifier (double weight)
                std::string v = "q" + std::to_string(ctx.size() + 1);
                const std::string& sort = qsorts[pick(qsorts.size())];
                Ctx inner = ctx;
                inner.emplace_back(v, sort);
                Formula body = gen(inner, depth - 1, false);
                return rng() % 2 ? fsup(v, sort, body) : finf(v, sort, body);
            }
            case 2: return fneg(gen(ctx, depth - 1, must_quantify));
            case 3: return fsub(gen(ctx, depth - 1, must_quantify), gen(ctx, depth - 1, false));
            case 4: return fadd(gen(ctx, depth - 1, must_quantify), gen(ctx, depth - 1, false));
            case 5: return fmin(gen(ctx, depth - 1, must_quantify), gen(ctx, depth - 1, false));
            case 6: return fmax(gen(ctx, depth - 1, must_quantify), gen(ctx, depth - 1, false));
            case 7:
                return fabsdiff(gen(ctx, depth - 1, must_quantify), gen(ctx, depth - 1, false));
            default: return fhalf(gen(ctx, depth - 1, must_quantify));
        }
    }
};

} // namespace

std::vector<Formula> random_formulas(const Signature& sig,
                                     const std::vector<std::pair<std::string, std::string>>& vars,
                                     const RandomFormulaOptions& opts) {
    RandomGen g(sig, opts);
    std::vector<Formula> out;
    while (out.size() < opts.count) {
        Formula f = g.gen(vars, opts.depth, false);
        try {
            resolve_formula(f, sig);
        } catch (const sort_error&) {
            continue; // e.g. a free variable whose sort never got pinned
        }
        out.push_back(std::move(f));
    }
    return out;
}

std::vector<Formula> random_sentences(const Signature& sig, const RandomFormulaOptions& opts) {
    RandomGen g(sig, opts);
    std::vector<Formula> out;
    int guard = 0;
    while (out.size() < opts.count && ++guard < static_cast<int>(opts.count) * 100) {
        Formula f = g.gen({}, opts.depth, true);
        if (!is_closed(f)) continue;
        try {
            resolve_formula(f, sig);
        } catch (const sort_error&) {
            continue;
        }
        out.push_back(std::move(f));
    }
    if (out.size() < opts.count)
        throw input_error("random_sentences could not fill the requested count");
    return out;
}

} // namespace contilog
