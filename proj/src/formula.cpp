#include "contilog/formula.hpp"

#include <functional>

namespace contilog {

bool Term::operator==(const Term& o) const {
    return head == o.head && is_var == o.is_var && args == o.args;
}

bool Formula::operator==(const Formula& o) const {
    if (kind != o.kind || cap != o.cap) return false;
    switch (kind) {
        case FKind::Const: return constant == o.constant;
        case FKind::Atomic: return terms == o.terms && symbol == o.symbol;
        case FKind::Dist: return terms == o.terms;
        case FKind::Sup:
        case FKind::Inf:
            return var == o.var && var_sort == o.var_sort && kids == o.kids;
        default: return kids == o.kids;
    }
}

static Formula mk(FKind k, std::vector<Formula> kids) {
    Formula f;
    f.kind = k;
    f.kids = std::move(kids);
    return f;
}

Formula fconst(const Rat& q) {
    Formula f;
    f.kind = FKind::Const;
    f.constant = q;
    return f;
}
Formula fatom(const std::string& pred, std::vector<Term> args) {
    Formula f;
    f.kind = FKind::Atomic;
    f.terms = std::move(args);
    f.var = pred; // Atomic nodes keep the predicate name in `var`
    return f;
}
Formula fdist(Term a, Term b) {
    Formula f;
    f.kind = FKind::Dist;
    f.terms = {std::move(a), std::move(b)};
    return f;
}
Formula fhalf(Formula a) { return mk(FKind::Half, {std::move(a)}); }
Formula fneg(Formula a) { return mk(FKind::Neg, {std::move(a)}); }
Formula fsub(Formula a, Formula b) { return mk(FKind::Sub, {std::move(a), std::move(b)}); }
Formula fadd(Formula a, Formula b) { return mk(FKind::Add, {std::move(a), std::move(b)}); }
Formula fmin(Formula a, Formula b) { return mk(FKind::Min, {std::move(a), std::move(b)}); }
Formula fmax(Formula a, Formula b) { return mk(FKind::Max, {std::move(a), std::move(b)}); }
Formula fabsdiff(Formula a, Formula b) { return mk(FKind::AbsDiff, {std::move(a), std::move(b)}); }
Formula fsup(const std::string& var, const std::string& sort, Formula body) {
    Formula f = mk(FKind::Sup, {std::move(body)});
    f.var = var;
    f.var_sort = sort;
    return f;
}
Formula finf(const std::string& var, const std::string& sort, Formula body) {
    Formula f = mk(FKind::Inf, {std::move(body)});
    f.var = var;
    f.var_sort = sort;
    return f;
}

std::string print_term(const Term& t) {
    if (t.is_var || t.args.empty()) return t.head; // nullary applications print bare
    std::string s = t.head + "(";
    for (size_t i = 0; i < t.args.size(); ++i) {
        if (i) s += ",";
        s += print_term(t.args[i]);
    }
    return s + ")";
}

std::string print_formula(const Formula& f) {
    auto bin = [&](const char* op) {
        return std::string(op) + "(" + print_formula(f.kids[0]) + "," +
               print_formula(f.kids[1]) + ")";
    };
    switch (f.kind) {
        case FKind::Const: return rat_to_string(f.constant);
        case FKind::Atomic: {
            std::string s = f.var + "(";
            for (size_t i = 0; i < f.terms.size(); ++i) {
                if (i) s += ",";
                s += print_term(f.terms[i]);
            }
            return s + ")";
        }
        case FKind::Dist:
            return "d(" + print_term(f.terms[0]) + "," + print_term(f.terms[1]) + ")";
        case FKind::Half: return "half(" + print_formula(f.kids[0]) + ")";
        case FKind::Neg: return "not(" + print_formula(f.kids[0]) + ")";
        case FKind::Sub: return bin("sub");
        case FKind::Add: return bin("add");
        case FKind::Min: return bin("min");
        case FKind::Max: return bin("max");
        case FKind::AbsDiff: return bin("absdiff");
        case FKind::Sup:
            return "sup " + f.var + ":" + f.var_sort + ". " + print_formula(f.kids[0]);
        case FKind::Inf:
            return "inf " + f.var + ":" + f.var_sort + ". " + print_formula(f.kids[0]);
    }
    return "?";
}

namespace {

void collect_free_term(const Term& t, std::vector<std::string>& bound,
                       std::vector<std::pair<std::string, std::string>>& out) {
    if (t.is_var) {
        for (const auto& b : bound)
            if (b == t.head) return;
        for (const auto& [v, s] : out)
            if (v == t.head) return;
        out.emplace_back(t.head, t.sort);
        return;
    }
    for (const Term& a : t.args) collect_free_term(a, bound, out);
}

void collect_free(const Formula& f, std::vector<std::string>& bound,
                  std::vector<std::pair<std::string, std::string>>& out) {
    for (const Term& t : f.terms) collect_free_term(t, bound, out);
    if (f.kind == FKind::Sup || f.kind == FKind::Inf) {
        bound.push_back(f.var);
        collect_free(f.kids[0], bound, out);
        bound.pop_back();
        return;
    }
    for (const Formula& k : f.kids) collect_free(k, bound, out);
}

} // namespace

std::vector<std::pair<std::string, std::string>> free_vars(const Formula& f) {
    std::vector<std::string> bound;
    std::vector<std::pair<std::string, std::string>> out;
    collect_free(f, bound, out);
    return out;
}

bool is_closed(const Formula& f) { return free_vars(f).empty(); }

// ---------------------------------------------------------------------------
// sort checking

namespace {

struct Resolver {
    const Signature& sig;
    std::map<std::string, std::string> free; // inferred free-variable sorts
    bool progress = false;
    std::string pending; // description of the blocking node, for errors

    // returns the term's sort, or "" if not yet determined this pass
    std::string term_sort(Term& t, std::map<std::string, std::string>& scope,
                          const std::string& expected) {
        if (t.is_var) {
            auto it = scope.find(t.head);
            std::string known;
            if (it != scope.end()) known = it->second;
            else {
                auto fit = free.find(t.head);
                if (fit != free.end()) known = fit->second;
            }
            if (!known.empty()) {
                if (!expected.empty() && expected != known)
                    throw sort_error("variable " + t.head + " used at sort " + expected +
                                     " but has sort " + known);
                t.sort = known;
                return known;
            }
            if (!expected.empty()) {
                free[t.head] = expected;
                t.sort = expected;
                progress = true;
                return expected;
            }
            if (sig.sorts().size() == 1) {
                free[t.head] = sig.sorts()[0].name;
                t.sort = free[t.head];
                progress = true;
                return t.sort;
            }
            pending = "variable " + t.head + " has no determinable sort";
            return "";
        }
        // application
        const auto& cands = sig.candidates(t.head);
        if (cands.empty()) throw sort_error("unknown symbol: " + t.head);
        std::vector<int> fits;
        for (int id : cands) {
            const SymbolDecl& d = sig.symbol(id);
            if (d.is_predicate) continue;
            if (d.arg_sorts.size() != t.args.size()) continue;
            if (!expected.empty() && d.result_sort != expected) continue;
            fits.push_back(id);
        }
        if (fits.empty()) {
            bool arity_issue = true;
            for (int id : cands)
                if (!sig.symbol(id).is_predicate &&
                    sig.symbol(id).arg_sorts.size() == t.args.size())
                    arity_issue = false;
            if (arity_issue)
                throw sort_error("arity error: " + t.head + " applied to " +
                                 std::to_string(t.args.size()) + " argument(s)");
            throw sort_error("no overload of " + t.head + " fits at sort " + expected);
        }
        // narrow by already-known argument sorts
        std::vector<std::string> known(t.args.size());
        for (size_t i = 0; i < t.args.size(); ++i)
            known[i] = term_sort(t.args[i], scope, "");
        std::vector<int> narrowed;
        for (int id : fits) {
            const SymbolDecl& d = sig.symbol(id);
            bool ok = true;
            for (size_t i = 0; i < t.args.size(); ++i)
                if (!known[i].empty() && known[i] != d.arg_sorts[i]) ok = false;
            if (ok) narrowed.push_back(id);
        }
        if (narrowed.empty())
            throw sort_error("sort mismatch in arguments of " + t.head);
        if (narrowed.size() > 1) {
            pending = "ambiguous overload of " + t.head;
            return ""; // maybe resolvable on a later pass
        }
        const SymbolDecl& d = sig.symbol(narrowed[0]);
        for (size_t i = 0; i < t.args.size(); ++i)
            term_sort(t.args[i], scope, d.arg_sorts[i]);
        t.symbol = narrowed[0];
        t.sort = d.result_sort;
        return t.sort;
    }

    bool formula(Formula& f, std::map<std::string, std::string>& scope, const Rat& cap) {
        switch (f.kind) {
            case FKind::Const:
                if (f.constant < 0 || f.constant > cap)
                    throw sort_error("constant " + rat_to_string(f.constant) +
                                     " outside [0," + rat_to_string(cap) + "]");
                return true;
            case FKind::Dist: {
                std::string s0 = term_sort(f.terms[0], scope, "");
                std::string s1 = term_sort(f.terms[1], scope, "");
                if (s0.empty() && s1.empty()) return false;
                if (s0.empty()) s0 = term_sort(f.terms[0], scope, s1);
                if (s1.empty()) s1 = term_sort(f.terms[1], scope, s0);
                if (s0.empty() || s1.empty()) return false;
                if (s0 != s1)
                    throw sort_error("d applied across sorts " + s0 + " and " + s1);
                return true;
            }
            case FKind::Atomic: {
                const std::string& name = f.var;
                const auto& cands = sig.candidates(name);
                if (cands.empty()) throw sort_error("unknown symbol: " + name);
                std::vector<int> fits;
                for (int id : cands) {
                    const SymbolDecl& d = sig.symbol(id);
                    if (!d.is_predicate) continue;
                    if (d.arg_sorts.size() != f.terms.size()) continue;
                    fits.push_back(id);
                }
                if (fits.empty())
                    throw sort_error("arity error or non-predicate use of " + name);
                std::vector<std::string> known(f.terms.size());
                for (size_t i = 0; i < f.terms.size(); ++i)
                    known[i] = term_sort(f.terms[i], scope, "");
                std::vector<int> narrowed;
                for (int id : fits) {
                    const SymbolDecl& d = sig.symbol(id);
                    bool ok = true;
                    for (size_t i = 0; i < f.terms.size(); ++i)
                        if (!known[i].empty() && known[i] != d.arg_sorts[i]) ok = false;
                    if (ok) narrowed.push_back(id);
                }
                if (narrowed.empty())
                    throw sort_error("sort mismatch in arguments of " + name);
                if (narrowed.size() > 1) {
                    pending = "ambiguous overload of " + name;
                    return false;
                }
                const SymbolDecl& d = sig.symbol(narrowed[0]);
                bool done = true;
                for (size_t i = 0; i < f.terms.size(); ++i)
                    if (term_sort(f.terms[i], scope, d.arg_sorts[i]).empty()) done = false;
                f.symbol = narrowed[0];
                return done;
            }
            case FKind::Sup:
            case FKind::Inf: {
                if (!sig.has_sort(f.var_sort))
                    throw sort_error("unknown sort in quantifier: " + f.var_sort);
                auto saved = scope.find(f.var) != scope.end()
                                 ? std::optional<std::string>(scope[f.var])
                                 : std::nullopt;
                scope[f.var] = f.var_sort;
                bool ok = formula(f.kids[0], scope, cap);
                if (saved) scope[f.var] = *saved;
                else scope.erase(f.var);
                return ok;
            }
            default: {
                bool ok = true;
                for (Formula& k : f.kids)
                    if (!formula(k, scope, cap)) ok = false;
                return ok;
            }
        }
    }
};

void set_caps(Formula& f, const Rat& cap) {
    f.cap = cap;
    for (Formula& k : f.kids) set_caps(k, cap);
}

} // namespace

void resolve_formula(Formula& f, const Signature& sig) {
    set_caps(f, f.cap);
    Resolver r{sig, {}, false, {}};
    // iterate to a fixpoint: sort information can flow between sibling
    // occurrences of a free variable
    for (int pass = 0; pass < 8; ++pass) {
        r.progress = false;
        r.pending.clear();
        std::map<std::string, std::string> scope;
        if (r.formula(f, scope, f.cap)) return;
        if (!r.progress)
            throw sort_error(r.pending.empty() ? "unresolved formula" : r.pending);
    }
    throw sort_error("sort inference did not converge");
}

} // namespace contilog
