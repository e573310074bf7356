#include "contilog/analysis.hpp"

#include <algorithm>
#include <optional>
#include <set>

namespace contilog {

namespace {

// chain: modulus accumulated from the atomic symbol down to this term
void term_occurrences(const Term& t, const Signature& sig, const Modulus& chain,
                      std::map<std::string, std::vector<Modulus>>& occ) {
    if (t.is_var) {
        occ[t.head].push_back(chain);
        return;
    }
    if (t.symbol < 0) throw input_error("derived_modulus requires a sort-checked formula");
    const SymbolDecl& d = sig.symbol(t.symbol);
    for (size_t i = 0; i < t.args.size(); ++i)
        term_occurrences(t.args[i], sig, Modulus::compose(d.moduli[i], chain), occ);
}

struct ModInfo {
    std::optional<Modulus> mod; // absent when no variable occurs
    std::set<std::string> vars;
};

// A variable occurring m times in one atom contributes additively through
// every occurrence, so each occurrence chain is tightened to gamma(eps/m).
ModInfo atom_info(const std::map<std::string, std::vector<Modulus>>& occ) {
    ModInfo r;
    for (const auto& [var, chains] : occ) {
        r.vars.insert(var);
        Modulus share = Modulus::linear(Rat(1, static_cast<long>(chains.size())));
        for (const Modulus& chain : chains) {
            Modulus tightened = chains.size() > 1 ? Modulus::compose(chain, share) : chain;
            r.mod = r.mod ? Modulus::pointwise_min(*r.mod, tightened) : tightened;
        }
    }
    return r;
}

// Sound modulus calculus: min/max are 1-Lipschitz in the sup norm, so they
// take the pointwise minimum; add, sub and absdiff can double a shared
// variable's influence, so each side is tightened to gamma(eps/2) whenever
// the sides share a variable.
ModInfo walk(const Formula& f, const Signature& sig) {
    switch (f.kind) {
        case FKind::Const:
            return {};
        case FKind::Dist: {
            std::map<std::string, std::vector<Modulus>> occ;
            for (const Term& t : f.terms) term_occurrences(t, sig, Modulus::id(), occ);
            return atom_info(occ);
        }
        case FKind::Atomic: {
            if (f.symbol < 0)
                throw input_error("derived_modulus requires a sort-checked formula");
            const SymbolDecl& d = sig.symbol(f.symbol);
            std::map<std::string, std::vector<Modulus>> occ;
            for (size_t i = 0; i < f.terms.size(); ++i)
                term_occurrences(f.terms[i], sig, d.moduli[i], occ);
            return atom_info(occ);
        }
        case FKind::Half:
        case FKind::Neg:
            return walk(f.kids[0], sig);
        case FKind::Sup:
        case FKind::Inf: {
            ModInfo r = walk(f.kids[0], sig);
            r.vars.erase(f.var);
            return r;
        }
        case FKind::Min:
        case FKind::Max: {
            ModInfo a = walk(f.kids[0], sig);
            ModInfo b = walk(f.kids[1], sig);
            ModInfo r;
            r.vars = a.vars;
            r.vars.insert(b.vars.begin(), b.vars.end());
            if (a.mod && b.mod) r.mod = Modulus::pointwise_min(*a.mod, *b.mod);
            else r.mod = a.mod ? a.mod : b.mod;
            return r;
        }
        case FKind::Sub:
        case FKind::Add:
        case FKind::AbsDiff: {
            ModInfo a = walk(f.kids[0], sig);
            ModInfo b = walk(f.kids[1], sig);
            bool shared = false;
            for (const auto& v : a.vars)
                if (b.vars.count(v)) shared = true;
            ModInfo r;
            r.vars = a.vars;
            r.vars.insert(b.vars.begin(), b.vars.end());
            const Modulus half_eps = Modulus::linear(Rat(1, 2));
            auto tighten = [&](const Modulus& m) {
                return shared ? Modulus::compose(m, half_eps) : m;
            };
            if (a.mod && b.mod)
                r.mod = Modulus::pointwise_min(tighten(*a.mod), tighten(*b.mod));
            else if (a.mod)
                r.mod = *a.mod; // the other side is constant in every variable
            else if (b.mod)
                r.mod = *b.mod;
            return r;
        }
    }
    return {};
}

} // namespace

Modulus derived_modulus(const Formula& f, const Signature& sig) {
    ModInfo r = walk(f, sig);
    return r.mod ? *r.mod : Modulus::id();
}

std::pair<Rat, Rat> static_range(const Formula& f, const Signature& sig) {
    const Rat& C = f.cap;
    switch (f.kind) {
        case FKind::Const: return {f.constant, f.constant};
        case FKind::Dist: {
            const Rat& diam = sig.sort(f.terms[0].sort.empty()
                                           ? f.terms[1].sort
                                           : f.terms[0].sort).diameter;
            return {Rat(0), diam};
        }
        case FKind::Atomic: {
            const SymbolDecl& d = sig.symbol(f.symbol);
            return {d.range_lo, d.range_hi};
        }
        case FKind::Half: {
            auto [lo, hi] = static_range(f.kids[0], sig);
            return {Rat(lo / 2), Rat(hi / 2)};
        }
        case FKind::Neg: {
            auto [lo, hi] = static_range(f.kids[0], sig);
            return {Rat(C - hi), Rat(C - lo)};
        }
        case FKind::Sub: {
            auto [alo, ahi] = static_range(f.kids[0], sig);
            auto [blo, bhi] = static_range(f.kids[1], sig);
            return {std::max(Rat(alo - bhi), Rat(0)), std::max(Rat(ahi - blo), Rat(0))};
        }
        case FKind::Add: {
            auto [alo, ahi] = static_range(f.kids[0], sig);
            auto [blo, bhi] = static_range(f.kids[1], sig);
            return {std::min(Rat(alo + blo), C), std::min(Rat(ahi + bhi), C)};
        }
        case FKind::Min: {
            auto [alo, ahi] = static_range(f.kids[0], sig);
            auto [blo, bhi] = static_range(f.kids[1], sig);
            return {std::min(alo, blo), std::min(ahi, bhi)};
        }
        case FKind::Max: {
            auto [alo, ahi] = static_range(f.kids[0], sig);
            auto [blo, bhi] = static_range(f.kids[1], sig);
            return {std::max(alo, blo), std::max(ahi, bhi)};
        }
        case FKind::AbsDiff: {
            auto [alo, ahi] = static_range(f.kids[0], sig);
            auto [blo, bhi] = static_range(f.kids[1], sig);
            Rat lo = 0;
            if (alo > bhi) lo = Rat(alo - bhi);
            if (blo > ahi) lo = Rat(blo - ahi);
            Rat hi = std::max(Rat(ahi - blo), Rat(bhi - alo));
            if (hi < 0) hi = 0;
            return {lo, hi};
        }
        case FKind::Sup:
        case FKind::Inf: return static_range(f.kids[0], sig);
    }
    return {Rat(0), C};
}

namespace {

void check_caps(const Formula& f, const Signature& sig, std::vector<std::string>& out) {
    auto [lo, hi] = static_range(f, sig);
    if (lo < 0 || hi > f.cap) {
        std::string why = f.kind == FKind::Neg ? "negation of a range exceeding the cap"
                                               : "range escapes [0,cap]";
        out.push_back(why + ": " + print_formula(f) + " in [" + rat_to_string(lo) + "," +
                      rat_to_string(hi) + "], cap " + rat_to_string(f.cap));
    }
    for (const Formula& k : f.kids) check_caps(k, sig, out);
}

} // namespace

std::vector<std::string> cap_violations(const Formula& f, const Signature& sig) {
    std::vector<std::string> out;
    check_caps(f, sig, out);
    return out;
}

} // namespace contilog
