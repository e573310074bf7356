#include "contilog/signature.hpp"

namespace contilog {

const std::vector<int> Signature::kEmpty{};

int Signature::add_sort(Sort s) {
    if (sort_index_.count(s.name)) throw input_error("duplicate sort: " + s.name);
    if (s.diameter <= 0) throw input_error("sort diameter must be positive: " + s.name);
    bool tower = s.kind != SortKind::Finite;
    if (tower != s.ball_index.has_value())
        throw input_error("ball index must be present exactly for tower sorts: " + s.name);
    sorts_.push_back(std::move(s));
    sort_index_[sorts_.back().name] = static_cast<int>(sorts_.size()) - 1;
    return static_cast<int>(sorts_.size()) - 1;
}

static void fill_moduli(std::vector<Modulus>& moduli, size_t arity) {
    if (moduli.empty()) moduli.assign(arity, Modulus::id());
    if (moduli.size() != arity)
        throw input_error("modulus count does not match arity");
}

int Signature::add_function(const std::string& name, std::vector<std::string> args,
                            const std::string& result, std::vector<Modulus> moduli) {
    for (const auto& a : args)
        if (!has_sort(a)) throw input_error("unknown sort in declaration of " + name + ": " + a);
    if (!has_sort(result)) throw input_error("unknown result sort of " + name + ": " + result);
    if (resolve(name, args)) throw input_error("duplicate declaration: " + name);
    fill_moduli(moduli, args.size());
    SymbolDecl d;
    d.name = name;
    d.arg_sorts = std::move(args);
    d.is_predicate = false;
    d.result_sort = result;
    d.moduli = std::move(moduli);
    symbols_.push_back(std::move(d));
    int id = static_cast<int>(symbols_.size()) - 1;
    by_name_[name].push_back(id);
    return id;
}

int Signature::add_predicate(const std::string& name, std::vector<std::string> args,
                             const Rat& lo, const Rat& hi, std::vector<Modulus> moduli) {
    for (const auto& a : args)
        if (!has_sort(a)) throw input_error("unknown sort in declaration of " + name + ": " + a);
    if (lo > hi) throw input_error("predicate range is empty: " + name);
    if (resolve(name, args)) throw input_error("duplicate declaration: " + name);
    fill_moduli(moduli, args.size());
    SymbolDecl d;
    d.name = name;
    d.arg_sorts = std::move(args);
    d.is_predicate = true;
    d.range_lo = lo;
    d.range_hi = hi;
    d.moduli = std::move(moduli);
    symbols_.push_back(std::move(d));
    int id = static_cast<int>(symbols_.size()) - 1;
    by_name_[name].push_back(id);
    return id;
}

bool Signature::has_sort(const std::string& name) const { return sort_index_.count(name) > 0; }

const Sort& Signature::sort(const std::string& name) const {
    auto it = sort_index_.find(name);
    if (it == sort_index_.end()) throw input_error("unknown sort: " + name);
    return sorts_[it->second];
}

const std::vector<int>& Signature::candidates(const std::string& name) const {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? kEmpty : it->second;
}

std::optional<int> Signature::resolve(const std::string& name,
                                      const std::vector<std::string>& arg_sorts) const {
    for (int id : candidates(name))
        if (symbols_[id].arg_sorts == arg_sorts) return id;
    return std::nullopt;
}

bool Signature::has_symbol(const std::string& name) const { return by_name_.count(name) > 0; }

bool Signature::operator==(const Signature& o) const {
    if (sorts_.size() != o.sorts_.size() || symbols_.size() != o.symbols_.size()) return false;
    for (size_t i = 0; i < sorts_.size(); ++i) {
        const Sort &a = sorts_[i], &b = o.sorts_[i];
        if (a.name != b.name || a.diameter != b.diameter || a.kind != b.kind ||
            a.ball_index != b.ball_index)
            return false;
    }
    for (size_t i = 0; i < symbols_.size(); ++i) {
        const SymbolDecl &a = symbols_[i], &b = o.symbols_[i];
        if (a.name != b.name || a.arg_sorts != b.arg_sorts || a.is_predicate != b.is_predicate)
            return false;
        if (!a.is_predicate && a.result_sort != b.result_sort) return false;
        if (a.is_predicate && (a.range_lo != b.range_lo || a.range_hi != b.range_hi)) return false;
        if (!(a.moduli == b.moduli)) return false;
    }
    return true;
}

int SortMapNu::operator()(int n, int m) const {
    auto it = table.find({n, m});
    if (it == table.end()) throw input_error("nu undefined at (" + std::to_string(n) + "," +
                                             std::to_string(m) + ")");
    return it->second;
}

void SortMapNu::validate() const {
    for (const auto& [nm, v] : table) {
        auto [n, m] = nm;
        (void)v;
        auto up_n = table.find({n + 1, m});
        if (up_n != table.end() && up_n->second < v)
            throw input_error("nu must be nondecreasing in the first argument");
        auto up_m = table.find({n, m + 1});
        if (up_m != table.end() && up_m->second < v)
            throw input_error("nu must be nondecreasing in the second argument");
    }
}

} // namespace contilog
