#pragma once

#include "contilog/modulus.hpp"
#include "contilog/rational.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace contilog {

enum class SortKind { Finite, HilbertBall, TreeBall };

struct Sort {
    std::string name;
    Rat diameter = 1;
    SortKind kind = SortKind::Finite;
    std::optional<int> ball_index; // present iff kind is a tower kind
};

/// Declaration of a function or predicate symbol. Functions carry a result
/// sort; predicates carry a closed rational range. One continuity modulus
/// per argument. Symbols may be overloaded across argument-sort profiles
/// (towers declare norm, inclusions, etc. once per ball).
struct SymbolDecl {
    std::string name;
    std::vector<std::string> arg_sorts;
    bool is_predicate = false;
    std::string result_sort; // functions only
    Rat range_lo = 0, range_hi = 1; // predicates only
    std::vector<Modulus> moduli;
};

class Signature {
public:
    int add_sort(Sort s);
    int add_function(const std::string& name, std::vector<std::string> args,
                     const std::string& result, std::vector<Modulus> moduli = {});
    int add_predicate(const std::string& name, std::vector<std::string> args,
                      const Rat& lo, const Rat& hi, std::vector<Modulus> moduli = {});

    bool has_sort(const std::string& name) const;
    const Sort& sort(const std::string& name) const;
    const std::vector<Sort>& sorts() const { return sorts_; }

    const SymbolDecl& symbol(int id) const { return symbols_.at(id); }
    int symbol_count() const { return static_cast<int>(symbols_.size()); }
    /// All declarations sharing this name (overload set); empty if unknown.
    const std::vector<int>& candidates(const std::string& name) const;
    /// Exact overload lookup by argument sorts.
    std::optional<int> resolve(const std::string& name,
                               const std::vector<std::string>& arg_sorts) const;
    bool has_symbol(const std::string& name) const;

    bool operator==(const Signature& o) const;

private:
    std::vector<Sort> sorts_;
    std::map<std::string, int> sort_index_;
    std::vector<SymbolDecl> symbols_;
    std::map<std::string, std::vector<int>> by_name_;
    static const std::vector<int> kEmpty;
};

/// The sort map nu for group-on-space actions: act : K_n x B_m -> B_nu(n,m).
struct SortMapNu {
    std::map<std::pair<int, int>, int> table;

    int operator()(int n, int m) const;
    bool has(int n, int m) const { return table.count({n, m}) > 0; }
    /// Throws unless nu is nondecreasing in each argument.
    void validate() const;
};

} // namespace contilog
