#include "contilog/parser.hpp"

#include <cctype>

namespace contilog {

namespace {

struct Lexer {
    const std::string& s;
    size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= s.size();
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }
    void expect(char c) {
        skip_ws();
        if (pos >= s.size() || s[pos] != c)
            throw parse_error(std::string("expected '") + c + "'", pos);
        ++pos;
    }
    bool accept(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
    bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

    std::string ident() {
        skip_ws();
        if (pos >= s.size() || !ident_start(s[pos]))
            throw parse_error("expected identifier", pos);
        size_t start = pos;
        while (pos < s.size() && ident_char(s[pos])) ++pos;
        return s.substr(start, pos - start);
    }

    bool at_number() {
        skip_ws();
        return pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]));
    }

    std::string number() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos < s.size() && s[pos] == '.') {
            ++pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        } else if (pos < s.size() && s[pos] == '/') {
            ++pos;
            if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
                throw parse_error("expected denominator digits", pos);
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        }
        return s.substr(start, pos - start);
    }
};

struct Parser {
    Lexer lex;

    Term term() {
        size_t at = lex.pos;
        std::string head;
        if (lex.at_number()) {
            // a number in term position names a constant symbol, e.g. the unit 1
            lex.skip_ws();
            size_t start = lex.pos;
            while (lex.pos < lex.s.size() &&
                   std::isdigit(static_cast<unsigned char>(lex.s[lex.pos])))
                ++lex.pos;
            head = lex.s.substr(start, lex.pos - start);
        } else {
            head = lex.ident();
        }
        (void)at;
        if (lex.accept('(')) {
            std::vector<Term> args;
            args.push_back(term());
            while (lex.accept(',')) args.push_back(term());
            lex.expect(')');
            return Term::app(head, std::move(args));
        }
        return Term::app(head); // variable vs nullary symbol settled at resolution
    }

    Formula binary(FKind k) {
        lex.expect('(');
        Formula a = formula();
        lex.expect(',');
        Formula b = formula();
        lex.expect(')');
        Formula f;
        f.kind = k;
        f.kids = {std::move(a), std::move(b)};
        return f;
    }

    Formula formula() {
        if (lex.at_number()) return fconst(rat_from_string(lex.number()));
        size_t at = lex.pos;
        std::string head = lex.ident();
        if (head == "sup" || head == "inf") {
            std::string v = lex.ident();
            lex.expect(':');
            std::string sort = lex.ident();
            lex.expect('.');
            Formula body = formula();
            return head == "sup" ? fsup(v, sort, std::move(body))
                                 : finf(v, sort, std::move(body));
        }
        if (head == "half" || head == "not") {
            lex.expect('(');
            Formula a = formula();
            lex.expect(')');
            Formula f;
            f.kind = head == "half" ? FKind::Half : FKind::Neg;
            f.kids = {std::move(a)};
            return f;
        }
        if (head == "sub") return binary(FKind::Sub);
        if (head == "add") return binary(FKind::Add);
        if (head == "min") return binary(FKind::Min);
        if (head == "max") return binary(FKind::Max);
        if (head == "absdiff") return binary(FKind::AbsDiff);
        if (head == "d") {
            lex.expect('(');
            Term a = term();
            lex.expect(',');
            Term b = term();
            lex.expect(')');
            return fdist(std::move(a), std::move(b));
        }
        // predicate atom
        if (!lex.accept('('))
            throw parse_error("expected a formula, found bare identifier '" + head + "'", at);
        std::vector<Term> args;
        args.push_back(term());
        while (lex.accept(',')) args.push_back(term());
        lex.expect(')');
        return fatom(head, std::move(args));
    }
};

// Bare term heads become variables unless they name a nullary function
// symbol; a quantified variable shadows any constant of the same name.
void mark_variables(Term& t, const Signature& sig, std::vector<std::string>& bound) {
    for (Term& a : t.args) mark_variables(a, sig, bound);
    if (t.args.empty()) {
        for (const auto& b : bound)
            if (b == t.head) {
                t.is_var = true;
                return;
            }
        bool is_function = false;
        for (int id : sig.candidates(t.head))
            if (!sig.symbol(id).is_predicate && sig.symbol(id).arg_sorts.empty())
                is_function = true;
        t.is_var = !is_function;
    }
}

void mark_variables(Formula& f, const Signature& sig, std::vector<std::string>& bound) {
    for (Term& t : f.terms) mark_variables(t, sig, bound);
    if (f.kind == FKind::Sup || f.kind == FKind::Inf) {
        bound.push_back(f.var);
        mark_variables(f.kids[0], sig, bound);
        bound.pop_back();
        return;
    }
    for (Formula& k : f.kids) mark_variables(k, sig, bound);
}

} // namespace

Formula parse_formula(const std::string& text, const Signature& sig, const Rat& cap) {
    Parser p{Lexer{text}};
    Formula f = p.formula();
    if (!p.lex.eof()) throw parse_error("trailing input", p.lex.pos);
    std::vector<std::string> bound;
    mark_variables(f, sig, bound);
    f.cap = cap;
    resolve_formula(f, sig);
    return f;
}

} // namespace contilog
