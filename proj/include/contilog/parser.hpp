#pragma once

#include "contilog/formula.hpp"

namespace contilog {

struct parse_error : input_error {
    parse_error(const std::string& msg, size_t pos)
        : input_error(msg + " at offset " + std::to_string(pos)), position(pos) {}
    size_t position;
};

/// Parse the textual grammar
///   formula := rational | atom | "half(" formula ")" | "not(" formula ")"
///            | ("sub"|"add"|"min"|"max"|"absdiff") "(" formula "," formula ")"
///            | ("sup"|"inf") ident ":" ident "." formula
///   atom    := "d(" term "," term ")" | ident "(" term ("," term)* ")"
///   term    := ident | ident "(" term ("," term)* ")"
/// and sort-check the result against `sig`. Numbers in term position are
/// constant symbols ("1" is the group unit); in formula position they are
/// rational literals, accepted as "3", "3/5" or "0.6".
Formula parse_formula(const std::string& text, const Signature& sig, const Rat& cap = 1);

} // namespace contilog
