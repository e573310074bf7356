#include "contilog/rational.hpp"

#include <cmath>
#include <cstdlib>

namespace contilog {

Rat rat_from_string(const std::string& s) {
    if (s.empty()) throw input_error("empty rational literal");
    std::string t = s;
    bool neg = false;
    size_t i = 0;
    if (t[0] == '-') { neg = true; i = 1; }
    else if (t[0] == '+') { i = 1; }
    auto digits = [&](size_t& p) {
        size_t start = p;
        while (p < t.size() && std::isdigit(static_cast<unsigned char>(t[p]))) ++p;
        if (p == start) throw input_error("bad rational literal: " + s);
        return t.substr(start, p - start);
    };
    std::string intpart = digits(i);
    BigInt num(intpart);
    BigInt den(1);
    if (i < t.size() && t[i] == '.') {
        ++i;
        std::string frac = digits(i);
        for (char c : frac) {
            num = num * 10 + (c - '0');
            den *= 10;
        }
    } else if (i < t.size() && t[i] == '/') {
        ++i;
        std::string d = digits(i);
        den = BigInt(d);
        if (den == 0) throw input_error("zero denominator: " + s);
    }
    if (i != t.size()) throw input_error("bad rational literal: " + s);
    Rat q(num, den);
    return neg ? Rat(-q) : q;
}

std::string rat_to_string(const Rat& q) {
    std::string n = numerator(q).str();
    if (denominator(q) == 1) return n;
    return n + "/" + denominator(q).str();
}

Rat rat_from_double(double x) {
    if (!std::isfinite(x)) throw input_error("non-finite value");
    if (x == 0.0) return Rat(0);
    int exp = 0;
    double m = std::frexp(x, &exp); // x = m * 2^exp, 0.5 <= |m| < 1
    // 53 bits of mantissa
    long long mi = static_cast<long long>(std::ldexp(m, 53));
    exp -= 53;
    Rat q(mi);
    if (exp >= 0) {
        q *= Rat(BigInt(1) << exp);
    } else {
        q /= Rat(BigInt(1) << (-exp));
    }
    return q;
}

double rat_to_double(const Rat& q) {
    return q.convert_to<double>();
}

} // namespace contilog
