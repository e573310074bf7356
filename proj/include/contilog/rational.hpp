#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>

namespace contilog {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

/// Parse "3", "-3/5" or "0.25" into an exact rational.
Rat rat_from_string(const std::string& s);

/// Lowest-terms rendering: "3", "-3/5". Inverse of rat_from_string.
std::string rat_to_string(const Rat& q);

/// Exact conversion (every finite double is p/2^k).
Rat rat_from_double(double x);

double rat_to_double(const Rat& q);

inline Rat rat(long num, long den = 1) { return Rat(num, den); }

struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace contilog
