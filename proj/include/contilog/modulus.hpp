#pragma once

#include "contilog/rational.hpp"

#include <string>
#include <utility>
#include <vector>

namespace contilog {

/// A continuity modulus: a monotone nondecreasing map (0,inf) -> (0,inf),
/// represented piecewise-linearly with rational breakpoints. The map runs
/// linearly from the origin to the first breakpoint and continues past the
/// last breakpoint with the final segment's slope. The family is closed
/// under pointwise minimum and composition, which is all the derived-modulus
/// calculus needs; id and eps/c are the one-segment special cases.
class Modulus {
public:
    static Modulus id();
    /// eps -> eps / c (the modulus of scalar multiplication by c), c > 0.
    static Modulus scale(const Rat& c);
    /// eps -> slope * eps.
    static Modulus linear(const Rat& slope);
    /// General piecewise-linear modulus through the given (x, y) breakpoints.
    static Modulus breakpoints(std::vector<std::pair<Rat, Rat>> pts);

    Rat operator()(const Rat& eps) const;
    double eval(double eps) const;

    static Modulus pointwise_min(const Modulus& a, const Modulus& b);
    /// t -> outer(inner(t)).
    static Modulus compose(const Modulus& outer, const Modulus& inner);

    bool is_id() const;
    bool is_linear() const { return linear_; }
    Rat linear_slope() const { return slope_; }
    const std::vector<std::pair<Rat, Rat>>& points() const { return pts_; }
    Rat end_slope() const { return end_slope_; }

    /// "id", "scale(2)", "pl[(1/2,1/4),(1,1)]"
    std::string describe() const;

    bool operator==(const Modulus& o) const;

private:
    Modulus() = default;
    void canonicalize();
    void validate() const;

    bool linear_ = true;
    Rat slope_ = 1; // when linear_
    // when not linear_: strictly increasing xs, ys nondecreasing, all > 0
    std::vector<std::pair<Rat, Rat>> pts_;
    Rat end_slope_ = 1;
};

} // namespace contilog
