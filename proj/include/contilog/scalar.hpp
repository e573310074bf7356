#pragma once

#include "contilog/rational.hpp"

#include <cmath>
#include <string>

namespace contilog {

/// A numeric value that stays exact (rational) as long as every operand is
/// rational and degrades to a double as soon as an irrational quantity
/// (a Hilbert norm, an optimizer output) enters the computation.
class Scalar {
public:
    Scalar() : exact_(true), q_(0), d_(0.0) {}
    Scalar(const Rat& q) : exact_(true), q_(q), d_(rat_to_double(q)) {}
    Scalar(long v) : Scalar(Rat(v)) {}
    Scalar(int v) : Scalar(Rat(v)) {}

    static Scalar approx(double x) {
        Scalar s;
        s.exact_ = false;
        s.d_ = x;
        return s;
    }

    bool exact() const { return exact_; }
    const Rat& rat() const { return q_; } // meaningful only when exact()
    double dbl() const { return d_; }

    friend Scalar operator+(const Scalar& a, const Scalar& b) {
        if (a.exact_ && b.exact_) return Scalar(Rat(a.q_ + b.q_));
        return approx(a.d_ + b.d_);
    }
    friend Scalar operator-(const Scalar& a, const Scalar& b) {
        if (a.exact_ && b.exact_) return Scalar(Rat(a.q_ - b.q_));
        return approx(a.d_ - b.d_);
    }
    friend Scalar operator*(const Scalar& a, const Scalar& b) {
        if (a.exact_ && b.exact_) return Scalar(Rat(a.q_ * b.q_));
        return approx(a.d_ * b.d_);
    }

    Scalar half() const {
        if (exact_) return Scalar(Rat(q_ / 2));
        return approx(d_ / 2);
    }
    Scalar abs() const {
        if (exact_) return Scalar(Rat(q_ < 0 ? Rat(-q_) : q_));
        return approx(std::fabs(d_));
    }

    /// -1, 0, +1; rational comparison whenever both sides are exact.
    int compare(const Scalar& o) const {
        if (exact_ && o.exact_) {
            if (q_ < o.q_) return -1;
            if (q_ > o.q_) return 1;
            return 0;
        }
        if (d_ < o.d_) return -1;
        if (d_ > o.d_) return 1;
        return 0;
    }
    bool operator<(const Scalar& o) const { return compare(o) < 0; }
    bool operator<=(const Scalar& o) const { return compare(o) <= 0; }
    bool operator>(const Scalar& o) const { return compare(o) > 0; }
    bool operator>=(const Scalar& o) const { return compare(o) >= 0; }
    bool operator==(const Scalar& o) const { return compare(o) == 0; }

    static Scalar min(const Scalar& a, const Scalar& b) { return a.compare(b) <= 0 ? a : b; }
    static Scalar max(const Scalar& a, const Scalar& b) { return a.compare(b) >= 0 ? a : b; }

    /// max(a - b, 0), the truncated subtraction of continuous logic.
    static Scalar dotminus(const Scalar& a, const Scalar& b) {
        Scalar d = a - b;
        return max(d, Scalar(Rat(0)));
    }

    std::string str() const {
        if (exact_) return rat_to_string(q_);
        return std::to_string(d_);
    }

private:
    bool exact_;
    Rat q_;
    double d_;
};

/// A certified interval around an evaluated value. On fully finite
/// quantification lo == hi and certified is true; heuristic optimization
/// over continuous sorts yields certified == false.
struct ValueBounds {
    Scalar lo;
    Scalar hi;
    bool certified = true;

    static ValueBounds exact(const Scalar& s) { return ValueBounds{s, s, true}; }
    bool is_point() const { return lo == hi; }
    double width() const { return hi.dbl() - lo.dbl(); }
};

} // namespace contilog
