#include "contilog/modulus.hpp"

#include <algorithm>
#include <set>

namespace contilog {

Modulus Modulus::id() { return linear(1); }

Modulus Modulus::scale(const Rat& c) {
    if (c <= 0) throw input_error("scale modulus needs c > 0");
    return linear(Rat(1) / c);
}

Modulus Modulus::linear(const Rat& slope) {
    if (slope <= 0) throw input_error("modulus slope must be positive");
    Modulus m;
    m.linear_ = true;
    m.slope_ = slope;
    return m;
}

Modulus Modulus::breakpoints(std::vector<std::pair<Rat, Rat>> pts) {
    if (pts.empty()) throw input_error("breakpoint modulus needs at least one point");
    std::sort(pts.begin(), pts.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    Modulus m;
    m.linear_ = false;
    m.pts_ = std::move(pts);
    if (m.pts_.size() >= 2) {
        const auto& a = m.pts_[m.pts_.size() - 2];
        const auto& b = m.pts_.back();
        m.end_slope_ = Rat((b.second - a.second) / (b.first - a.first));
    } else {
        m.end_slope_ = Rat(m.pts_[0].second / m.pts_[0].first);
    }
    m.validate();
    m.canonicalize();
    return m;
}

void Modulus::validate() const {
    if (linear_) return;
    Rat prev_x = 0, prev_y = 0;
    for (const auto& [x, y] : pts_) {
        if (x <= prev_x) throw input_error("modulus breakpoints must have strictly increasing x");
        if (y <= 0) throw input_error("modulus must be strictly positive");
        if (y < prev_y) throw input_error("modulus must be nondecreasing");
        prev_x = x;
        prev_y = y;
    }
    if (end_slope_ < 0) throw input_error("modulus must be nondecreasing");
}

void Modulus::canonicalize() {
    if (linear_) return;
    // drop collinear interior points (with the implicit origin)
    std::vector<std::pair<Rat, Rat>> out;
    auto slope_between = [](const std::pair<Rat, Rat>& a, const std::pair<Rat, Rat>& b) {
        return Rat((b.second - a.second) / (b.first - a.first));
    };
    std::pair<Rat, Rat> origin{Rat(0), Rat(0)};
    for (const auto& p : pts_) {
        while (!out.empty()) {
            const auto& prev = out.empty() ? origin : out.back();
            const auto& before = out.size() >= 2 ? out[out.size() - 2] : origin;
            if (slope_between(before, prev) == slope_between(prev, p))
                out.pop_back();
            else
                break;
        }
        out.push_back(p);
    }
    // a single breakpoint whose tail continues the origin chord is linear
    if (out.size() == 1 && end_slope_ == Rat(out[0].second / out[0].first)) {
        linear_ = true;
        slope_ = end_slope_;
        pts_.clear();
        return;
    }
    pts_ = std::move(out);
}

Rat Modulus::operator()(const Rat& eps) const {
    if (eps <= 0) throw input_error("modulus evaluated at non-positive argument");
    if (linear_) return Rat(slope_ * eps);
    Rat px = 0, py = 0;
    for (const auto& [x, y] : pts_) {
        if (eps <= x) {
            // interpolate on [px, x]
            return Rat(py + (y - py) * (eps - px) / (x - px));
        }
        px = x;
        py = y;
    }
    return Rat(py + end_slope_ * (eps - px));
}

double Modulus::eval(double eps) const { return rat_to_double((*this)(rat_from_double(eps))); }

bool Modulus::is_id() const { return linear_ && slope_ == 1; }

namespace {

// All x-coordinates where the piecewise structure of m can change.
std::vector<Rat> knot_xs(const Modulus& m) {
    std::vector<Rat> xs;
    if (!m.is_linear())
        for (const auto& [x, y] : m.points()) xs.push_back(x);
    return xs;
}

Rat slope_after(const Modulus& m, const Rat& x) {
    if (m.is_linear()) return m.linear_slope();
    Rat px = 0, py = 0;
    for (const auto& [bx, by] : m.points()) {
        if (x < bx) return Rat((by - py) / (bx - px));
        px = bx;
        py = by;
    }
    return m.end_slope();
}

} // namespace

Modulus Modulus::pointwise_min(const Modulus& a, const Modulus& b) {
    if (a.is_linear() && b.is_linear())
        return linear(std::min(a.linear_slope(), b.linear_slope()));

    // candidate knots: both knot sets plus crossings inside shared segments
    std::set<Rat> xs;
    for (const Rat& x : knot_xs(a)) xs.insert(x);
    for (const Rat& x : knot_xs(b)) xs.insert(x);
    std::vector<Rat> grid(xs.begin(), xs.end());

    std::set<Rat> knots(xs.begin(), xs.end());
    Rat prev = 0;
    std::vector<Rat> ends(grid);
    ends.push_back(prev); // sentinel reuse below
    auto add_crossing = [&](const Rat& lo, const Rat* hi) {
        // a and b are linear on (lo, hi); find crossing of the two lines
        Rat mid = hi ? Rat((lo + *hi) / 2) : Rat(lo + 1);
        Rat sa = slope_after(a, mid), sb = slope_after(b, mid);
        Rat ya = lo > 0 ? a(lo) : Rat(0), yb = lo > 0 ? b(lo) : Rat(0);
        if (sa == sb) return;
        // ya + sa (t - lo) = yb + sb (t - lo)
        Rat t = Rat(lo + (yb - ya) / (sa - sb));
        if (t > lo && (!hi || t < *hi)) knots.insert(t);
    };
    prev = 0;
    for (size_t i = 0; i < grid.size(); ++i) {
        add_crossing(prev, &grid[i]);
        prev = grid[i];
    }
    add_crossing(prev, nullptr);

    std::vector<std::pair<Rat, Rat>> pts;
    for (const Rat& x : knots) pts.emplace_back(x, std::min(a(x), b(x)));
    if (pts.empty()) // both linear was handled; defensive
        return linear(std::min(slope_after(a, Rat(1)), slope_after(b, Rat(1))));
    Modulus m;
    m.linear_ = false;
    m.pts_ = std::move(pts);
    Rat last = m.pts_.back().first;
    m.end_slope_ = std::min(slope_after(a, Rat(last + 1)), slope_after(b, Rat(last + 1)));
    m.validate();
    m.canonicalize();
    return m;
}

Modulus Modulus::compose(const Modulus& outer, const Modulus& inner) {
    if (outer.is_linear() && inner.is_linear())
        return linear(Rat(outer.linear_slope() * inner.linear_slope()));

    // knots of the composite: inner's knots plus preimages of outer's knots
    std::set<Rat> knots;
    for (const Rat& x : knot_xs(inner)) knots.insert(x);
    for (const Rat& y : knot_xs(outer)) {
        // solve inner(t) = y segment by segment
        std::vector<Rat> seg = knot_xs(inner);
        Rat prev = 0;
        seg.push_back(seg.empty() ? Rat(1) : Rat(seg.back() + 1)); // open tail probe
        Rat lo = 0;
        auto try_segment = [&](const Rat& a0, const Rat* b0) {
            Rat mid = b0 ? Rat((a0 + *b0) / 2) : Rat(a0 + 1);
            Rat s = slope_after(inner, mid);
            Rat ya = a0 > 0 ? inner(a0) : Rat(0);
            if (s == 0) return;
            Rat t = Rat(a0 + (y - ya) / s);
            if (t > a0 && (!b0 || t <= *b0)) knots.insert(t);
        };
        std::vector<Rat> inner_knots = knot_xs(inner);
        lo = 0;
        for (const Rat& k : inner_knots) {
            try_segment(lo, &k);
            lo = k;
        }
        try_segment(lo, nullptr);
        (void)prev;
    }

    if (knots.empty())
        return linear(Rat(slope_after(outer, Rat(1)) * slope_after(inner, Rat(1))));

    std::vector<std::pair<Rat, Rat>> pts;
    for (const Rat& x : knots) pts.emplace_back(x, outer(inner(x)));
    Modulus m;
    m.linear_ = false;
    m.pts_ = std::move(pts);
    Rat last = m.pts_.back().first;
    Rat si = slope_after(inner, Rat(last + 1));
    Rat inner_far = inner(Rat(last + 1));
    m.end_slope_ = Rat(slope_after(outer, Rat(inner_far + 1)) * si);
    m.validate();
    m.canonicalize();
    return m;
}

std::string Modulus::describe() const {
    if (is_id()) return "id";
    if (linear_) {
        if (numerator(slope_) == 1)
            return "scale(" + denominator(slope_).str() + ")";
        return "linear(" + rat_to_string(slope_) + ")";
    }
    std::string s = "pl[";
    bool first = true;
    for (const auto& [x, y] : pts_) {
        if (!first) s += ",";
        first = false;
        s += "(" + rat_to_string(x) + "," + rat_to_string(y) + ")";
    }
    s += "]";
    return s;
}

bool Modulus::operator==(const Modulus& o) const {
    if (linear_ != o.linear_) return false;
    if (linear_) return slope_ == o.slope_;
    return pts_ == o.pts_ && end_slope_ == o.end_slope_;
}

} // namespace contilog
