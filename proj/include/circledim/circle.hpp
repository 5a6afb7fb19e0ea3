#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace circledim {

// The circle is R/Z. Points live in [0,1); angles are fractions of a turn.
// All logarithms in this codebase are base 2.

inline double wrap_unit(double x) {
    double y = x - std::floor(x);
    if (y >= 1.0) y -= 1.0;
    if (y < 0.0) y += 1.0;
    return y;
}

// Signed representative of x mod 1 in (-1/2, 1/2].
inline double wrap_signed(double x) {
    double y = x - std::round(x);
    if (y <= -0.5) y += 1.0;
    return y;
}

inline double circ_dist(double a, double b) {
    return std::abs(wrap_signed(a - b));
}

// Closed real interval, used for certified ranges of log2-derivatives.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
    Interval& operator+=(const Interval& o) {
        lo += o.lo;
        hi += o.hi;
        return *this;
    }
    Interval widened(double m) const { return {lo - m, hi + m}; }
    bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
};

// Oriented arc on the circle: the set {start + t : 0 <= t <= length} mod 1.
// length = 1 means the full circle.
struct Arc {
    double start = 0.0;
    double length = 1.0;

    static Arc full() { return Arc{0.0, 1.0}; }
    static Arc ball(double center, double radius) {
        double len = std::min(1.0, 2.0 * radius);
        if (len >= 1.0) return full();
        return Arc{wrap_unit(center - radius), len};
    }

    bool is_full() const { return length >= 1.0 - 1e-15; }
    double end() const { return wrap_unit(start + length); }
    double midpoint() const { return wrap_unit(start + 0.5 * length); }
    double point_at(double t) const { return wrap_unit(start + t * length); }

    bool contains(double x) const {
        if (is_full()) return true;
        return wrap_unit(x - start) <= length + 1e-15;
    }
};

// Minimal circular distance between two arcs; 0 if they intersect.
inline double arc_gap(const Arc& a, const Arc& b) {
    if (a.is_full() || b.is_full()) return 0.0;
    double off = wrap_unit(b.start - a.start);
    if (off <= a.length) return 0.0;                 // b starts inside a
    double back = wrap_unit(a.start - b.start);
    if (back <= b.length) return 0.0;                // a starts inside b
    return std::min(off - a.length, back - b.length);
}

inline bool arcs_disjoint(const Arc& a, const Arc& b) { return arc_gap(a, b) > 0.0; }

// True if inner lies within outer with at least `margin` slack on both sides.
inline bool arc_contains_arc(const Arc& outer, const Arc& inner, double margin = 0.0) {
    if (outer.is_full()) return true;
    if (inner.is_full()) return false;
    double off = wrap_unit(inner.start - outer.start);
    return off >= margin && off + inner.length <= outer.length - margin;
}

// Slack of the containment above (negative when not contained).
inline double arc_containment_margin(const Arc& outer, const Arc& inner) {
    if (outer.is_full()) return 0.5 * (1.0 - inner.length);
    if (inner.is_full()) return -1.0;
    double off = wrap_unit(inner.start - outer.start);
    return std::min(off, outer.length - off - inner.length);
}

// Complement of a union of pairwise disjoint arcs, as arcs (sorted by start).
std::vector<Arc> complement_arcs(std::vector<Arc> arcs);

// Ordinary least squares slope of y against x. Returns {slope, max residual}.
struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;
};
SlopeFit fit_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace circledim
