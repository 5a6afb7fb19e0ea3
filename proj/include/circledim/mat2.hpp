#pragma once

#include <cmath>

namespace circledim {

// 2x2 real matrix, row major. The Fuchsian layer keeps det = 1.
struct Mat2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    double det() const { return a * d - b * c; }
    double frob2() const { return a * a + b * b + c * c + d * d; }

    Mat2 inverse() const {
        double dt = det();
        return {d / dt, -b / dt, -c / dt, a / dt};
    }

    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }

    Mat2 operator-() const { return {-a, -b, -c, -d}; }

    // Largest singular value; closed form from the characteristic
    // polynomial of A^T A.
    double op_norm() const {
        double t = frob2();
        double dt = det();
        double disc = t * t - 4.0 * dt * dt;
        if (disc < 0.0) disc = 0.0;
        return std::sqrt(0.5 * (t + std::sqrt(disc)));
    }

    static Mat2 rotation(double angle_rad) {
        double c0 = std::cos(angle_rad), s0 = std::sin(angle_rad);
        return {c0, -s0, s0, c0};
    }

    static Mat2 diag(double x, double y) { return {x, 0.0, 0.0, y}; }
};

// Long-double product accumulator for norms of long words, where
// entries grow like chi^L and double products would shed the low bits.
struct Mat2Wide {
    long double a = 1.0L, b = 0.0L, c = 0.0L, d = 0.0L;

    static Mat2Wide identity() { return {1.0L, 0.0L, 0.0L, 1.0L}; }
    static Mat2Wide from(const Mat2& m) { return {m.a, m.b, m.c, m.d}; }

    Mat2Wide apply_left(const Mat2& m) const {
        // m * this
        return {m.a * a + m.b * c, m.a * b + m.b * d, m.c * a + m.d * c, m.c * b + m.d * d};
    }

    double log2_op_norm() const {
        long double t = a * a + b * b + c * c + d * d;
        long double dt = a * d - b * c;
        long double disc = t * t - 4.0L * dt * dt;
        if (disc < 0.0L) disc = 0.0L;
        long double s2 = 0.5L * (t + std::sqrt(disc));
        return static_cast<double>(0.5L * std::log2(s2));
    }
};

} // namespace circledim
