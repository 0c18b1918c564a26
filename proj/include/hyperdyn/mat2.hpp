#pragma once

#include <cmath>

namespace hyperdyn {

// Real 2x2 matrix [[a, b], [c, d]], used as an SL(2,R) representative of
// a PSL(2,R) element. Plain arithmetic never renormalizes; see
// CoverElement for the checked group law.
struct Mat2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    static constexpr Mat2 identity() { return {}; }
    static Mat2 rotation(double angle) {
        const double cs = std::cos(angle), sn = std::sin(angle);
        return {cs, -sn, sn, cs};
    }
    static Mat2 diag(double x, double y) { return {x, 0.0, 0.0, y}; }

    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }
    // Inverse assuming unit determinant.
    Mat2 inverse() const { return {d, -b, -c, a}; }
    Mat2 operator-() const { return {-a, -b, -c, -d}; }

    friend Mat2 operator*(const Mat2& x, const Mat2& y) {
        return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
                x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
    }
    friend bool operator==(const Mat2&, const Mat2&) = default;
};

// Largest entrywise absolute difference.
double max_abs_diff(const Mat2& x, const Mat2& y);
// min(max_abs_diff(x, y), max_abs_diff(x, -y)): distance in PSL(2,R).
double psl_distance(const Mat2& x, const Mat2& y);

// Determinant drift relative to the rounding scale |ad| + |bc|.
double det_drift(const Mat2& m);

// Divides by sqrt(det) when the drift exceeds 1e-13. Throws invalid-input
// when the drift exceeds 1e-6 or det <= 0.
Mat2 renormalize(const Mat2& m);

// Largest singular value.
double op_norm(const Mat2& m);

Mat2 power(const Mat2& m, long n);

}  // namespace hyperdyn
