#include "hyperdyn/mat2.hpp"

#include <algorithm>

#include "hyperdyn/errors.hpp"

namespace hyperdyn {

double max_abs_diff(const Mat2& x, const Mat2& y) {
    return std::max({std::abs(x.a - y.a), std::abs(x.b - y.b), std::abs(x.c - y.c), std::abs(x.d - y.d)});
}

double psl_distance(const Mat2& x, const Mat2& y) { return std::min(max_abs_diff(x, y), max_abs_diff(x, -y)); }

double det_drift(const Mat2& m) {
    const double scale = std::max(1.0, std::abs(m.a * m.d) + std::abs(m.b * m.c));
    return std::abs(m.det() - 1.0) / scale;
}

Mat2 renormalize(const Mat2& m) {
    const double det = m.det();
    const double drift = det_drift(m);
    if (!(det > 0.0) || !(drift <= 1e-6)) throw invalid_input("matrix determinant is not 1 (drift beyond repair tolerance)");
    if (drift <= 1e-13) return m;
    const double s = 1.0 / std::sqrt(det);
    return {m.a * s, m.b * s, m.c * s, m.d * s};
}

double op_norm(const Mat2& m) {
    const double frob2 = m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d;
    const double det = std::abs(m.det());
    // sigma1 + sigma2 = sqrt(|M|_F^2 + 2|det|), sigma1 - sigma2 = sqrt(|M|_F^2 - 2|det|)
    return 0.5 * (std::sqrt(frob2 + 2.0 * det) + std::sqrt(std::max(0.0, frob2 - 2.0 * det)));
}

Mat2 power(const Mat2& m, long n) {
    Mat2 base = n < 0 ? m.inverse() : m;
    unsigned long e = n < 0 ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
    Mat2 r = Mat2::identity();
    while (e) {
        if (e & 1UL) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

}  // namespace hyperdyn
