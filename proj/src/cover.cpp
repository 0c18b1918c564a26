#include "hyperdyn/cover.hpp"

#include <cmath>
#include <numbers>

#include "hyperdyn/errors.hpp"

namespace hyperdyn {

namespace {

constexpr double kPi = std::numbers::pi;

// Angle of the line through (x, y), in [0, pi). Angles within
// kWrapBand of pi are wrapped to (slightly below) 0 so that matrices
// rounding to +-I get a stable winding.
constexpr double kWrapBand = 1e-12;

double line_angle(double x, double y) {
    double t = std::atan2(y, x);
    if (t < 0.0) t += kPi;
    if (t >= kPi - kWrapBand) t -= kPi;
    return t;
}

long round_multiple_of_pi(double value) {
    const double r = value / kPi;
    const double k = std::nearbyint(r);
    if (!(std::abs(r - k) <= 0.25)) throw internal_error("winding discrepancy is not near an integer multiple of pi");
    return static_cast<long>(k);
}

}  // namespace

double canonical_lift(const Mat2& m, double x) {
    const double base = line_angle(m.a, m.c);
    const double j = std::floor(x / kPi);
    double x0 = x - j * kPi;
    if (x0 < 0.0) x0 = 0.0;
    const double cs = std::cos(x0), sn = std::sin(x0);
    const double vx = m.a * cs + m.b * sn;
    const double vy = m.c * cs + m.d * sn;
    // cross(m e1, m v(x0)) = det(m) sin(x0) >= 0 on [0, pi], so atan2 gives
    // the counterclockwise advance in [0, pi] without branch ambiguity.
    const double advance = std::atan2(m.det() * sn, m.a * vx + m.c * vy);
    return base + advance + j * kPi;
}

CoverElement::CoverElement(const Mat2& m, long winding) : m_(renormalize(m)), k_(winding) {}

CoverElement CoverElement::rotation(double angle) {
    const Mat2 m = Mat2::rotation(angle);
    return {m, round_multiple_of_pi(angle - canonical_lift(m, 0.0))};
}

double CoverElement::lift(double x) const { return canonical_lift(m_, x) + static_cast<double>(k_) * kPi; }

CoverElement compose(const CoverElement& p, const CoverElement& q) {
    CoverElement r;
    r.m_ = renormalize(p.m_ * q.m_);
    const double target = p.lift(q.lift(0.0));
    r.k_ = round_multiple_of_pi(target - canonical_lift(r.m_, 0.0));
    return r;
}

CoverElement CoverElement::inverse() const {
    CoverElement r;
    r.m_ = m_.inverse();
    // Choose the winding so that f(f^-1(0)) = 0.
    const double y0 = canonical_lift(r.m_, 0.0);
    r.k_ = -round_multiple_of_pi(lift(y0));
    return r;
}

CoverElement CoverElement::pow(long n) const {
    CoverElement base = n < 0 ? inverse() : *this;
    unsigned long e = n < 0 ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
    CoverElement r;
    while (e) {
        if (e & 1UL) r = r * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return r;
}

CoverElement one_param(OneParam kind, double t) {
    switch (kind) {
        case OneParam::X:
            return {Mat2::diag(std::exp(t / 2), std::exp(-t / 2)), 0};
        case OneParam::S:
            return {Mat2{1.0, t, 0.0, 1.0}, 0};
        case OneParam::U: {
            // The path s -> U^{sy} moves 0 to atan(sy); for y < 0 that is
            // below the [0, pi) normalization, hence winding -1.
            const Mat2 m{1.0, 0.0, t, 1.0};
            return {m, round_multiple_of_pi(std::atan(t) - canonical_lift(m, 0.0))};
        }
    }
    throw internal_error("unknown one-parameter subgroup");
}

std::string_view to_string(ElementClass c) {
    switch (c) {
        case ElementClass::Hyperbolic: return "hyperbolic";
        case ElementClass::Parabolic: return "parabolic";
        case ElementClass::Elliptic: return "elliptic";
        case ElementClass::Central: return "central";
    }
    return "?";
}

ElementClass classify(const Mat2& m) {
    if (psl_distance(m, Mat2::identity()) <= kCentralTol) return ElementClass::Central;
    const double t = std::abs(m.trace());
    if (std::abs(t - 2.0) <= kParabolicBand) return ElementClass::Parabolic;
    return t > 2.0 ? ElementClass::Hyperbolic : ElementClass::Elliptic;
}

double translation_length(const Mat2& m) {
    if (classify(m) != ElementClass::Hyperbolic) return 0.0;
    return 2.0 * std::acosh(std::abs(m.trace()) / 2.0);
}

CoverElement commutator(const CoverElement& p, const CoverElement& q) { return p.inverse() * q.inverse() * p * q; }

Mat2 diagonalizer(const Mat2& m0) {
    const Mat2 m = m0.trace() >= 0.0 ? m0 : -m0;
    const double t = m.trace();
    if (!(t > 2.0)) throw invalid_input("diagonalizer: element is not hyperbolic");
    const double lam = 0.5 * (t + std::sqrt((t - 2.0) * (t + 2.0)));
    auto eigvec = [&](double mu, double& x, double& y) {
        const double n1 = std::abs(m.b) + std::abs(mu - m.a);
        const double n2 = std::abs(mu - m.d) + std::abs(m.c);
        if (n1 >= n2) {
            x = m.b;
            y = mu - m.a;
        } else {
            x = mu - m.d;
            y = m.c;
        }
    };
    double ux, uy, vx, vy;
    eigvec(lam, ux, uy);
    eigvec(1.0 / lam, vx, vy);
    double det = ux * vy - vx * uy;
    if (det < 0.0) {
        vx = -vx;
        vy = -vy;
        det = -det;
    }
    const double s = 1.0 / std::sqrt(det);
    const Mat2 cols{ux * s, vx * s, uy * s, vy * s};
    return cols.inverse();
}

std::vector<CommutatorSample> commutator_length_sequence(const CoverElement& p, const CoverElement& q, long n_max) {
    if (n_max < 1) throw invalid_input("commutator_length_sequence: n_max must be >= 1");
    if (classify(p) != ElementClass::Hyperbolic) throw invalid_input("commutator_length_sequence: p must be hyperbolic");
    const ElementClass cc = classify(commutator(p, q));
    if (cc == ElementClass::Central || cc == ElementClass::Parabolic)
        throw Error(ErrorKind::InvalidInput, "degenerate-commutator", "commutator [p,q] is central or parabolic");

    const double len = translation_length(p);
    const Mat2 A = diagonalizer(p.matrix());
    const Mat2 qc = A * q.matrix() * A.inverse();
    const Mat2 pm = p.matrix(), qm = q.matrix();
    auto length_of_trace = [](double tr) { return tr > 2.0 ? 2.0 * std::acosh(tr / 2.0) : 0.0; };

    std::vector<CommutatorSample> out;
    Mat2 pn = Mat2::identity();
    for (long n = 1; n <= n_max; ++n) {
        pn = pn * pm;
        const Mat2 comm = pn.inverse() * qm.inverse() * pn * qm;
        const double nl = static_cast<double>(n) * len;
        const double tr_closed = std::abs(2.0 * qc.a * qc.d - qc.b * qc.c * (std::exp(nl) + std::exp(-nl)));
        CommutatorSample s;
        s.n = n;
        s.trace_direct = std::abs(comm.trace());
        s.trace_closed = tr_closed;
        s.trace_rel_diff = std::abs(s.trace_direct - tr_closed) / std::max(1.0, tr_closed);
        s.ratio = length_of_trace(s.trace_direct) / (2.0 * static_cast<double>(n));
        s.ratio_closed = length_of_trace(tr_closed) / (2.0 * static_cast<double>(n));
        out.push_back(s);
    }
    return out;
}

}  // namespace hyperdyn
