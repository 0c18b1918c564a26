#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "flow_detail.hpp"
#include "hyperdyn/errors.hpp"
#include "hyperdyn/parallel.hpp"
#include "hyperdyn/symbolic_flow.hpp"

namespace hyperdyn {

namespace {

using boost::multiprecision::cpp_int;
using BigMat = std::array<cpp_int, 4>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kMaxFixedPoints = 50'000'000;

BigMat big(const ToralAuto& A) { return {A.a[0], A.a[1], A.a[2], A.a[3]}; }

BigMat mul(const BigMat& p, const BigMat& q) {
    return {p[0] * q[0] + p[1] * q[2], p[0] * q[1] + p[1] * q[3], p[2] * q[0] + p[3] * q[2], p[2] * q[1] + p[3] * q[3]};
}

BigMat power(const ToralAuto& A, int n) {
    BigMat r{1, 0, 0, 1}, b = big(A);
    for (unsigned e = static_cast<unsigned>(n); e; e >>= 1) {
        if (e & 1) r = mul(r, b);
        b = mul(b, b);
    }
    return r;
}

std::int64_t to_int64(const cpp_int& v, const char* what) {
    if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
        throw resource_limit(std::string(what) + " overflows 64-bit integers");
    return v.convert_to<std::int64_t>();
}

// Smith normal form D = U M V of a nonsingular 2x2 integer matrix, with
// d1 | d2. Only V (the column operations) is needed by the caller.
struct Smith {
    cpp_int d1, d2;
    BigMat v;
};

Smith smith_normal_form(BigMat m) {
    BigMat v{1, 0, 0, 1};
    auto swap_cols = [&] {
        std::swap(m[0], m[1]);
        std::swap(m[2], m[3]);
        std::swap(v[0], v[1]);
        std::swap(v[2], v[3]);
    };
    auto swap_rows = [&] {
        std::swap(m[0], m[2]);
        std::swap(m[1], m[3]);
    };
    // col1 -= q col0
    auto col_sub = [&](const cpp_int& q) {
        m[1] -= q * m[0];
        m[3] -= q * m[2];
        v[1] -= q * v[0];
        v[3] -= q * v[2];
    };
    auto row_sub = [&](const cpp_int& q) {
        m[2] -= q * m[0];
        m[3] -= q * m[1];
    };
    for (int guard = 0; guard < 10'000; ++guard) {
        // Bring the smallest nonzero entry to the pivot.
        int best = -1;
        for (int i = 0; i < 4; ++i)
            if (m[static_cast<std::size_t>(i)] != 0 &&
                (best < 0 || abs(m[static_cast<std::size_t>(i)]) < abs(m[static_cast<std::size_t>(best)])))
                best = i;
        if (best < 0) throw invalid_input("A^n - I is singular");
        if (best == 1 || best == 3) swap_cols();
        if (best == 2 || best == 3) swap_rows();
        bool clean = true;
        if (m[1] != 0) {
            col_sub(m[1] / m[0]);
            clean = clean && m[1] == 0;
        }
        if (m[2] != 0) {
            row_sub(m[2] / m[0]);
            clean = clean && m[2] == 0;
        }
        if (!clean) continue;
        if (m[3] == 0) throw invalid_input("A^n - I is singular");
        if (m[3] % m[0] != 0) {
            // Row 0 += row 1 puts m[3] into the first row; repeat.
            m[0] += m[2];
            m[1] += m[3];
            continue;
        }
        return {abs(m[0]), abs(m[3]), v};
    }
    throw internal_error("Smith normal form did not terminate");
}

std::int64_t mod(std::int64_t a, std::int64_t m) {
    const std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

}  // namespace

ToralAuto ToralAuto::make(std::int64_t a0, std::int64_t a1, std::int64_t a2, std::int64_t a3) {
    if (a0 * a3 - a1 * a2 != 1) throw invalid_input("toral automorphism must have determinant 1");
    const std::int64_t tr = a0 + a3;
    if (std::abs(tr) <= 2) throw invalid_input("toral automorphism must be hyperbolic (|tr| > 2)");
    ToralAuto A;
    A.a = {a0, a1, a2, a3};
    const double t = static_cast<double>(tr);
    const double disc = std::sqrt(t * t - 4.0);
    const double l_big = (t + (t > 0 ? disc : -disc)) / 2.0;  // |l_big| > 1
    const double l_small = 1.0 / l_big;
    A.lambda1 = std::abs(l_big);
    // Eigenvector of [[a0,a1],[a2,a3]] for eigenvalue l: (a1, l - a0) or (l - a3, a2).
    auto eigvec = [&](double l) {
        std::array<double, 2> e = std::abs(a1) > 0 ? std::array<double, 2>{static_cast<double>(a1), l - a0}
                                                  : std::array<double, 2>{l - a3, static_cast<double>(a2)};
        const double n = std::hypot(e[0], e[1]);
        return std::array<double, 2>{e[0] / n, e[1] / n};
    };
    A.unstable = eigvec(l_big);
    A.stable = eigvec(l_small);
    return A;
}

double ToralAuto::log_lambda() const { return std::log(lambda1); }

std::array<std::int64_t, 2> RatPoint::x_frac() const {
    const std::int64_t g = std::gcd(x, den);
    return {x / g, den / g};
}

std::array<std::int64_t, 2> RatPoint::y_frac() const {
    const std::int64_t g = std::gcd(y, den);
    return {y / g, den / g};
}

RatPoint apply(const ToralAuto& A, const RatPoint& p) {
    using i128 = __int128;
    const i128 nx = static_cast<i128>(A.a[0]) * p.x + static_cast<i128>(A.a[1]) * p.y;
    const i128 ny = static_cast<i128>(A.a[2]) * p.x + static_cast<i128>(A.a[3]) * p.y;
    auto m = [&](i128 v) {
        i128 r = v % p.den;
        return static_cast<std::int64_t>(r < 0 ? r + p.den : r);
    };
    return {m(nx), m(ny), p.den};
}

std::int64_t trace_power(const ToralAuto& A, int n) {
    if (n < 1) throw invalid_input("power must be >= 1");
    const BigMat p = power(A, n);
    return to_int64(p[0] + p[3], "tr A^n");
}

std::vector<RatPoint> fixed_points(const ToralAuto& A, int n) {
    if (n < 1) throw invalid_input("period must be >= 1");
    BigMat m = power(A, n);
    m[0] -= 1;
    m[3] -= 1;
    const cpp_int det = m[0] * m[3] - m[1] * m[2];
    if (abs(det) > kMaxFixedPoints) throw resource_limit("Fix(A^n) has more than 5e7 points");
    const Smith s = smith_normal_form(m);
    if (s.d1 * s.d2 != abs(det)) throw internal_error("Smith normal form lost the determinant");
    const std::int64_t d1 = to_int64(s.d1, "invariant factor"), d2 = to_int64(s.d2, "invariant factor");
    const std::int64_t step = d2 / d1;
    std::array<std::int64_t, 4> v;
    for (std::size_t i = 0; i < 4; ++i) v[i] = to_int64(s.v[i] % d2, "transform entry");

    std::vector<RatPoint> pts;
    pts.reserve(static_cast<std::size_t>(d1 * d2));
    for (std::int64_t k1 = 0; k1 < d1; ++k1) {
        const std::int64_t y1 = k1 * step;
        for (std::int64_t k2 = 0; k2 < d2; ++k2) {
            using i128 = __int128;
            const std::int64_t x = mod(static_cast<std::int64_t>((static_cast<i128>(v[0]) * y1 + static_cast<i128>(v[1]) * k2) % d2), d2);
            const std::int64_t y = mod(static_cast<std::int64_t>((static_cast<i128>(v[2]) * y1 + static_cast<i128>(v[3]) * k2) % d2), d2);
            pts.push_back({x, y, d2});
        }
    }
    std::sort(pts.begin(), pts.end());
    if (std::adjacent_find(pts.begin(), pts.end()) != pts.end()) throw internal_error("duplicate fixed points");
    return pts;
}

// --- TrigPoly --------------------------------------------------------------

double TrigPoly::operator()(double x, double y) const {
    double s = c;
    for (const auto& t : terms) {
        const double arg = kTwoPi * (t.k1 * x + t.k2 * y);
        s += t.cos_coeff * std::cos(arg) + t.sin_coeff * std::sin(arg);
    }
    return s;
}

double TrigPoly::lipschitz() const {
    double l = 0.0;
    for (const auto& t : terms) l += kTwoPi * std::hypot(t.k1, t.k2) * std::hypot(t.cos_coeff, t.sin_coeff);
    return l;
}

TrigPoly TrigPoly::compose(const ToralAuto& A) const {
    TrigPoly r{c, {}};
    for (const auto& t : terms) {
        const auto k1 = A.a[0] * t.k1 + A.a[2] * t.k2;
        const auto k2 = A.a[1] * t.k1 + A.a[3] * t.k2;
        if (std::abs(k1) > 1'000'000 || std::abs(k2) > 1'000'000) throw invalid_input("trig frequency too large");
        r.terms.push_back({static_cast<int>(k1), static_cast<int>(k2), t.cos_coeff, t.sin_coeff});
    }
    return r;
}

TrigPoly operator+(const TrigPoly& f, const TrigPoly& g) {
    TrigPoly r = f;
    r.c += g.c;
    r.terms.insert(r.terms.end(), g.terms.begin(), g.terms.end());
    return r;
}

TrigPoly operator*(double s, const TrigPoly& f) {
    TrigPoly r = f;
    r.c *= s;
    for (auto& t : r.terms) {
        t.cos_coeff *= s;
        t.sin_coeff *= s;
    }
    return r;
}

TrigPoly coboundary(const ToralAuto& A, const TrigPoly& beta) { return beta + (-1.0) * beta.compose(A); }

PositivityCheck check_positive(const TrigPoly& f, int grid) {
    if (grid < 2) throw invalid_input("positivity grid must be >= 2");
    std::vector<double> row_min(static_cast<std::size_t>(grid));
    parallel_for(static_cast<std::size_t>(grid), [&](std::size_t i) {
        double m = INFINITY;
        for (int j = 0; j < grid; ++j) m = std::min(m, f(static_cast<double>(i) / grid, static_cast<double>(j) / grid));
        row_min[i] = m;
    });
    PositivityCheck pc;
    pc.grid_min = *std::min_element(row_min.begin(), row_min.end());
    pc.modulus = f.lipschitz() * std::sqrt(2.0) / grid / 2.0;
    return pc;
}

// --- Suspensions -----------------------------------------------------------

SuspensionFlow::SuspensionFlow(ToralAuto A, TrigPoly r) : base(std::move(A)), roof(std::move(r)), roof_check(check_positive(roof)) {
    if (!roof_check.positive())
        throw invalid_input("roof fails the positivity check (grid min " + std::to_string(roof_check.grid_min) +
                            ", required >= 10 x modulus " + std::to_string(roof_check.modulus) + ")");
}

namespace detail {

// Prime orbits with least period 1..n_max, each listed from its
// lexicographically least point.
std::vector<std::vector<RatPoint>> prime_orbits(const ToralAuto& A, int n_max) {
    if (n_max < 1) throw invalid_input("n_max must be >= 1");
    std::vector<std::vector<RatPoint>> out;
    for (int m = 1; m <= n_max; ++m) {
        const auto pts = fixed_points(A, m);
        std::vector<char> seen(pts.size(), 0);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (seen[i]) continue;
            std::vector<RatPoint> orbit{pts[i]};
            seen[i] = 1;
            for (RatPoint q = apply(A, pts[i]); q != pts[i]; q = apply(A, q)) {
                const auto it = std::lower_bound(pts.begin(), pts.end(), q);
                if (it == pts.end() || *it != q) throw internal_error("orbit left Fix(A^n)");
                seen[static_cast<std::size_t>(it - pts.begin())] = 1;
                orbit.push_back(q);
            }
            if (static_cast<int>(orbit.size()) == m) out.push_back(std::move(orbit));
        }
    }
    return out;
}

}  // namespace detail

std::vector<PeriodicOrbitT> periodic_orbits(const SuspensionFlow& flow, int n_max) {
    const double ll = flow.base.log_lambda();
    std::vector<PeriodicOrbitT> out;
    for (const auto& orbit : detail::prime_orbits(flow.base, n_max)) {
        std::vector<double> r;
        for (const auto& p : orbit) r.push_back(flow.roof(p));
        PeriodicOrbitT o;
        o.x = orbit.front();
        o.n = static_cast<int>(orbit.size());
        o.tau = pairwise_sum(r);
        if (!(o.tau > 0.0)) throw internal_error("nonpositive orbit period under a positive roof");
        o.homology = o.n;
        o.ju = o.n * ll;
        o.js = -o.n * ll;
        out.push_back(o);
    }
    return out;
}

std::vector<double> birkhoff_sums(const ToralAuto& A, const TrigPoly& f, int n) {
    const auto pts = fixed_points(A, n);
    std::vector<double> sums(pts.size());
    constexpr std::size_t kChunk = 1024;
    const std::size_t chunks = (pts.size() + kChunk - 1) / kChunk;
    parallel_for(chunks, [&](std::size_t c) {
        std::vector<double> terms(static_cast<std::size_t>(n));
        for (std::size_t i = c * kChunk; i < std::min(pts.size(), (c + 1) * kChunk); ++i) {
            RatPoint p = pts[i];
            for (int k = 0; k < n; ++k) {
                terms[static_cast<std::size_t>(k)] = f(p);
                p = apply(A, p);
            }
            sums[i] = pairwise_sum(terms);
        }
    });
    return sums;
}

std::string fixed_points_csv(const SuspensionFlow& flow, int n) {
    const auto pts = fixed_points(flow.base, n);
    const auto tau = birkhoff_sums(flow.base, flow.roof, n);
    const double ll = flow.base.log_lambda();
    std::ostringstream os;
    os.precision(17);
    os << "n,x_num,x_den,y_num,y_den,tau,Ju,Js,homology\n";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!(tau[i] > 0.0)) throw internal_error("nonpositive orbit period under a positive roof");
        const auto xf = pts[i].x_frac(), yf = pts[i].y_frac();
        os << n << ',' << xf[0] << ',' << xf[1] << ',' << yf[0] << ',' << yf[1] << ',' << tau[i] << ',' << n * ll << ','
           << -n * ll << ',' << n << '\n';
    }
    return os.str();
}

}  // namespace hyperdyn
