#include "hyperdyn/margulis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "hyperdyn/errors.hpp"
#include "hyperdyn/parallel.hpp"

namespace hyperdyn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxKnotBits = 24;

// Least-squares slope and intercept.
std::pair<double, double> fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return {slope, (sy - slope * sx) / n};
}

}  // namespace

ExpandingMap ExpandingMap::make(int d, double eps) {
    if (d < 2) throw invalid_input("expanding map degree must be >= 2");
    if (!(std::abs(eps) <= d - 1.1)) throw invalid_input("|eps| must be <= d - 1.1 so that g' >= 1.1");
    return {d, eps};
}

double ExpandingMap::lift(double x) const { return d * x + eps / kTwoPi * std::sin(kTwoPi * x); }

double ExpandingMap::derivative(double x) const { return d + eps * std::cos(kTwoPi * x); }

double ExpandingMap::inverse(double z) const {
    const double m = std::floor(z / d);
    const double r = z - m * d;  // solve G(y) = r on [0, 1]
    double lo = 0.0, hi = 1.0, y = r / d;
    for (int it = 0; it < 100; ++it) {
        const double fy = lift(y) - r;
        if (fy == 0.0) break;
        (fy > 0.0 ? hi : lo) = y;
        double next = y - fy / derivative(y);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == y || hi - lo <= 1e-17) break;
        y = next;
    }
    return m + y;
}

// --- LeafMeasureCDF --------------------------------------------------------

LeafMeasureCDF::LeafMeasureCDF(std::vector<double> knots) : knots_(std::move(knots)) {
    if (knots_.empty() || knots_.front() != 0.0) throw invalid_input("CDF knots must start at 0");
    if (!(knots_.back() < 1.0)) throw invalid_input("CDF knots must lie in [0, 1)");
    for (std::size_t i = 1; i < knots_.size(); ++i)
        if (!(knots_[i] > knots_[i - 1])) throw invalid_input("CDF is not strictly increasing");
}

double LeafMeasureCDF::operator()(double y) const {
    if (y <= 0.0) return 0.0;
    if (y >= 1.0) return 1.0;
    const std::size_t n = knots_.size();
    const std::size_t i = static_cast<std::size_t>(std::upper_bound(knots_.begin(), knots_.end(), y) - knots_.begin()) - 1;
    const double y1 = i + 1 < n ? knots_[i + 1] : 1.0;
    return (static_cast<double>(i) + (y - knots_[i]) / (y1 - knots_[i])) / static_cast<double>(n);
}

double LeafMeasureCDF::periodic(double x) const {
    const double k = std::floor(x);
    return k + (*this)(x - k);
}

double LeafMeasureCDF::inverse(double u) const {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const std::size_t n = knots_.size();
    const double x = u * static_cast<double>(n);
    const std::size_t i = std::min(n - 1, static_cast<std::size_t>(x));
    const double y1 = i + 1 < n ? knots_[i + 1] : 1.0;
    return knots_[i] + (x - static_cast<double>(i)) * (y1 - knots_[i]);
}

std::string LeafMeasureCDF::csv(std::size_t stride) const {
    if (stride == 0) throw invalid_input("CSV stride must be >= 1");
    std::ostringstream os;
    os.precision(17);
    os << "y,F\n";
    const double n = static_cast<double>(knots_.size());
    for (std::size_t i = 0; i < knots_.size(); i += stride) os << knots_[i] << ',' << static_cast<double>(i) / n << '\n';
    os << "1,1\n";
    return os.str();
}

LeafMeasureCDF preimage_cdf(int d, const std::function<double(double)>& inverse_lift, int depth) {
    if (d < 2) throw invalid_input("degree must be >= 2");
    if (depth < 1 || depth * std::log2(d) > kMaxKnotBits) throw invalid_input("preimage depth out of range (d^depth <= 2^24)");
    std::vector<double> level{0.0};
    constexpr std::size_t kChunk = 1 << 14;
    for (int k = 0; k < depth; ++k) {
        const std::size_t n = level.size();
        std::vector<double> next(n * static_cast<std::size_t>(d));
        const std::size_t chunks = (n + kChunk - 1) / kChunk;
        parallel_for(chunks * static_cast<std::size_t>(d), [&](std::size_t task) {
            const std::size_t j = task / chunks, c = task % chunks;
            for (std::size_t i = c * kChunk; i < std::min(n, (c + 1) * kChunk); ++i)
                next[j * n + i] = inverse_lift(level[i] + static_cast<double>(j));
        });
        level = std::move(next);
    }
    return LeafMeasureCDF(std::move(level));
}

LeafMeasureCDF mme_cdf(const ExpandingMap& g, int depth, int resolution_bits) {
    if (resolution_bits > 0 && depth * std::log2(g.d) < resolution_bits)
        throw Error(ErrorKind::InvalidInput, "resolution", "depth " + std::to_string(depth) + " gives fewer than 2^" +
                                                               std::to_string(resolution_bits) + " knots");
    return preimage_cdf(g.d, [&](double z) { return g.inverse(z); }, depth);
}

double cdf_distance(const LeafMeasureCDF& a, const LeafMeasureCDF& b, int grid_bits) {
    const std::size_t n = std::size_t{1} << grid_bits;
    double m = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double y = static_cast<double>(i) / static_cast<double>(n);
        m = std::max(m, std::abs(a(y) - b(y)));
    }
    return m;
}

ScalingReport scaling_check(const ExpandingMap& g, const LeafMeasureCDF& F, int n_intervals, std::uint64_t seed, double max_len) {
    if (n_intervals < 1 || !(max_len > 0.0 && max_len < 1.0)) throw invalid_input("bad scaling check parameters");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ScalingReport rep;
    while (rep.intervals < n_intervals) {
        const double a = unit(rng), b = a + max_len * (0.02 + 0.98 * unit(rng));
        if (b >= 1.0) continue;
        const double ga = g.lift(a), gb = g.lift(b);
        const double j = std::floor(ga);
        if (std::floor(gb) != j) continue;  // not injective on I
        const double mu = F(b) - F(a);
        const double mu_image = F(gb - j) - F(ga - j);
        rep.max_residual = std::max(rep.max_residual, std::abs(mu_image - g.d * mu));
        ++rep.intervals;
    }
    return rep;
}

// --- Linearization ---------------------------------------------------------

double GridLift::operator()(double u) const {
    const std::size_t n = values.size();
    const double k = std::floor(u);
    const double x = (u - k) * static_cast<double>(n);
    const std::size_t i = std::min(n - 1, static_cast<std::size_t>(x));
    const double v1 = i + 1 < n ? values[i + 1] : values[0] + d;
    return k * d + values[i] + (x - static_cast<double>(i)) * (v1 - values[i]);
}

double GridLift::inverse(double z) const {
    const std::size_t n = values.size();
    const double m = std::floor((z - values[0]) / d);
    const double r = z - m * d;
    std::size_t i = static_cast<std::size_t>(std::upper_bound(values.begin(), values.end(), r) - values.begin());
    i = i == 0 ? 0 : i - 1;
    const double v1 = i + 1 < n ? values[i + 1] : values[0] + d;
    return m + (static_cast<double>(i) + (r - values[i]) / (v1 - values[i])) / static_cast<double>(n);
}

LinearizeResult linearize(const ExpandingMap& g, const LeafMeasureCDF& F, int resolution_bits) {
    if (resolution_bits < 4 || resolution_bits > kMaxKnotBits) throw invalid_input("resolution bits must lie in [4, 24]");
    const auto& k = F.knots();
    for (std::size_t i = 1; i < k.size(); ++i)
        if (!(k[i] > k[i - 1])) throw invalid_input("F is not monotone");
    const std::size_t n = std::size_t{1} << resolution_bits;
    if (F.size() < n) throw Error(ErrorKind::InvalidInput, "resolution", "F has fewer knots than the linearization grid");

    LinearizeResult res;
    res.map.d = g.d;
    res.map.values.resize(n);
    constexpr std::size_t kChunk = 1 << 14;
    parallel_for((n + kChunk - 1) / kChunk, [&](std::size_t c) {
        for (std::size_t i = c * kChunk; i < std::min(n, (c + 1) * kChunk); ++i)
            res.map.values[i] = F.periodic(g.lift(F.inverse(static_cast<double>(i) / static_cast<double>(n))));
    });
    for (std::size_t i = 1; i < n; ++i)
        if (!(res.map.values[i] > res.map.values[i - 1])) throw internal_error("linearized lift is not monotone");

    const auto& v = res.map.values;
    const std::int64_t s = res.step_cells, nn = static_cast<std::int64_t>(n);
    auto at = [&](std::int64_t i) {
        const std::int64_t q = i >= 0 ? i / nn : -((-i + nn - 1) / nn);
        return v[static_cast<std::size_t>(i - q * nn)] + static_cast<double>(q * g.d);
    };
    res.derivative_min = INFINITY;
    res.derivative_max = -INFINITY;
    const double h = 1.0 / static_cast<double>(n);
    for (std::int64_t i = 0; i < nn; ++i) {
        const double der = (at(i + s) - at(i - s)) / (2.0 * static_cast<double>(s) * h);
        res.derivative_min = std::min(res.derivative_min, der);
        res.derivative_max = std::max(res.derivative_max, der);
    }
    res.max_deviation = std::max(std::abs(res.derivative_min - g.d), std::abs(res.derivative_max - g.d));
    return res;
}

double idempotence_error(const LinearizeResult& lin, int depth) {
    const LeafMeasureCDF fh = preimage_cdf(lin.map.d, [&](double z) { return lin.map.inverse(z); }, depth);
    const std::size_t n = std::size_t{1} << 16;
    double m = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(n);
        m = std::max(m, std::abs(fh(u) - u));
    }
    return m;
}

// --- Holonomy --------------------------------------------------------------

RnReport holonomy_rn_check(const ExpandingMap& g, const LeafMeasureCDF& F, double c, int samples, std::uint64_t seed,
                           double half_width) {
    if (!(c > 0.0)) throw invalid_input("roof constant must be positive");
    if (samples < 1 || !(half_width > 0.0 && half_width < 0.25)) throw invalid_input("bad holonomy check parameters");
    RnReport rep;
    rep.lambda = std::log(static_cast<double>(g.d)) / c;
    rep.samples = samples;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> branch(0, g.d - 1);

    // mu_p(h I) / mu_q(I) for the leaf at height u, I = [x - w, x + w], h = Phi^-eta.
    auto ratio = [&](double x, double u, double eta) {
        double a = x - half_width, b = x + half_width, v = u - eta;
        while (v < 0.0) {
            const int j = branch(rng);
            a = g.inverse(a + j);
            b = g.inverse(b + j);
            v += c;
        }
        const double mu_q = std::exp(rep.lambda * u) * (F.periodic(x + half_width) - F.periodic(x - half_width));
        const double mu_p = std::exp(rep.lambda * v) * (F.periodic(b) - F.periodic(a));
        return mu_p / mu_q;
    };

    for (int k = 0; k < samples; ++k) {
        const double x = unit(rng), u = c * unit(rng), eta = 2.0 * c * unit(rng);
        const double r = ratio(x, u, eta);
        rep.max_residual = std::max(rep.max_residual, std::abs(r * std::exp(rep.lambda * eta) - 1.0));
    }
    const double x = unit(rng), u = c * unit(rng);
    rep.residual_eta0 = std::abs(ratio(x, u, 0.0) - 1.0);
    rep.ratio_eta_c = ratio(x, u, c);
    return rep;
}

RegularityResult regularity_diagnostic(const LeafMeasureCDF& F, int resolution_bits, int j_min, int j_max) {
    if (!(1 <= j_min && j_min < j_max && j_max < resolution_bits && resolution_bits <= kMaxKnotBits))
        throw invalid_input("need 1 <= j_min < j_max < resolution_bits <= 24");
    const std::size_t n = std::size_t{1} << resolution_bits;
    std::vector<double> f(n + 1);
    for (std::size_t i = 0; i <= n; ++i) f[i] = F(static_cast<double>(i) / static_cast<double>(n));
    RegularityResult res;
    std::vector<double> xs, ys;
    for (int j = j_min; j <= j_max; ++j) {
        const std::size_t s = std::size_t{1} << (resolution_bits - j);
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t k = i + s;
            const double fk = k <= n ? f[k] : f[k - n] + 1.0;
            m = std::max(m, fk - f[i]);
        }
        const double h = std::ldexp(1.0, -j);
        res.modulus.emplace_back(h, m);
        xs.push_back(std::log(h));
        ys.push_back(std::log(m));
    }
    const auto [slope, icept] = fit_line(xs, ys);
    res.exponent = slope;
    res.constant = std::exp(icept);
    return res;
}

}  // namespace hyperdyn
