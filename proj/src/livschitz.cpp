#include <algorithm>
#include <cmath>
#include <map>

#include "flow_detail.hpp"
#include "hyperdyn/errors.hpp"
#include "hyperdyn/parallel.hpp"
#include "hyperdyn/symbolic_flow.hpp"

namespace hyperdyn {

namespace {

constexpr int kHolderMaxPeriod = 8;

double torus_distance(const RatPoint& p, const RatPoint& q) {
    auto circ = [](double d) {
        d = std::abs(d);
        return std::min(d, 1.0 - d);
    };
    return std::hypot(circ(p.xd() - q.xd()), circ(p.yd() - q.yd()));
}

// Least-squares slope/intercept of log(max |dbeta|) against log(bin edge)
// over dyadic distance bins.
void holder_fit(LivschitzResult& r) {
    struct Pt {
        RatPoint p;
        double beta;
        std::size_t orbit;
    };
    std::vector<std::size_t> idx;
    for (std::size_t o = 0; o < r.orbits.size(); ++o)
        if (r.orbits[o].n <= kHolderMaxPeriod) idx.push_back(o);
    if (idx.size() < 2) return;
    // Largest orbits first; each later orbit is shifted to agree with the
    // already aligned points at its closest approach.
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return r.orbits[a].n > r.orbits[b].n; });
    std::vector<Pt> aligned;
    for (std::size_t o : idx) {
        const OrbitBeta& ob = r.orbits[o];
        double shift = 0.0;
        if (!aligned.empty()) {
            double best = INFINITY;
            for (std::size_t j = 0; j < ob.points.size(); ++j)
                for (const auto& a : aligned) {
                    const double d = torus_distance(ob.points[j], a.p);
                    if (d < best) {
                        best = d;
                        shift = a.beta - ob.beta[j];
                    }
                }
        }
        for (std::size_t j = 0; j < ob.points.size(); ++j) aligned.push_back({ob.points[j], ob.beta[j] + shift, o});
    }

    constexpr int kBins = 12;
    std::vector<double> bin_max(kBins, 0.0);
    std::vector<char> bin_used(kBins, 0);
    for (std::size_t i = 0; i < aligned.size(); ++i)
        for (std::size_t j = i + 1; j < aligned.size(); ++j) {
            const double d = torus_distance(aligned[i].p, aligned[j].p);
            if (d <= 0.0 || d >= 0.25) continue;
            const int b = static_cast<int>(std::floor(-std::log2(d)));  // d in [2^-(b+1), 2^-b)
            if (b < 2 || b >= kBins) continue;
            bin_max[static_cast<std::size_t>(b)] = std::max(bin_max[static_cast<std::size_t>(b)], std::abs(aligned[i].beta - aligned[j].beta));
            bin_used[static_cast<std::size_t>(b)] = 1;
        }
    std::vector<double> xs, ys;
    for (int b = 0; b < kBins; ++b)
        if (bin_used[static_cast<std::size_t>(b)] && bin_max[static_cast<std::size_t>(b)] > 0.0) {
            xs.push_back(-b * std::log(2.0));
            ys.push_back(std::log(bin_max[static_cast<std::size_t>(b)]));
        }
    if (xs.size() < 2) return;
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    r.holder_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    r.holder_constant = std::exp((sy - r.holder_exponent * sx) / n);
}

}  // namespace

LivschitzResult livschitz_solve(const ToralAuto& A, const TrigPoly& f, int n_max, double tol) {
    if (n_max < 1 || n_max > 14) throw invalid_input("livschitz n_max must lie in [1, 14]");
    LivschitzResult r;
    for (auto& orbit : detail::prime_orbits(A, n_max)) {
        OrbitBeta ob;
        ob.n = static_cast<int>(orbit.size());
        std::vector<double> fv;
        for (const auto& p : orbit) fv.push_back(f(p));
        ob.orbit_sum = pairwise_sum(fv);
        ob.beta.resize(orbit.size());
        for (std::size_t j = 1; j < orbit.size(); ++j) ob.beta[j] = ob.beta[j - 1] - fv[j - 1];
        ob.points = std::move(orbit);
        r.max_orbit_sum = std::max(r.max_orbit_sum, std::abs(ob.orbit_sum));
        r.orbits.push_back(std::move(ob));
    }
    if (r.max_orbit_sum > tol)
        throw Error(ErrorKind::InvalidInput, "hypothesis-violated",
                    "orbit sums do not vanish (max " + std::to_string(r.max_orbit_sum) + "); f is not a coboundary");
    holder_fit(r);
    return r;
}

double recovery_spread(const LivschitzResult& r, const TrigPoly& beta0) {
    double spread = 0.0;
    for (const auto& ob : r.orbits) {
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t j = 0; j < ob.points.size(); ++j) {
            const double d = ob.beta[j] - beta0(ob.points[j]);
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
        spread = std::max(spread, hi - lo);
    }
    return spread;
}

}  // namespace hyperdyn
