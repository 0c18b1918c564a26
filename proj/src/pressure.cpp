#include <algorithm>
#include <cmath>

#include "hyperdyn/errors.hpp"
#include "hyperdyn/parallel.hpp"
#include "hyperdyn/symbolic_flow.hpp"

namespace hyperdyn {

namespace {

constexpr double kAitkenFlag = 5e-3;

void check_range(int n_lo, int n_hi) {
    if (n_lo < 4 || n_hi > 14 || n_hi - n_lo < 2) throw invalid_input("pressure n range must lie in [4, 14] and span >= 3 values");
}

// Fills value/aitken/converged from raw.
void extrapolate(PressureResult& r) {
    const std::size_t m = r.raw.size();
    const double x0 = r.raw[m - 3].second, x1 = r.raw[m - 2].second, x2 = r.raw[m - 1].second;
    const double d1 = x1 - x0, d2 = x2 - x1, dd = d2 - d1;
    r.aitken = (dd != 0.0 && std::isfinite(d2 * d2 / dd)) ? x2 - d2 * d2 / dd : x2;
    r.value = r.aitken;
    r.converged = std::abs(x2 - r.aitken) <= kAitkenFlag;
}

// Pressure of -s * roof with the roof sums cached per n.
struct RoofSums {
    std::vector<int> ns;
    std::vector<std::vector<double>> sums;

    RoofSums(const SuspensionFlow& flow, int n_lo, int n_hi) {
        for (int n = n_lo; n <= n_hi; ++n) {
            ns.push_back(n);
            sums.push_back(birkhoff_sums(flow.base, flow.roof, n));
        }
    }

    PressureResult pressure(double s) const {
        PressureResult r;
        std::vector<double> w;
        for (std::size_t i = 0; i < ns.size(); ++i) {
            w.resize(sums[i].size());
            for (std::size_t j = 0; j < w.size(); ++j) w[j] = -s * sums[i][j];
            r.raw.emplace_back(ns[i], log_sum_exp(w) / ns[i]);
        }
        extrapolate(r);
        return r;
    }
};

}  // namespace

PressureResult pressure_base(const ToralAuto& A, const TrigPoly& f, int n_lo, int n_hi) {
    check_range(n_lo, n_hi);
    PressureResult r;
    for (int n = n_lo; n <= n_hi; ++n) r.raw.emplace_back(n, log_sum_exp(birkhoff_sums(A, f, n)) / n);
    extrapolate(r);
    return r;
}

EntropyResult entropy_suspension(const SuspensionFlow& flow, int n_lo, int n_hi) {
    check_range(n_lo, n_hi);
    const RoofSums cache(flow, n_lo, n_hi);
    const double p0 = cache.pressure(0.0).value;
    EntropyResult e;
    e.bracket_lo = 0.0;
    // The root lies below P(0) / min roof; widened 5% for the extrapolation error.
    e.bracket_hi = 1.05 * std::max(flow.base.log_lambda(), p0) / flow.roof_check.lower_bound();
    if (!(p0 > 0.0) || !(cache.pressure(e.bracket_hi).value < 0.0))
        throw Error(ErrorKind::NonConvergence, "bracket-failure", "Bowen root is not bracketed");
    double lo = e.bracket_lo, hi = e.bracket_hi;
    while (hi - lo > 1e-12 && e.iterations < 200) {
        const double mid = 0.5 * (lo + hi);
        (cache.pressure(mid).value > 0.0 ? lo : hi) = mid;
        ++e.iterations;
    }
    e.value = 0.5 * (lo + hi);
    e.converged = cache.pressure(e.value).converged;
    return e;
}

SrbReport srb_identity_check(const ToralAuto& A, int n, std::vector<double> lambdas) {
    if (n < 4 || n > 14) throw invalid_input("SRB check n must lie in [4, 14]");
    SrbReport rep;
    rep.n = n;
    const double ll = A.log_lambda();
    rep.unstable_sum = static_cast<double>(fixed_points(A, n).size()) * std::pow(A.lambda1, -n);
    rep.sum_ok = rep.unstable_sum >= 0.999 && rep.unstable_sum <= 1.001;
    rep.unstable_pressure = pressure_base(A, TrigPoly::constant(-ll), 4, n).value;
    rep.pressure_ok = std::abs(rep.unstable_pressure) <= 2e-3;
    rep.cases_ok = true;
    for (double lam : lambdas) {
        if (!(lam > 0.0)) throw invalid_input("SRB lambda must be positive");
        const SuspensionFlow flow(A, TrigPoly::constant(ll / lam));
        const double h = entropy_suspension(flow, 4, n).value;
        rep.cases.push_back({lam, h});
        rep.cases_ok = rep.cases_ok && std::abs(h - lam) <= 1e-6;
    }
    return rep;
}

std::uint64_t doubling_separated_count(int n, int k) {
    if (n < 1 || k < 1 || n + k > 14) throw invalid_input("doubling separated count needs n, k >= 1 and n + k <= 14");
    // Grid step 1/M; distances in units of 1/M; epsilon = 2^-k = 2^(n+1) units.
    const std::int64_t M = std::int64_t{1} << (n + k + 1);
    const std::int64_t eps = std::int64_t{1} << (n + 1);
    auto dn = [&](std::int64_t a, std::int64_t b) {
        std::int64_t best = 0;
        for (int i = 0; i < n; ++i) {
            const std::int64_t d = std::abs(((a << i) % M) - ((b << i) % M));
            best = std::max(best, std::min(d, M - d));
        }
        return best;
    };
    std::vector<std::int64_t> chosen;
    for (std::int64_t j = 0; j < M; ++j) {
        bool ok = true;
        for (std::int64_t c : chosen)
            if (dn(j, c) < eps) {
                ok = false;
                break;
            }
        if (ok) chosen.push_back(j);
    }
    return chosen.size();
}

}  // namespace hyperdyn
