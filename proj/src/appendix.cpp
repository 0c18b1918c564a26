#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>

#include "flow_detail.hpp"
#include "hyperdyn/errors.hpp"
#include "hyperdyn/parallel.hpp"
#include "hyperdyn/symbolic_flow.hpp"

namespace hyperdyn {

namespace {

using boost::multiprecision::cpp_rational;

cpp_rational exact(double x) { return cpp_rational(x); }

// Z(p) = int_0^t omega(X)(Phi^s p) ds with weights for the normalized
// volume on a grid x heights midpoint lattice.
struct VolumeSamples {
    std::vector<double> weight, z;
};

VolumeSamples volume_samples(const SuspensionFlow& flow, double omega_scalar, double t, int grid, int heights) {
    if (grid < 1 || heights < 1) throw invalid_input("volume grid and heights must be positive");
    if (!(t >= 0.0)) throw invalid_input("volume time must be >= 0");
    const std::size_t per_row = static_cast<std::size_t>(grid) * static_cast<std::size_t>(heights);
    VolumeSamples vs;
    vs.weight.resize(per_row * static_cast<std::size_t>(grid));
    vs.z.resize(vs.weight.size());
    parallel_for(static_cast<std::size_t>(grid), [&](std::size_t i) {
        for (int j = 0; j < grid; ++j) {
            const double x = (static_cast<double>(i) + 0.5) / grid, y = (j + 0.5) / grid;
            const double r = flow.roof(x, y);
            for (int m = 0; m < heights; ++m) {
                const FlowPoint p{x, y, r * (m + 0.5) / heights};
                const detail::Trajectory tr(flow, p, t);
                std::vector<double> rates;
                for (std::size_t s = 0; s < tr.start.size(); ++s) rates.push_back(omega_scalar / flow.roof(tr.x[s], tr.y[s]));
                const std::size_t k = i * per_row + static_cast<std::size_t>(j) * static_cast<std::size_t>(heights) + static_cast<std::size_t>(m);
                vs.weight[k] = r / heights;
                vs.z[k] = detail::PiecewiseLinear(tr, rates).at(t);
            }
        }
    });
    return vs;
}

double integral(const VolumeSamples& vs, double lambda_star) {
    std::vector<double> num(vs.weight.size());
    for (std::size_t k = 0; k < num.size(); ++k) num[k] = vs.weight[k] * std::exp(lambda_star * vs.z[k]);
    // Numerator and denominator use the same pairwise tree, so lambda_* = 0 gives exactly 1.
    return pairwise_sum(num) / pairwise_sum(vs.weight);
}

}  // namespace

DeltaBarReport delta_bar_chain(const SuspensionFlow& flow, double a_scalar, int n_table, std::vector<double> rescale_factors) {
    if (n_table < 1 || n_table > 12) throw invalid_input("delta-bar table period must lie in [1, 12]");
    TrigPoly roof_a = flow.roof;
    roof_a.c += a_scalar;
    const SuspensionFlow flow_a(flow.base, roof_a);

    DeltaBarReport rep;
    rep.a_scalar = a_scalar;
    rep.h_a = entropy_suspension(flow_a).value;
    rep.delta = 1.0 - 1.0 / rep.h_a;
    if (!(rep.delta < 1.0)) throw Error(ErrorKind::Internal, "delta-not-below-one", "delta >= 1 contradicts delta < 1");
    const double one_minus = 1.0 - rep.delta;

    const SuspensionFlow rescaled(flow.base, one_minus * roof_a);
    rep.rescaled_entropy = entropy_suspension(rescaled).value;
    rep.rescale_error = std::abs(rep.rescaled_entropy * one_minus - rep.h_a);
    for (double c : rescale_factors) {
        if (!(c > 0.0)) throw invalid_input("rescale factors must be positive");
        const SuspensionFlow fc(flow.base, c * roof_a);
        rep.rescale_checks.emplace_back(c, std::abs(entropy_suspension(fc).value * c - rep.h_a));
    }

    // Period bookkeeping in exact rationals: (1 - delta) tau_rho = tau + a(c_p).
    const cpp_rational om = 1 - exact(rep.delta);
    rep.period_residual_zero = true;
    for (const auto& o : periodic_orbits(flow, n_table)) {
        DeltaBarRow row;
        row.n = o.n;
        row.tau = o.tau;
        row.a_value = a_scalar * o.n;
        const cpp_rational rhs = exact(row.tau) + exact(row.a_value);
        const cpp_rational tau_rho = rhs / om;
        rep.period_residual_zero = rep.period_residual_zero && (om * tau_rho - rhs == 0);
        row.tau_rho = tau_rho.convert_to<double>();
        row.ju = o.ju;
        row.js = o.js;
        row.j = o.ju + o.js;
        row.delta_tau_rho = rep.delta * row.tau_rho;
        row.a_over = row.a_value / one_minus;
        rep.table.push_back(row);
    }
    return rep;
}

double volume_integral(const SuspensionFlow& flow, double omega_scalar, double t, double lambda_star, int grid, int heights) {
    if (!(omega_scalar > 0.0)) throw invalid_input("omega must be positive");
    return integral(volume_samples(flow, omega_scalar, t, grid, heights), lambda_star);
}

SolvableReport solvable_volume_audit(const SuspensionFlow& flow, const SolvableOptions& opts) {
    if (!(opts.omega_scalar > 0.0)) throw invalid_input("omega must be positive");
    if (!(opts.lambda_lo < 0.0 && opts.lambda_hi > 0.0)) throw invalid_input("lambda_* range must contain 0 in its interior");
    if (opts.curve_points < 3) throw invalid_input("curve needs at least 3 points");
    SolvableReport rep;
    rep.omega_scalar = opts.omega_scalar;

    const auto orbits = periodic_orbits(flow, opts.n_orbits);
    for (const auto& tr : opts.triples) {
        if (!(tr.delta < 1.0)) throw invalid_input("planted delta must be < 1");
        SolvableReport::Planted pl;
        pl.triple = tr;
        pl.closed_form = (tr.lambda - tr.delta * tr.lambda_s) / (1.0 - tr.delta);
        std::vector<double> omega, J, tau;
        for (const auto& o : orbits) {
            const double w = opts.omega_scalar * static_cast<double>(o.homology);
            const double t = (tr.lambda - tr.lambda_s) * w / (1.0 - tr.delta);
            omega.push_back(w);
            tau.push_back(t);
            J.push_back(t + tr.lambda_s * w);
        }
        std::vector<double> jw(omega.size()), ww(omega.size());
        for (std::size_t i = 0; i < omega.size(); ++i) {
            jw[i] = J[i] * omega[i];
            ww[i] = omega[i] * omega[i];
        }
        pl.lambda_star = pairwise_sum(jw) / pairwise_sum(ww);
        for (std::size_t i = 0; i < omega.size(); ++i) {
            pl.fit_residual = std::max(pl.fit_residual, std::abs(J[i] - pl.lambda_star * omega[i]));
            pl.solvable2_residual = std::max(pl.solvable2_residual, std::abs(J[i] - (tr.delta * tau[i] + tr.lambda * omega[i])));
        }
        rep.planted.push_back(pl);
    }

    for (double t : opts.times) {
        const VolumeSamples vs = volume_samples(flow, opts.omega_scalar, t, opts.grid, opts.heights);
        SolvableReport::Volume v;
        v.t = t;
        for (int i = 0; i < opts.curve_points; ++i) {
            const double l = opts.lambda_lo + (opts.lambda_hi - opts.lambda_lo) * i / (opts.curve_points - 1);
            v.curve.emplace_back(l, integral(vs, l));
        }
        v.increasing = true;
        for (std::size_t i = 1; i < v.curve.size(); ++i) v.increasing = v.increasing && v.curve[i].second > v.curve[i - 1].second;
        v.i_at_zero = integral(vs, 0.0);
        double lo = opts.lambda_lo, hi = opts.lambda_hi;
        if (!(integral(vs, lo) < 1.0 && integral(vs, hi) > 1.0))
            throw Error(ErrorKind::NonConvergence, "bracket-failure", "I(t, lambda_*) - 1 does not change sign on the range");
        while (hi - lo > 1e-12) {
            const double mid = 0.5 * (lo + hi);
            (integral(vs, mid) > 1.0 ? hi : lo) = mid;
        }
        v.root = 0.5 * (lo + hi);
        rep.volumes.push_back(std::move(v));
    }
    return rep;
}

}  // namespace hyperdyn
