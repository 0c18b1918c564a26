#include <algorithm>
#include <cmath>
#include <random>

#include "flow_detail.hpp"
#include "hyperdyn/errors.hpp"
#include "hyperdyn/parallel.hpp"
#include "hyperdyn/symbolic_flow.hpp"

namespace hyperdyn {

using detail::PiecewiseLinear;
using detail::Trajectory;

namespace {

constexpr double kIdentityTol = 1e-4;

PiecewiseLinear cocycle_along(const SuspensionFlow& flow, const TrigPoly& f, const FlowPoint& p, double horizon) {
    const Trajectory tr(flow, p, horizon);
    std::vector<double> rates;
    for (std::size_t j = 0; j < tr.start.size(); ++j) rates.push_back(f(tr.x[j], tr.y[j]));
    return PiecewiseLinear(tr, rates);
}

// (1/T) int_0^T alpha(p, s) ds by the composite midpoint rule.
double beta_midpoint(const PiecewiseLinear& alpha, double T, int nodes) {
    std::vector<double> v(static_cast<std::size_t>(nodes));
    const double h = T / nodes;
    for (int i = 0; i < nodes; ++i) v[static_cast<std::size_t>(i)] = alpha.at((i + 0.5) * h);
    return pairwise_sum(v) * h / T;
}

void check_point(const SuspensionFlow& flow, const FlowPoint& p) {
    if (!(p.u >= 0.0) || !(p.u < flow.roof(p.x, p.y))) throw invalid_input("flow point height outside [0, roof)");
}

}  // namespace

FlowPoint flow_map(const SuspensionFlow& flow, FlowPoint p, double t) {
    if (!(t >= 0.0)) throw invalid_input("flow time must be >= 0");
    check_point(flow, p);
    // Same stepping as Trajectory so both see identical base points.
    const Trajectory tr(flow, p, t);
    const std::size_t last = tr.start.size() - 1;
    const double u0 = last == 0 ? p.u : 0.0;
    return {tr.x[last], tr.y[last], u0 + (t - tr.start[last])};
}

double cocycle(const SuspensionFlow& flow, const TrigPoly& f, FlowPoint p, double t) {
    if (!(t >= 0.0)) throw invalid_input("cocycle time must be >= 0");
    check_point(flow, p);
    return cocycle_along(flow, f, p, t).at(t);
}

double min_orbit_rate(const SuspensionFlow& flow, const TrigPoly& f, int n_max) {
    if (n_max < 1) throw invalid_input("orbit period bound must be >= 1");
    double rate = INFINITY;
    for (const auto& orbit : detail::prime_orbits(flow.base, n_max)) {
        std::vector<double> num, den;
        for (const auto& q : orbit) {
            const double r = flow.roof(q);
            num.push_back(f(q) * r);
            den.push_back(r);
        }
        rate = std::min(rate, pairwise_sum(num) / pairwise_sum(den));
    }
    return rate;
}

SmootherResult averaging_smoother(const SuspensionFlow& flow, const TrigPoly& f, const SmootherOptions& opts) {
    if (opts.grid < 2 || opts.heights < 1 || opts.nodes_per_unit < 1 || opts.samples < 1 || !(opts.t_max > 0.0))
        throw invalid_input("smoother grid, heights, nodes and samples must be positive");
    SmootherResult res;

    res.lambda = min_orbit_rate(flow, f, opts.orbit_n_max);
    const double lp = opts.lambda_prime;
    if (!(lp <= res.lambda + 1e-12 * std::abs(res.lambda)))
        throw invalid_input("lambda' = " + std::to_string(lp) + " is not below the minimal orbit rate " + std::to_string(res.lambda));

    // Grid points for the T search.
    const int g = opts.grid;
    std::vector<FlowPoint> grid_pts;
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            const double x = static_cast<double>(i) / g, y = static_cast<double>(j) / g;
            const double r = flow.roof(x, y);
            for (int m = 0; m < opts.heights; ++m) grid_pts.push_back({x, y, r * m / opts.heights});
        }
    res.T = 0.0;
    for (int d = 0; d <= opts.max_doublings; ++d) {
        const double T = std::ldexp(1.0, d);
        std::vector<char> ok(static_cast<std::size_t>(g), 1);
        const std::size_t per_row = grid_pts.size() / static_cast<std::size_t>(g);
        parallel_for(static_cast<std::size_t>(g), [&](std::size_t row) {
            for (std::size_t k = row * per_row; k < (row + 1) * per_row; ++k)
                if (cocycle_along(flow, f, grid_pts[k], T).at(T) < lp * T - 1e-12 * T) {
                    ok[row] = 0;
                    return;
                }
        });
        if (std::all_of(ok.begin(), ok.end(), [](char c) { return c; })) {
            res.T = T;
            break;
        }
    }
    if (res.T == 0.0)
        throw Error(ErrorKind::NonConvergence, "no-valid-T", "no T <= 2^" + std::to_string(opts.max_doublings) + " satisfies alpha(p,T) >= lambda' T on the grid");
    const double T = res.T;
    const int nodes = static_cast<int>(std::lround(opts.nodes_per_unit * T));

    // beta on the base grid at height 0.
    res.beta_grid.resize(static_cast<std::size_t>(g) * static_cast<std::size_t>(g));
    parallel_for(static_cast<std::size_t>(g), [&](std::size_t i) {
        for (int j = 0; j < g; ++j) {
            const FlowPoint p{static_cast<double>(i) / g, static_cast<double>(j) / g, 0.0};
            res.beta_grid[i * static_cast<std::size_t>(g) + static_cast<std::size_t>(j)] = beta_midpoint(cocycle_along(flow, f, p, T), T, nodes);
        }
    });

    // Random (p, t) checks.
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<FlowPoint> ps(static_cast<std::size_t>(opts.samples));
    std::vector<double> ts(ps.size());
    for (std::size_t k = 0; k < ps.size(); ++k) {
        const double x = unit(rng), y = unit(rng);
        ps[k] = {x, y, unit(rng) * flow.roof(x, y)};
        ts[k] = unit(rng) * opts.t_max;
    }
    std::vector<double> slack(ps.size()), resid(ps.size());
    parallel_for(ps.size(), [&](std::size_t k) {
        const double t = ts[k];
        const PiecewiseLinear a = cocycle_along(flow, f, ps[k], T + t);
        const FlowPoint q = flow_map(flow, ps[k], t);
        const double lhs = a.at(t) + beta_midpoint(cocycle_along(flow, f, q, T), T, nodes) - beta_midpoint(a, T, nodes);
        // (1/T) int_0^t alpha(Phi^s p, T) ds with alpha(Phi^s p, T) = A(s + T) - A(s).
        const double rhs = (a.antiderivative(T + t) - a.antiderivative(T) - a.antiderivative(t)) / T;
        slack[k] = lhs - lp * t;
        resid[k] = std::abs(lhs - rhs);
    });
    res.min_slack = *std::min_element(slack.begin(), slack.end());
    res.identity_residual = *std::max_element(resid.begin(), resid.end());
    res.identity_ok = res.identity_residual <= kIdentityTol;
    res.inequality_ok = res.min_slack >= -kIdentityTol;
    return res;
}

}  // namespace hyperdyn
