#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "hyperdyn/symbolic_flow.hpp"

namespace hyperdyn::detail {

std::vector<std::vector<RatPoint>> prime_orbits(const ToralAuto& A, int n_max);

// x -> A x mod 1 on doubles (used for non-rational flow points).
inline void step_base(const ToralAuto& A, double& x, double& y) {
    const double nx = A.a[0] * x + A.a[1] * y, ny = A.a[2] * x + A.a[3] * y;
    x = nx - std::floor(nx);
    y = ny - std::floor(ny);
}

/// Forward orbit of a flow point cut into fiber segments: segment j starts
/// at time start[j] with base point (x[j], y[j]). Lets piecewise linear
/// integrals along the orbit be evaluated exactly.
struct Trajectory {
    std::vector<double> start, x, y;

    Trajectory(const SuspensionFlow& flow, FlowPoint p, double horizon) {
        double t = 0.0, u = p.u;
        double bx = p.x, by = p.y;
        while (true) {
            start.push_back(t);
            x.push_back(bx);
            y.push_back(by);
            const double rest = flow.roof(bx, by) - u;
            if (t + rest > horizon) break;
            t += rest;
            u = 0.0;
            step_base(flow.base, bx, by);
        }
    }

    std::size_t segment(double s) const {
        const auto it = std::upper_bound(start.begin(), start.end(), s);
        return static_cast<std::size_t>(it - start.begin()) - 1;
    }
};

/// int_0^s g along the trajectory for g constant on each segment
/// (rate[j]), and its antiderivative.
struct PiecewiseLinear {
    std::vector<double> start, rate, value, integral;  // value/integral at segment starts

    PiecewiseLinear(const Trajectory& tr, const std::vector<double>& rates) : start(tr.start), rate(rates) {
        value.resize(start.size());
        integral.resize(start.size());
        for (std::size_t j = 1; j < start.size(); ++j) {
            const double h = start[j] - start[j - 1];
            value[j] = value[j - 1] + rate[j - 1] * h;
            integral[j] = integral[j - 1] + value[j - 1] * h + 0.5 * rate[j - 1] * h * h;
        }
    }

    std::size_t seg(double s) const {
        const auto it = std::upper_bound(start.begin(), start.end(), s);
        return static_cast<std::size_t>(it - start.begin()) - 1;
    }
    double at(double s) const {
        const std::size_t j = seg(s);
        return value[j] + rate[j] * (s - start[j]);
    }
    double antiderivative(double s) const {
        const std::size_t j = seg(s);
        const double h = s - start[j];
        return integral[j] + value[j] * h + 0.5 * rate[j] * h * h;
    }
};

}  // namespace hyperdyn::detail
