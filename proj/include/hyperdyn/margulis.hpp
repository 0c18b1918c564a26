#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace hyperdyn {

/// Analytic expanding circle map g(x) = d x + (eps / 2 pi) sin(2 pi x) mod 1,
/// handled through its lift G with G(x + 1) = G(x) + d.
struct ExpandingMap {
    int d = 2;
    double eps = 0.0;

    /// Requires d >= 2 and |eps| <= d - 1.1 so that g' >= 1.1.
    static ExpandingMap make(int d, double eps);
    double lift(double x) const;
    double derivative(double x) const;
    // Inverse of the lift on all of R.
    double inverse(double z) const;
};

/// CDF of a measure on [0,1) stored as quantile knots: F(knots[i]) = i / N,
/// linear in between, F(1) = 1. F^-1 at the grid i / N is exact.
class LeafMeasureCDF {
public:
    LeafMeasureCDF() = default;
    /// Throws invalid-input unless knots start at 0, lie in [0,1) and
    /// strictly increase.
    explicit LeafMeasureCDF(std::vector<double> knots);

    double operator()(double y) const;  // y in [0, 1]
    // Periodic extension F(x + 1) = F(x) + 1.
    double periodic(double x) const;
    double inverse(double u) const;  // u in [0, 1]
    std::size_t size() const { return knots_.size(); }
    const std::vector<double>& knots() const { return knots_; }
    // y,F rows every `stride` knots plus the endpoint (1,1).
    std::string csv(std::size_t stride = 1) const;

private:
    std::vector<double> knots_;
};

/// Limit of uniform measures on the depth-level preimages of 0 under a
/// degree-d lift, given its inverse on R. Level k+1 is the concatenation
/// over branches j of inverse(level_k + j), which keeps it sorted.
LeafMeasureCDF preimage_cdf(int d, const std::function<double(double)>& inverse_lift, int depth);

/// Measure of maximal entropy of g. resolution_bits > 0 demands at least
/// 2^resolution_bits knots (resolution error otherwise).
LeafMeasureCDF mme_cdf(const ExpandingMap& g, int depth, int resolution_bits = 0);

// max |F(y) - G(y)| on a uniform grid of 2^grid_bits + 1 points.
double cdf_distance(const LeafMeasureCDF& a, const LeafMeasureCDF& b, int grid_bits = 16);

struct ScalingReport {
    int intervals = 0;
    double max_residual = 0.0;  // max |mu(g I) - d mu(I)|
};

/// mu(g(I)) = d mu(I) on random intervals I of length <= max_len that g
/// maps injectively (G(I) meets no integer).
ScalingReport scaling_check(const ExpandingMap& g, const LeafMeasureCDF& F, int n_intervals, std::uint64_t seed,
                            double max_len = 0.05);

/// Degree-d lift sampled at u_i = i / N, linear in between, extended by
/// G(u + 1) = G(u) + d.
struct GridLift {
    int d = 2;
    std::vector<double> values;

    double operator()(double u) const;
    double inverse(double z) const;
};

struct LinearizeResult {
    GridLift map;
    int step_cells = 4;
    double derivative_min = 0.0, derivative_max = 0.0;
    double max_deviation = 0.0;  // max |g_hat' - d|
};

/// g_hat = F o G o F^-1 on the grid u_i = i / 2^resolution_bits with central
/// differences over 4 cells. F must have at least that many knots.
LinearizeResult linearize(const ExpandingMap& g, const LeafMeasureCDF& F, int resolution_bits = 20);

// max |F_hat(u) - u| where F_hat is the MME CDF of the linearized map.
double idempotence_error(const LinearizeResult& lin, int depth = 16);

struct RnReport {
    double lambda = 0.0;  // log d / c
    int samples = 0;
    double max_residual = 0.0;  // max |ratio * exp(lambda eta) - 1|
    double residual_eta0 = 0.0;
    double ratio_eta_c = 0.0;  // ratio at eta = c (should be 1/d)
};

/// Suspension semiflow of g with constant roof c; the leaf measure at
/// height s is exp(lambda s) mu_MME. Holonomy h = Phi^-eta along the flow
/// (random inverse branches when crossing the base). Compares
/// mu_p(h I) / mu_q(I) with exp(-lambda eta) on intervals of half-width w.
RnReport holonomy_rn_check(const ExpandingMap& g, const LeafMeasureCDF& F, double c, int samples, std::uint64_t seed,
                           double half_width = 0.01);

struct RegularityResult {
    double exponent = 0.0, constant = 0.0;
    std::vector<std::pair<double, double>> modulus;  // (h, max |F(x+h) - F(x)|)
};

/// Least-squares slope of log max_x |F(x+h) - F(x)| against log h over
/// h = 2^-j, j in [j_min, j_max], x on the grid of step 2^-resolution_bits.
RegularityResult regularity_diagnostic(const LeafMeasureCDF& F, int resolution_bits = 16, int j_min = 3, int j_max = 12);

}  // namespace hyperdyn
