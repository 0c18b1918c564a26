#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hyperdyn {

// ---------------------------------------------------------------------------
// Base map

/// Hyperbolic element of SL(2,Z) acting on T^2 = R^2/Z^2.
struct ToralAuto {
    std::array<std::int64_t, 4> a{};  // row-major [[a0,a1],[a2,a3]]
    double lambda1 = 0.0;            // |eigenvalue| > 1
    std::array<double, 2> unstable{}, stable{};  // unit eigenvectors

    /// Validates det = 1 and |tr| > 2.
    static ToralAuto make(std::int64_t a0, std::int64_t a1, std::int64_t a2, std::int64_t a3);
    std::int64_t trace() const { return a[0] + a[3]; }
    double log_lambda() const;
};

/// Point of T^2 with rational coordinates (x, y) / den, 0 <= x, y < den.
struct RatPoint {
    std::int64_t x = 0, y = 0, den = 1;
    friend auto operator<=>(const RatPoint&, const RatPoint&) = default;

    double xd() const { return static_cast<double>(x) / static_cast<double>(den); }
    double yd() const { return static_cast<double>(y) / static_cast<double>(den); }
    // Each coordinate as a reduced fraction {num, den}.
    std::array<std::int64_t, 2> x_frac() const;
    std::array<std::int64_t, 2> y_frac() const;
};

// A p mod Z^2, exact.
RatPoint apply(const ToralAuto& A, const RatPoint& p);

/// Solutions of (A^n - I) x = 0 mod Z^2, from the Smith normal form of
/// A^n - I over big integers. Sorted by (x, y) on the common denominator
/// |det(A^n - I)|'s largest invariant factor. Count = |tr A^n - 2|.
std::vector<RatPoint> fixed_points(const ToralAuto& A, int n);

// tr A^n computed in big integers; throws when it does not fit int64.
std::int64_t trace_power(const ToralAuto& A, int n);

// ---------------------------------------------------------------------------
// Functions on T^2

struct TrigTerm {
    int k1 = 0, k2 = 0;
    double cos_coeff = 0.0, sin_coeff = 0.0;
};

/// c + sum (a cos 2 pi k.x + b sin 2 pi k.x).
struct TrigPoly {
    double c = 0.0;
    std::vector<TrigTerm> terms;

    static TrigPoly constant(double c) { return {c, {}}; }
    double operator()(double x, double y) const;
    double operator()(const RatPoint& p) const { return (*this)(p.xd(), p.yd()); }
    // Lipschitz bound in the Euclidean metric on T^2.
    double lipschitz() const;
    // f o A as a trig polynomial (frequencies k -> A^T k).
    TrigPoly compose(const ToralAuto& A) const;
};

TrigPoly operator+(const TrigPoly& f, const TrigPoly& g);
TrigPoly operator*(double s, const TrigPoly& f);
// beta - beta o A: a coboundary for the base map.
TrigPoly coboundary(const ToralAuto& A, const TrigPoly& beta);

/// Positivity proxy: grid minimum over an n x n grid and the modulus
/// of continuity bound Lip * (cell diagonal) / 2.
struct PositivityCheck {
    double grid_min = 0.0;
    double modulus = 0.0;
    bool positive() const { return grid_min > 0.0 && grid_min >= 10.0 * modulus; }
    // A certified lower bound for the true minimum.
    double lower_bound() const { return grid_min - modulus; }
};
PositivityCheck check_positive(const TrigPoly& f, int grid = 256);

// ---------------------------------------------------------------------------
// Suspension flows and periodic orbits

struct SuspensionFlow {
    ToralAuto base;
    TrigPoly roof;
    PositivityCheck roof_check;

    /// Throws invalid-input when the roof fails the positivity proxy.
    SuspensionFlow(ToralAuto A, TrigPoly r);
};

/// Periodic orbit of the suspension through the base point x of least
/// period n. homology = n pairs with the fiber generator.
struct PeriodicOrbitT {
    RatPoint x;  // lexicographically least point of the base orbit
    int n = 0;
    double tau = 0.0;
    std::int64_t homology = 0;
    double ju = 0.0, js = 0.0;
};

// Prime periodic orbits with least period 1..n_max.
std::vector<PeriodicOrbitT> periodic_orbits(const SuspensionFlow& flow, int n_max);

/// Rows n,x_num,x_den,y_num,y_den,tau,Ju,Js,homology for every point of
/// Fix(A^n), tau being the roof sum over n steps.
std::string fixed_points_csv(const SuspensionFlow& flow, int n);

// S_n f(x) = sum_{k<n} f(A^k x) for every x in Fix(A^n), in fixed_points order.
std::vector<double> birkhoff_sums(const ToralAuto& A, const TrigPoly& f, int n);

// ---------------------------------------------------------------------------
// Pressure and entropy

struct PressureResult {
    double value = 0.0;   // extrapolated
    double aitken = 0.0;  // Aitken delta^2 on the last three P_n
    std::vector<std::pair<int, double>> raw;  // (n, P_n)
    bool converged = true;  // |P_last - aitken| <= 5e-3
};

/// Periodic-orbit estimator P_n = (1/n) log sum_{Fix(A^n)} exp S_n f with
/// Aitken extrapolation over n in [n_lo, n_hi] (a subrange of [4, 14]).
PressureResult pressure_base(const ToralAuto& A, const TrigPoly& f, int n_lo = 4, int n_hi = 12);

struct EntropyResult {
    double value = 0.0;
    double bracket_lo = 0.0, bracket_hi = 0.0;
    int iterations = 0;
    bool converged = true;  // pressure extrapolation at the root
};

/// Bowen root: the s with pressure_base(A, -s roof) = 0, by bisection to 1e-12.
EntropyResult entropy_suspension(const SuspensionFlow& flow, int n_lo = 4, int n_hi = 12);

struct SrbReport {
    int n = 0;
    double unstable_sum = 0.0;       // sum_{Fix(A^n)} lambda1^-n
    double unstable_pressure = 0.0;  // pressure_base(A, -log lambda1)
    struct Case {
        double lambda = 0.0, entropy = 0.0;
    };
    std::vector<Case> cases;  // constant roof log(lambda1) / lambda
    bool sum_ok = false, pressure_ok = false, cases_ok = false;
    bool all_pass() const { return sum_ok && pressure_ok && cases_ok; }
};

SrbReport srb_identity_check(const ToralAuto& A, int n = 12, std::vector<double> lambdas = {0.5, 1.0, 2.0});

/// Doubling map x -> 2x on the circle: size of a greedy maximal
/// (n, 2^-k)-separated set, scanning the dyadic grid of step 2^-(n+k+1).
/// Separation means d_n(x, y) >= 2^-k with d_n the max over the first n
/// iterates of circle distance.
std::uint64_t doubling_separated_count(int n, int k);

// ---------------------------------------------------------------------------
// Livschitz

struct OrbitBeta {
    int n = 0;
    std::vector<RatPoint> points;  // orbit order starting at the anchor
    std::vector<double> beta;      // beta(anchor) = 0, beta(Ax) = beta(x) - f(x)
    double orbit_sum = 0.0;
};

struct LivschitzResult {
    std::vector<OrbitBeta> orbits;
    double max_orbit_sum = 0.0;
    // Hoelder diagnostic after aligning each orbit's constant to the
    // orbit closest to it: |beta(x) - beta(y)| <= C d(x,y)^theta.
    double holder_exponent = 0.0, holder_constant = 0.0;
};

/// Solves beta - beta o A = f along every prime orbit of least period
/// <= n_max. Throws invalid-input tagged "hypothesis-violated" when some
/// orbit sum exceeds tol.
LivschitzResult livschitz_solve(const ToralAuto& A, const TrigPoly& f, int n_max, double tol = 1e-9);

// max over orbits of the spread of beta - beta0 (zero for exact recovery).
double recovery_spread(const LivschitzResult& r, const TrigPoly& beta0);

// ---------------------------------------------------------------------------
// Averaging smoother

/// Point of the suspension: base point x in [0,1)^2 and height u in [0, roof(x)).
struct FlowPoint {
    double x = 0.0, y = 0.0, u = 0.0;
};

// Phi^t(p) for t >= 0.
FlowPoint flow_map(const SuspensionFlow& flow, FlowPoint p, double t);

/// alpha(p, t) = int_0^t f(Phi^s p) ds for a generator f constant on
/// fibers; exact (piecewise linear in t).
double cocycle(const SuspensionFlow& flow, const TrigPoly& f, FlowPoint p, double t);

struct SmootherOptions {
    double lambda_prime = 0.0;  // required, < min orbit rate
    int grid = 128;             // base grid for the T search and beta export
    int heights = 4;            // fiber heights per base grid point
    int max_doublings = 10;     // T <= 2^max_doublings
    int nodes_per_unit = 1024;  // midpoint nodes per unit of T
    int orbit_n_max = 8;
    int samples = 1000;
    double t_max = 5.0;
    std::uint64_t seed = 0;
};

struct SmootherResult {
    double lambda = 0.0;  // min orbit rate alpha(p, tau)/tau over n <= orbit_n_max
    double T = 0.0;
    std::vector<double> beta_grid;  // grid x grid, row-major in x then y, at height 0
    double min_slack = 0.0;         // min over samples of LHS - lambda' t
    double identity_residual = 0.0; // max |LHS - RHS|
    bool inequality_ok = false, identity_ok = false;
};

// min over prime orbits of least period <= n_max of alpha(p, tau) / tau.
double min_orbit_rate(const SuspensionFlow& flow, const TrigPoly& f, int n_max);

/// beta(p) = (1/T) int_0^T alpha(p, s) ds with T the smallest power of two
/// such that alpha(p, T) >= lambda' T on the grid. Checks
/// alpha(p,t) + beta(Phi^t p) - beta(p) >= lambda' t and its exact form
/// (1/T) int_0^t alpha(Phi^s p, T) ds on random (p, t), t in [0, t_max].
/// Throws non-convergence tagged "no-valid-T" when the search fails and
/// invalid-input when lambda' is not below the orbit rate.
SmootherResult averaging_smoother(const SuspensionFlow& flow, const TrigPoly& f, const SmootherOptions& opts);

// ---------------------------------------------------------------------------
// Period bookkeeping and the solvable-case volume argument

struct DeltaBarRow {
    int n = 0;
    double tau = 0.0;        // measured: roof sum
    double a_value = 0.0;    // definitional: a_scalar * n
    double tau_rho = 0.0;    // definitional: (tau + a) / (1 - delta)
    double ju = 0.0, js = 0.0;  // measured: +-n log lambda1
    double j = 0.0;             // ju + js
    double delta_tau_rho = 0.0; // delta * tau_rho
    double a_over = 0.0;        // a / (1 - delta)
};

struct DeltaBarReport {
    double a_scalar = 0.0;
    double h_a = 0.0;
    double delta = 0.0;
    bool period_residual_zero = false;  // exact rational check of (1 - delta) tau_rho = tau + a
    double rescaled_entropy = 0.0;      // entropy(roof_a (1 - delta))
    double rescale_error = 0.0;         // |rescaled (1 - delta) - h_a|
    std::vector<std::pair<double, double>> rescale_checks;  // (c, |entropy(c roof) c - entropy(roof)|)
    std::vector<DeltaBarRow> table;
};

/// Throws invalid-input when roof + a_scalar is not positive and
/// non-convergence when delta >= 1.
DeltaBarReport delta_bar_chain(const SuspensionFlow& flow, double a_scalar, int n_table = 6,
                               std::vector<double> rescale_factors = {0.5, 2.0});

struct PlantedTriple {
    double delta = 0.0, lambda = 0.0, lambda_s = 0.0;
};

struct SolvableReport {
    struct Planted {
        PlantedTriple triple;
        double lambda_star = 0.0;    // least squares from J = lambda_* omega(c_p)
        double closed_form = 0.0;    // (lambda - delta lambda_s) / (1 - delta)
        double fit_residual = 0.0;   // max |J - lambda_* omega|
        double solvable2_residual = 0.0;  // max |J - (delta tau + lambda omega)|
    };
    std::vector<Planted> planted;
    struct Volume {
        double t = 0.0;
        std::vector<std::pair<double, double>> curve;  // (lambda_*, I)
        bool increasing = false;
        double i_at_zero = 0.0;
        double root = 0.0;
    };
    std::vector<Volume> volumes;
    double omega_scalar = 0.0;
};

struct SolvableOptions {
    double omega_scalar = 1.0;
    double lambda_lo = -0.5, lambda_hi = 0.5;
    int curve_points = 21;
    std::vector<double> times = {1.0, 2.0, 4.0};
    int grid = 64;     // base grid
    int heights = 16;  // fiber cells
    int n_orbits = 6;
    std::vector<PlantedTriple> triples = {{0.3, 0.2, -1.0}, {0.1, 1.0, -0.5}, {-0.4, 0.7, -2.0}};
};

/// Volume integral I(t, lambda_*) = int exp(lambda_* int_0^t omega(X) o Phi^s ds) dv
/// over the normalized suspension volume, omega(X) = omega_scalar / roof.
double volume_integral(const SuspensionFlow& flow, double omega_scalar, double t, double lambda_star, int grid = 64,
                       int heights = 16);

SolvableReport solvable_volume_audit(const SuspensionFlow& flow, const SolvableOptions& opts = {});

}  // namespace hyperdyn
