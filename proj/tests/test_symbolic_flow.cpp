#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <tuple>

#include "doctest.h"
#include "hyperdyn/errors.hpp"
#include "hyperdyn/symbolic_flow.hpp"
#include "toral_oracles.hpp"

using namespace hyperdyn;
using namespace toral_oracles;

namespace {

const double kLogLambda = std::log((3.0 + std::sqrt(5.0)) / 2.0);  // 0.9624236501...

ToralAuto cat() { return ToralAuto::make(2, 1, 1, 1); }

TrigPoly cos_x(double amp) { return {0.0, {{1, 0, amp, 0.0}}}; }

}  // namespace

TEST_CASE("toral automorphism validation and eigendata") {
    const ToralAuto A = cat();
    CHECK(A.lambda1 == doctest::Approx((3.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-15));
    CHECK_THROWS_AS(ToralAuto::make(2, 1, 1, 2), Error);
    CHECK_THROWS_AS(ToralAuto::make(1, 1, 0, 1), Error);
    // A e_u = lambda1 e_u.
    const double ux = A.a[0] * A.unstable[0] + A.a[1] * A.unstable[1];
    CHECK(ux == doctest::Approx(A.lambda1 * A.unstable[0]).epsilon(1e-14));
}

TEST_CASE("fixed points: counts, exactness and brute-force agreement") {
    const ToralAuto A = cat();
    CHECK(fixed_points(A, 1).size() == 1);
    CHECK(fixed_points(A, 1)[0] == RatPoint{0, 0, 1});
    CHECK(fixed_points(A, 2).size() == 5);
    CHECK(trace_power(A, 2) == 7);
    CHECK(fixed_points(A, 3).size() == 16);
    CHECK(trace_power(A, 3) == 18);
    CHECK(fixed_points(A, 6).size() == 320);
    for (int n = 1; n <= 12; ++n) {
        const auto pts = fixed_points(A, n);
        CHECK(static_cast<std::int64_t>(pts.size()) == std::abs(trace_power(A, n) - 2));
        const auto m = power_minus_identity(A, n);
        const std::int64_t D = std::abs(m[0] * m[3] - m[1] * m[2]);
        for (const auto& p : pts) {
            RatPoint q = p;
            for (int k = 0; k < n; ++k) q = apply(A, q);
            CHECK(q == p);
        }
        const auto oracle = n <= 7 ? brute_fixed_points(A, n) : congruence_fixed_points(A, n);
        CHECK(on_denominator(pts, D) == oracle);
    }
    // Another hyperbolic matrix, including a negative trace.
    for (const auto& B : {ToralAuto::make(3, 2, 1, 1), ToralAuto::make(-3, 1, -1, 0)}) {
        for (int n = 1; n <= 5; ++n) {
            const auto m = power_minus_identity(B, n);
            const std::int64_t D = std::abs(m[0] * m[3] - m[1] * m[2]);
            CHECK(on_denominator(fixed_points(B, n), D) == brute_fixed_points(B, n));
        }
    }
}

TEST_CASE("trig polynomials") {
    const ToralAuto A = cat();
    const TrigPoly f{0.3, {{1, 0, 0.5, 0.25}, {2, -1, -0.1, 0.2}}};
    const TrigPoly fa = f.compose(A);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double x = u(rng), y = u(rng);
        double ax = 2 * x + y, ay = x + y;
        ax -= std::floor(ax);
        ay -= std::floor(ay);
        CHECK(fa(x, y) == doctest::Approx(f(ax, ay)).epsilon(1e-12));
    }
    const auto pc = check_positive(TrigPoly{1.0, {{1, 0, 0.2, 0.0}}});
    CHECK(pc.grid_min == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(pc.positive());
    CHECK_THROWS_AS(SuspensionFlow(A, TrigPoly{0.1, {{1, 0, 0.2, 0.0}}}), Error);
}

TEST_CASE("periodic orbits and export") {
    const SuspensionFlow flow(cat(), TrigPoly{1.0, {{1, 0, 0.2, 0.0}}});
    const auto orbits = periodic_orbits(flow, 6);
    std::size_t points = 0;
    for (const auto& o : orbits) {
        CHECK(o.tau > 0.0);
        CHECK(o.homology == o.n);
        CHECK(o.ju == doctest::Approx(o.n * kLogLambda).epsilon(1e-14));
        points += static_cast<std::size_t>(o.n);
    }
    // Prime orbits partition the union of Fix(A^n), n <= 6.
    std::set<RatPoint> all;
    for (int n = 1; n <= 6; ++n)
        for (const auto& p : fixed_points(flow.base, n)) {
            const auto xf = p.x_frac(), yf = p.y_frac();
            const std::int64_t L = std::lcm(xf[1], yf[1]);
            all.insert({xf[0] * (L / xf[1]), yf[0] * (L / yf[1]), L});
        }
    CHECK(points == all.size());
    const std::string csv = fixed_points_csv(flow, 2);
    CHECK(csv.rfind("n,x_num,x_den,y_num,y_den,tau,Ju,Js,homology\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}

TEST_CASE("pressure estimator") {
    const ToralAuto A = cat();
    const PressureResult p0 = pressure_base(A, TrigPoly::constant(0.0), 4, 12);
    REQUIRE(p0.raw.size() == 9);
    CHECK(p0.raw[2].first == 6);
    CHECK(p0.raw[2].second == doctest::Approx(std::log(320.0) / 6.0).epsilon(1e-14));
    CHECK(std::abs(p0.value - kLogLambda) <= 1e-3);
    CHECK(std::abs(p0.value - 0.9624236) <= 1e-6);
    CHECK(p0.converged);

    // Constant shift and planted coboundary, per n.
    const PressureResult pc = pressure_base(A, TrigPoly::constant(0.37), 4, 10);
    const PressureResult pb = pressure_base(A, coboundary(A, TrigPoly{0.0, {{1, 0, 0.3, 0.0}, {0, 1, 0.0, 0.2}}}), 4, 10);
    for (std::size_t i = 0; i < pc.raw.size(); ++i) {
        CHECK(pc.raw[i].second == doctest::Approx(p0.raw[i].second + 0.37).epsilon(1e-13));
        CHECK(std::abs(pb.raw[i].second - p0.raw[i].second) <= 1e-12);
    }
    CHECK_THROWS_AS(pressure_base(A, TrigPoly::constant(0.0), 3, 12), Error);
    CHECK_THROWS_AS(pressure_base(A, TrigPoly::constant(0.0), 4, 15), Error);
}

TEST_CASE("suspension entropy by Bowen root") {
    const ToralAuto A = cat();
    for (double c : {0.5, 1.0, 2.0}) {
        const EntropyResult e = entropy_suspension(SuspensionFlow(A, TrigPoly::constant(c)));
        CHECK(std::abs(e.value - 0.9624236 / c) <= 1e-6);
    }
    const TrigPoly roof{1.0, {{1, 0, 0.2, 0.0}}};
    const double h = entropy_suspension(SuspensionFlow(A, roof)).value;
    CHECK(h < kLogLambda / 0.8);
    CHECK(h > kLogLambda / 1.2);
    // Adding a coboundary to the roof leaves periods, hence entropy, unchanged.
    const TrigPoly planted = roof + coboundary(A, TrigPoly{0.0, {{0, 1, 0.05, 0.0}}});
    CHECK(entropy_suspension(SuspensionFlow(A, planted)).value == doctest::Approx(h).epsilon(1e-9));
    // Time rescaling on a non-constant roof.
    for (double c : {0.25, 0.5, 2.0, 4.0})
        CHECK(std::abs(entropy_suspension(SuspensionFlow(A, c * roof)).value * c - h) <= 1e-6);
}

TEST_CASE("SRB identities") {
    const ToralAuto A = cat();
    // Closed form: |Fix(A^n)| lambda^-n = 1 + lambda^-2n - 2 lambda^-n.
    const double l = A.lambda1;
    const SrbReport r10 = srb_identity_check(A, 10, {1.0});
    CHECK(r10.unstable_sum == doctest::Approx(1.0 + std::pow(l, -20) - 2.0 * std::pow(l, -10)).epsilon(1e-14));
    CHECK(r10.unstable_sum == doctest::Approx(0.99985).epsilon(1e-5));
    const SrbReport r = srb_identity_check(A);
    CHECK(r.unstable_sum >= 0.999);
    CHECK(r.unstable_sum <= 1.001);
    CHECK(std::abs(r.unstable_pressure) <= 2e-3);
    REQUIRE(r.cases.size() == 3);
    for (const auto& c : r.cases) CHECK(std::abs(c.entropy - c.lambda) <= 1e-6);
    CHECK(r.all_pass());
}

TEST_CASE("doubling map separated sets grow like 2^n") {
    for (int k = 1; k <= 3; ++k)
        for (int n = 1; n <= 8; ++n) {
            // The points j 2^-(n+k-1) are (n, 2^-k)-separated and no more fit.
            CHECK(doubling_separated_count(n, k) == (std::uint64_t{1} << (n + k - 1)));
        }
    const double h = std::log(static_cast<double>(doubling_separated_count(9, 3))) - std::log(static_cast<double>(doubling_separated_count(8, 3)));
    CHECK(h == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("Livschitz recovery of a planted coboundary") {
    const ToralAuto A = cat();
    const TrigPoly beta0 = cos_x(1.0);
    const TrigPoly f = coboundary(A, beta0);
    const LivschitzResult r = livschitz_solve(A, f, 10);
    CHECK(r.max_orbit_sum <= 1e-9);
    CHECK(recovery_spread(r, beta0) <= 1e-9);
    CHECK(r.holder_exponent > 0.8);
    CHECK(r.holder_exponent < 1.2);

    // Anchoring elsewhere on the orbit changes beta by a per-orbit constant.
    for (const auto& ob : r.orbits) {
        if (ob.n < 3) continue;
        std::vector<double> alt(ob.points.size());
        const std::size_t s = 1;
        for (std::size_t j = 1; j < ob.points.size(); ++j) {
            const std::size_t cur = (s + j) % ob.points.size(), prev = (s + j - 1) % ob.points.size();
            alt[cur] = alt[prev] - f(ob.points[prev]);
        }
        const double c0 = ob.beta[0] - alt[0];
        for (std::size_t j = 0; j < ob.points.size(); ++j) CHECK(ob.beta[j] - alt[j] == doctest::Approx(c0).epsilon(1e-9));
        break;
    }

    try {
        livschitz_solve(A, f + TrigPoly::constant(0.01), 10);
        FAIL("expected hypothesis-violated");
    } catch (const Error& e) {
        CHECK(e.tag() == "hypothesis-violated");
    }
}

TEST_CASE("flow map and cocycle") {
    const SuspensionFlow flow(cat(), TrigPoly{1.0, {{1, 0, 0.2, 0.0}}});
    const FlowPoint p{0.3, 0.7, 0.1};
    const FlowPoint q = flow_map(flow, p, 2.5);
    const FlowPoint q2 = flow_map(flow, flow_map(flow, p, 1.0), 1.5);
    CHECK(q.x == doctest::Approx(q2.x).epsilon(1e-12));
    CHECK(q.u == doctest::Approx(q2.u).epsilon(1e-12));
    // Constant generator: alpha(p, t) = c t.
    CHECK(cocycle(flow, TrigPoly::constant(0.7), p, 3.0) == doctest::Approx(2.1).epsilon(1e-14));
    // Cocycle identity alpha(p, s + t) = alpha(p, s) + alpha(Phi^s p, t).
    const TrigPoly f{0.5, {{0, 1, 0.3, 0.1}}};
    CHECK(cocycle(flow, f, p, 4.0) == doctest::Approx(cocycle(flow, f, p, 1.5) + cocycle(flow, f, flow_map(flow, p, 1.5), 2.5)).epsilon(1e-12));
}

TEST_CASE("averaging smoother") {
    const ToralAuto A = cat();
    SmootherOptions opts;
    opts.seed = 17;
    opts.grid = 32;
    opts.samples = 200;

    SUBCASE("constant generator: equality at lambda' = lambda") {
        const SuspensionFlow flow(A, TrigPoly::constant(1.0));
        opts.lambda_prime = 0.6;
        const SmootherResult r = averaging_smoother(flow, TrigPoly::constant(0.6), opts);
        CHECK(r.lambda == doctest::Approx(0.6).epsilon(1e-14));
        CHECK(r.T == 1.0);
        CHECK(std::abs(r.min_slack) <= 1e-9);
        for (double b : r.beta_grid) CHECK(b == doctest::Approx(0.3).epsilon(1e-9));
        CHECK(r.identity_ok);
    }
    SUBCASE("planted generator: inequality at 0.9 lambda") {
        const double c = 1.3, lam = 0.8;
        const SuspensionFlow flow(A, TrigPoly::constant(c));
        // Per fiber crossing alpha = c lam + g(Ax) - g(x): orbit rate exactly lam.
        const TrigPoly g{0.0, {{1, 0, 0.4, 0.0}, {1, 1, 0.0, 0.3}}};
        const TrigPoly f = TrigPoly::constant(lam) + (-1.0 / c) * coboundary(A, g);
        opts.lambda_prime = 0.9 * lam;
        opts.samples = 1000;
        const SmootherResult r = averaging_smoother(flow, f, opts);
        CHECK(r.lambda == doctest::Approx(lam).epsilon(1e-12));
        CHECK(r.T >= 1.0);
        CHECK(r.inequality_ok);
        CHECK(r.min_slack >= 0.0);
        CHECK(r.identity_residual <= 1e-4);
        CHECK(r.identity_ok);
    }
    SUBCASE("lambda' above the orbit rate is rejected") {
        const SuspensionFlow flow(A, TrigPoly::constant(1.0));
        opts.lambda_prime = 0.7;
        CHECK_THROWS_AS(averaging_smoother(flow, TrigPoly::constant(0.6), opts), Error);
    }
}

TEST_CASE("delta-bar bookkeeping") {
    const ToralAuto A = cat();
    const DeltaBarReport r = delta_bar_chain(SuspensionFlow(A, TrigPoly::constant(1.0)), 0.0);
    CHECK(std::abs(r.h_a - kLogLambda) <= 1e-6);
    CHECK(r.delta == doctest::Approx(1.0 - 1.0 / r.h_a).epsilon(1e-15));
    CHECK(r.delta < 1.0);
    CHECK(r.period_residual_zero);
    CHECK(r.rescale_error <= 1e-6);
    REQUIRE(r.rescale_checks.size() == 2);
    for (const auto& [c, err] : r.rescale_checks) CHECK(err <= 1e-6);
    CHECK(!r.table.empty());
    for (const auto& row : r.table) {
        CHECK(row.tau == doctest::Approx(row.n).epsilon(1e-14));
        CHECK(row.j == 0.0);
        CHECK(row.tau_rho * (1.0 - r.delta) == doctest::Approx(row.tau + row.a_value).epsilon(1e-14));
    }
    const DeltaBarReport shifted = delta_bar_chain(SuspensionFlow(A, TrigPoly{1.0, {{1, 0, 0.2, 0.0}}}), 0.5);
    CHECK(shifted.period_residual_zero);
    CHECK(shifted.h_a < kLogLambda);
    CHECK_THROWS_AS(delta_bar_chain(SuspensionFlow(A, TrigPoly::constant(1.0)), -1.5), Error);
}

TEST_CASE("solvable-case volume audit") {
    const SuspensionFlow flow(cat(), TrigPoly{1.0, {{1, 0, 0.2, 0.0}}});
    SolvableOptions opts;
    opts.grid = 32;
    opts.heights = 8;
    const SolvableReport r = solvable_volume_audit(flow, opts);
    REQUIRE(r.planted.size() == 3);
    CHECK(r.planted[0].lambda_star == doctest::Approx(0.5 / 0.7).epsilon(1e-12));
    CHECK(std::abs(r.planted[0].lambda_star - 0.714286) <= 1e-6);
    for (const auto& p : r.planted) {
        CHECK(std::abs(p.lambda_star - p.closed_form) <= 1e-12);
        CHECK(p.fit_residual <= 1e-12);
        CHECK(p.solvable2_residual <= 1e-12);
    }
    REQUIRE(r.volumes.size() == 3);
    for (const auto& v : r.volumes) {
        CHECK(v.i_at_zero == 1.0);
        CHECK(v.increasing);
        CHECK(std::abs(v.root) <= 1e-8);
    }
    // Jensen: I(2, 0.1) >= exp(0.1 * 2 * omega / mean roof) > 1 (flow preserves volume).
    const double i = volume_integral(flow, 1.0, 2.0, 0.1, 32, 8);
    CHECK(i > 1.0);
    CHECK(i >= std::exp(0.1 * 2.0 / 1.0) * (1.0 - 1e-3));
}
