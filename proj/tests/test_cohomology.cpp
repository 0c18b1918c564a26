#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"
#include "hyperdyn/cohomology.hpp"
#include "hyperdyn/errors.hpp"

using namespace hyperdyn;

namespace {

// Golden S_10(e_1) on the octagon lattice. Computed once by brute force over
// all 8 * 7^9 reduced words of length <= 10 (ratio |h_1| / L), the same
// oracle as max_ratio_brute below; attained by the class of 1.4.1.-2.
constexpr double kGoldenS10 = 0.408421246224;

// Max |<v, h(w)>| / L(w) over every freely reduced word of length <= n.
// Conjugates share the ratio, so this equals the max over cyclic classes.
double max_ratio_brute(const LatticeRep& lat, const CohClass& a, int n) {
    std::vector<Mat2> g;
    for (const auto& x : lat.gens) g.push_back(x.matrix());
    for (const auto& x : lat.gens) g.push_back(x.matrix().inverse());
    double best = 0.0;
    std::function<void(const Mat2&, double, int, int)> rec = [&](const Mat2& m, double av, int len, int last) {
        if (len > 0) {
            const double tr = std::abs(m.trace());
            if (tr > 2.0 + 1e-9) best = std::max(best, std::abs(av) / (2.0 * std::acosh(tr / 2.0)));
        }
        if (len == n) return;
        for (int c = 0; c < 8; ++c) {
            if (len > 0 && c == (last + 4) % 8) continue;
            const double step = c < 4 ? a.v[static_cast<std::size_t>(c)] : -a.v[static_cast<std::size_t>(c - 4)];
            rec(m * g[static_cast<std::size_t>(c)], av + step, len + 1, c);
        }
    };
    rec(Mat2::identity(), 0.0, 0, -1);
    return best;
}

CohClass random_class(std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return {{u(rng), u(rng), u(rng), u(rng)}};
}

const LatticeRep& octagon() {
    static const LatticeRep lat = octagon_lattice();
    return lat;
}

const ClassSummary& summary8() {
    static const ClassSummary s = summarize_classes(octagon(), 8);
    return s;
}

}  // namespace

TEST_CASE("evaluation pairs through abelianization") {
    const LatticeRep& lat = octagon();
    const CohClass e1 = CohClass::basis(4, 0);
    CHECK(evaluate(e1, parse_word("1")) == 1.0);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 20; ++i) {
        const CohClass a = random_class(rng, 2.0);
        CHECK(evaluate(a, lat.relator) == 0.0);
        CHECK(evaluate(a, commutator_word(parse_word("1.3"), parse_word("-2.4.4"))) == doctest::Approx(0.0).epsilon(1e-15));
        const GroupWord u = parse_word("1.-3.2"), v = parse_word("4.4.-1");
        CHECK(evaluate(a, concat(u, v)) == doctest::Approx(evaluate(a, u) + evaluate(a, v)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(evaluate(CohClass::zero(3), std::vector<int>{1, 0, 0, 0}), Error);
}

TEST_CASE("delta sup agrees with the brute-force oracle") {
    const LatticeRep& lat = octagon();
    std::mt19937_64 rng(7);
    const ClassSummary s6 = summarize_classes(lat, 6);
    CHECK(inverse_closed(s6));
    for (int i = 0; i < 5; ++i) {
        const CohClass a = random_class(rng, 1.0);
        CHECK(delta_value(s6, a) == doctest::Approx(max_ratio_brute(lat, a, 6)).epsilon(1e-10));
    }
    const CohClass e1 = CohClass::basis(4, 0);
    CHECK(delta_value(s6, e1) == doctest::Approx(max_ratio_brute(lat, e1, 6)).epsilon(1e-10));
}

TEST_CASE("golden S_10 for e_1") {
    const DeltaEstimate d = delta_sup(octagon(), CohClass::basis(4, 0), 10);
    CHECK(d.sup == doctest::Approx(kGoldenS10).epsilon(1e-9));
    CHECK(d.witness.rep.size() == 4);
    CHECK(std::abs(d.witness.homology[0]) / d.witness.length == doctest::Approx(d.sup).epsilon(1e-12));
    REQUIRE(d.history.size() == 10);
    for (std::size_t i = 1; i < d.history.size(); ++i) CHECK(d.history[i].second >= d.history[i - 1].second);
    CHECK(d.history.back().second == d.sup);
}

TEST_CASE("S_N is a seminorm and monotone in N") {
    const ClassSummary& s = summary8();
    CHECK(inverse_closed(s));
    CHECK(delta_value(s, CohClass::zero(4)) == 0.0);
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> tdist(-5.0, 5.0);
    for (int i = 0; i < 1000; ++i) {
        const CohClass a = random_class(rng, 1.0), b = random_class(rng, 1.0);
        const double t = tdist(rng);
        const double sa = delta_value(s, a), sb = delta_value(s, b);
        CHECK(delta_value(s, a + b) <= sa + sb + 1e-15 * (sa + sb));
        CHECK(delta_value(s, t * a) == doctest::Approx(std::abs(t) * sa).epsilon(1e-12));
    }
    const CohClass a = random_class(rng, 1.0);
    const DeltaEstimate d = delta_sup(s, a);
    for (std::size_t i = 1; i < d.history.size(); ++i) CHECK(d.history[i].second >= d.history[i - 1].second);
}

TEST_CASE("membership status") {
    const LatticeRep& lat = octagon();
    const double lb = 2.0 * std::acosh(1.0 + std::sqrt(2.0));
    const CohClass e1 = CohClass::basis(4, 0);
    CHECK(in_delta(delta_sup(lat, CohClass::zero(4), 4).sup, 0.2) == DeltaStatus::Plausible);
    CHECK(in_delta(delta_sup(lat, (1.01 * lb) * e1, 1).sup, 0.2) == DeltaStatus::CertifiedOut);
    CHECK(delta_sup(lat, (1.01 * lb) * e1, 1).sup == doctest::Approx(1.01).epsilon(1e-12));
    CHECK(in_delta(delta_sup(lat, CohClass{{3.1, 0, 0, 0}}, 1).sup, 0.1) == DeltaStatus::CertifiedOut);
    CHECK(in_delta(delta_value(summary8(), 0.1 * e1), 0.2) == DeltaStatus::Plausible);
    CHECK(in_delta(0.85, 0.2) == DeltaStatus::Borderline);
    CHECK_THROWS_AS(in_delta(0.5, 0.6), Error);
}

TEST_CASE("slice is symmetric and its sublevel sets are midpoint convex") {
    const ClassSummary& s = summary8();
    const auto pts = delta_slice(s, CohClass::zero(4), CohClass::basis(4, 0), CohClass{{0, 1, 0.5, 0}}, 20, 4.0, 0.1);
    REQUIRE(pts.size() == 41u * 41u);
    CHECK(pts[20 * 41 + 20].value == 0.0);
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(pts[i].value == pts[pts.size() - 1 - i].value);
    for (double level : {0.5, 1.0, 1.5}) CHECK(slice_midpoint_violations(pts, 20, level) == 0);
    const std::string csv = slice_csv(pts);
    CHECK(csv.rfind("s,t,S_N,status\n", 0) == 0);
    CHECK_THROWS_AS(delta_slice(s, CohClass::zero(4), CohClass::basis(4, 0), 2.0 * CohClass::basis(4, 0), 2, 1.0, 0.1), Error);
}

TEST_CASE("period shift") {
    const LatticeRep& lat = octagon();
    const auto spec = length_spectrum(lat, 2);
    const double lb = 2.0 * std::acosh(1.0 + std::sqrt(2.0));
    ConjClass t0;
    for (const auto& c : spec)
        if (c.rep == parse_word("1")) t0 = c;
    REQUIRE(t0.rep.size() == 1);
    CHECK(period_shift(CohClass::zero(4), t0) == t0.length);
    CHECK(period_shift(CohClass::basis(4, 0), t0) == doctest::Approx(lb + 1.0).epsilon(1e-12));

    // Positivity sweep at maxlen 8 for a class with S_8 <= 0.8.
    std::mt19937_64 rng(9);
    CohClass a = random_class(rng, 1.0);
    a = (0.8 / delta_value(summary8(), a)) * a;
    REQUIRE(delta_value(summary8(), a) <= 0.8 + 1e-12);
    std::uint64_t nonpositive = 0;
    for_each_cyclic_class(lat, 8, {}, [&](std::size_t, const WordView& v) {
        if (classify(v.matrix) != ElementClass::Hyperbolic) return;
        ConjClass c;
        c.length = translation_length(v.matrix);
        c.homology.assign(v.homology.begin(), v.homology.end());
        nonpositive += period_shift(a, c) <= 0.0;
    });
    CHECK(nonpositive == 0);
}

TEST_CASE("gamma-a audit") {
    const LatticeRep& lat = octagon();
    const double lb = 2.0 * std::acosh(1.0 + std::sqrt(2.0));
    const GammaAAudit zero = gamma_a_audit(lat, CohClass::zero(4), 6, 16, 1);
    CHECK(zero.s_n == 0.0);
    CHECK(zero.min_violator_displacement > 0.0);
    CHECK(zero.generator_margin == doctest::Approx(lb).epsilon(1e-12));
    CHECK(zero.all_pass());

    const CohClass a = 0.5 * CohClass{{1.0, -0.5, 0.25, 0.0}};
    const GammaAAudit r = gamma_a_audit(lat, a, 6, 16, 3);
    CHECK(r.generator_margin == doctest::Approx(lb - 0.5).epsilon(1e-12));
    CHECK(r.epsilon == doctest::Approx(1.0 - r.s_n).epsilon(1e-15));
    CHECK(r.min_margin > 0.0);
    CHECK(r.violators_bounded);
    for (const auto& v : r.violators) CHECK(v.length <= 2.0 * r.k0 / (1.0 - r.s_n));
    for (const auto& c : r.checks) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.pass);
    }
    // Same seed, same report.
    const GammaAAudit again = gamma_a_audit(lat, a, 6, 16, 3);
    CHECK(again.k0 == r.k0);
    CHECK(again.violators.size() == r.violators.size());

    CHECK_THROWS_AS(gamma_a_audit(lat, CohClass{{3.1, 0, 0, 0}}, 2, 8, 1), Error);
}
