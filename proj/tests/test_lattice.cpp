#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "hyperdyn/errors.hpp"
#include "hyperdyn/lattice.hpp"
#include "hyperdyn/parallel.hpp"

using namespace hyperdyn;

namespace {

// Every word over +-1..+-n of length exactly len, by odometer.
std::vector<GroupWord> all_words(int n, int len) {
    std::vector<GroupWord> out;
    std::vector<int> idx(static_cast<std::size_t>(len), 0);
    const int k = 2 * n;
    while (true) {
        GroupWord w;
        for (int i : idx) w.letters.push_back(i < n ? i + 1 : -(i - n + 1));
        out.push_back(w);
        int p = len - 1;
        while (p >= 0 && ++idx[static_cast<std::size_t>(p)] == k) idx[static_cast<std::size_t>(p--)] = 0;
        if (p < 0) break;
    }
    return out;
}

GroupWord min_rotation(const GroupWord& w) {
    GroupWord best = w;
    for (std::size_t s = 1; s < w.size(); ++s) best = std::min(best, rotate(w, s));
    return best;
}

GroupWord random_word(std::mt19937_64& rng, int n, int len) {
    std::uniform_int_distribution<int> g(1, n), sgn(0, 1);
    GroupWord w;
    for (int i = 0; i < len; ++i) w.letters.push_back(sgn(rng) ? g(rng) : -g(rng));
    return w;
}

double length_by_bisection(double tr) {
    double lo = 0.0, hi = 100.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (2.0 * std::cosh(mid / 2.0) < tr ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("word utilities") {
    CHECK(to_string(free_reduce(parse_word("1.2.-2.-1.3"))) == "3");
    CHECK(to_string(free_reduce(parse_word("1.-1"))) == "e");
    CHECK(to_string(cyclic_reduce(parse_word("-1.2.3.1"))) == "2.3");
    CHECK(to_string(inverse(parse_word("1.-2.3"))) == "-3.2.-1");
    CHECK(to_string(commutator_word(parse_word("1"), parse_word("2"))) == "-1.-2.1.2");
    CHECK(abelianize(parse_word("1.-2.1.4"), 4) == std::vector<int>{2, -1, 0, 1});
    CHECK(parse_word(to_string(parse_word("4.-3.2"))) == parse_word("4.-3.2"));
    CHECK_THROWS_AS(parse_word("1..2"), Error);
}

TEST_CASE("octagon lattice closes its relator with winding of absolute value 2") {
    const LatticeRep lat = octagon_lattice();
    CHECK(lat.n_gens() == 4);
    CHECK(to_string(lat.relator) == "1.-2.3.-4.-1.2.-3.4");
    CHECK(lat.convention.find("1.-2.3.-4.-1.2.-3.4") != std::string::npos);
    const CoverElement r = eval(lat, lat.relator);
    CHECK(psl_distance(r.matrix(), Mat2::identity()) <= 1e-9);
    CHECK(std::abs(r.winding()) == 2);
    // The relator winding does not depend on where it is cut.
    for (std::size_t s = 0; s < 8; ++s) CHECK(std::abs(eval(lat, rotate(lat.relator, s)).winding()) == 2);
    for (const auto& g : lat.gens) {
        CHECK(g.matrix().trace() == doctest::Approx(2.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-12));
        CHECK(translation_length(g.matrix()) == doctest::Approx(length_by_bisection(2.0 + 2.0 * std::sqrt(2.0))).epsilon(1e-12));
    }
    CHECK(translation_length(lat.gens[0].matrix()) == doctest::Approx(3.0571418).epsilon(1e-7));
}

TEST_CASE("evaluation is a homomorphism") {
    const LatticeRep lat = octagon_lattice();
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        const GroupWord u = random_word(rng, 4, 1 + i % 5), v = random_word(rng, 4, 1 + i % 7);
        const CoverElement lhs = eval(lat, concat(u, v)), rhs = eval(lat, u) * eval(lat, v);
        CHECK(lhs.winding() == rhs.winding());
        CHECK(psl_distance(lhs.matrix(), rhs.matrix()) <= 1e-9 * op_norm(lhs.matrix()));
        CHECK(psl_distance(eval_matrix(lat, u), eval(lat, u).matrix()) <= 1e-9 * op_norm(lhs.matrix()));
    }
}

TEST_CASE("reduced word enumeration matches brute-force counts") {
    const LatticeRep lat = octagon_lattice();
    for (int len = 1; len <= 4; ++len) {
        std::size_t brute = 0;
        for (int l = 1; l <= len; ++l)
            for (const auto& w : all_words(4, l)) brute += is_freely_reduced(w);
        CHECK(count_reduced_words(8, len) == brute);
        const auto e = enumerate_words(lat, len, EnumMode::AllReduced);
        CHECK(e.count == brute);
    }
    CHECK(count_reduced_words(8, 1) == 8);
    CHECK(count_reduced_words(8, 2) == 64);
}

TEST_CASE("cyclic class enumeration matches brute-force necklaces") {
    const LatticeRep lat = octagon_lattice();
    std::set<GroupWord> classes, unsigned_classes;
    for (int l = 1; l <= 4; ++l) {
        for (const auto& w : all_words(4, l)) {
            if (!is_cyclically_reduced(w)) continue;
            classes.insert(min_rotation(w));
            unsigned_classes.insert(std::min(min_rotation(w), min_rotation(inverse(w))));
        }
    }
    // GroupWord ordering on letters differs from code ordering, so compare sets of canonical forms.
    const auto e = enumerate_words(lat, 4, EnumMode::ConjClasses);
    std::set<GroupWord> got;
    for (const auto& c : e.classes) got.insert(min_rotation(c.rep));
    CHECK(got == classes);
    CHECK(e.count == classes.size());

    EnumOptions dedup;
    dedup.dedup_inverse = true;
    const auto d = enumerate_words(lat, 4, EnumMode::ConjClasses, dedup);
    std::set<GroupWord> got_unsigned;
    for (const auto& c : d.classes) got_unsigned.insert(std::min(min_rotation(c.rep), min_rotation(inverse(c.rep))));
    CHECK(got_unsigned == unsigned_classes);
    CHECK(d.count == unsigned_classes.size());

    // T0 T1 and T1 T0 are one class.
    std::size_t hits = 0;
    for (const auto& c : e.classes) hits += (c.rep == parse_word("1.2") || c.rep == parse_word("2.1"));
    CHECK(hits == 1);
}

TEST_CASE("enumeration budget is enforced") {
    const LatticeRep lat = octagon_lattice();
    EnumOptions tight;
    tight.max_words = 100;
    try {
        enumerate_words(lat, 4, EnumMode::AllReduced, tight);
        FAIL("expected resource-limit");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonConvergence);
        CHECK(e.tag() == "resource-limit");
    }
}

TEST_CASE("length spectrum: systole, monotonicity, conjugation invariance") {
    const LatticeRep lat = octagon_lattice();
    const double systole = 2.0 * std::acosh(1.0 + std::sqrt(2.0));
    const auto s3 = length_spectrum(lat, 3);
    const auto s4 = length_spectrum(lat, 4);
    REQUIRE(!s3.empty());
    CHECK(s3.front().length == doctest::Approx(systole).epsilon(1e-10));
    for (const auto& c : s4) CHECK(c.length >= systole - 1e-9);
    CHECK(std::is_sorted(s4.begin(), s4.end(), [](const ConjClass& a, const ConjClass& b) { return a.length < b.length; }));
    // Every class found at length 3 is still present at length 4.
    std::set<GroupWord> reps4;
    for (const auto& c : s4) reps4.insert(c.rep);
    for (const auto& c : s3) CHECK(reps4.count(c.rep) == 1);
    CHECK(s4.size() > s3.size());

    std::mt19937_64 rng(5);
    for (const auto& c : s3) {
        const GroupWord g = random_word(rng, 4, 3);
        const double conj = translation_length(eval_matrix(lat, concat(concat(g, c.rep), inverse(g))));
        CHECK(conj == doctest::Approx(c.length).epsilon(1e-9));
        CHECK(c.homology == abelianize(c.rep, 4));
        CHECK(c.ju() == c.tau());
        CHECK(c.js() == -c.tau());
    }
    const std::string csv = spectrum_csv(lat, s3);
    CHECK(csv.rfind("word,length,h1,h2,h3,h4,tau,Ju,Js\n", 0) == 0);
}

TEST_CASE("enumeration is independent of thread count") {
    const LatticeRep lat = octagon_lattice();
    set_thread_count(1);
    const auto a = length_spectrum(lat, 4);
    set_thread_count(4);
    const auto b = length_spectrum(lat, 4);
    set_thread_count(1);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].rep == b[i].rep);
        CHECK(a[i].length == b[i].length);
    }
}

TEST_CASE("Dehn reduction trivializes relator conjugates") {
    const LatticeRep lat = octagon_lattice();
    CHECK(dehn_reduce(lat.relator, lat.relator).empty());
    CHECK(dehn_reduce(inverse(lat.relator), lat.relator).empty());
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        const GroupWord g = random_word(rng, 4, 1 + i % 4);
        const GroupWord w = free_reduce(concat(concat(g, rotate(lat.relator, static_cast<std::size_t>(i % 8))), inverse(g)));
        CHECK(dehn_reduce(w, lat.relator).empty());
    }
    CHECK(!dehn_reduce(parse_word("1.2"), lat.relator).empty());
    CHECK(has_cyclic_relator_majority(parse_word("3.-4.-1.2.-3"), lat.relator));
    CHECK(!has_cyclic_relator_majority(parse_word("1.-2.3.-4"), lat.relator));
}

TEST_CASE("lattice audit passes at word length 6") {
    const LatticeRep lat = octagon_lattice();
    const LatticeAudit a = audit_lattice(lat, 6);
    CHECK(a.words_checked == count_reduced_words(8, 6));
    CHECK(a.parabolic_count == 0);
    CHECK(a.elliptic_count == 0);
    CHECK(a.unexplained_central == 0);
    CHECK(a.homology_rank == 4);
    CHECK(std::abs(a.relator_winding) == 2);
    CHECK(a.centralizer_hits == 0);
    CHECK(a.min_displacement > 1e-6);
    for (const auto& c : a.checks) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.pass);
    }
    CHECK(a.all_pass());
    CHECK(integer_rank({{1, 0, 0, 0}, {2, 0, 0, 0}, {0, 1, 1, 0}}, 4) == 2);
}
