#include "ergoscope/measures.hpp"
#include "ergoscope/special_flow.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ergoscope;

namespace {

Rational r(long a, long b = 1) { return make_rational(a, b); }

ProbMeasure uniform01() { return make_pc_density({r(0), r(1)}, {r(1)}); }

ProbMeasure random_exact(std::mt19937_64& rng) {
    std::uniform_int_distribution<long> loc(-20, 20), m(1, 9), kind(0, 2);
    switch (kind(rng)) {
    case 0: {
        std::vector<Atom> atoms;
        for (int k = 0; k < 4; ++k) atoms.push_back({r(loc(rng), 4), r(m(rng))});
        return normalize(make_atomic(atoms));
    }
    case 1: {
        std::vector<Box> boxes;
        for (int k = 0; k < 3; ++k) {
            long a = loc(rng);
            boxes.push_back({r(a, 4), r(a + 1 + m(rng), 4), r(m(rng))});
        }
        return normalize(pc_from_boxes(boxes));
    }
    default: {
        long a = loc(rng);
        std::vector<Rational> xs{r(a, 4), r(a + 2, 4), r(a + 5, 4)};
        return normalize(pl_from_nodes(xs, {r(0), r(m(rng)), r(0)}));
    }
    }
}

}  // namespace

TEST_CASE("rescaling atoms and densities") {
    ProbMeasure d = make_atomic({{r(3), r(1)}});
    auto at = std::get<AtomicMeasure>(rescale(d, r(2))).atoms;
    REQUIRE(at.size() == 1);
    CHECK(at[0].location == r(3, 2));

    ProbMeasure u = rescale(uniform01(), r(2));
    CHECK(total_mass(u) == 1);
    CHECK(max_density(u) == 2);
    CHECK(cdf_exact(u, r(1, 2)) == 1);
    CHECK(cdf_exact(u, r(1, 4)) == r(1, 2));

    ProbMeasure neg = rescale(uniform01(), r(-1));
    CHECK(cdf_exact(neg, r(-1, 2)) == r(1, 2));
    CHECK(error_kind([] { rescale(uniform01(), r(0)); }) == ErrorKind::ZeroScale);
}

TEST_CASE("atoms at one location merge") {
    AtomicMeasure a = make_atomic({{r(1), r(1, 4)}, {r(0), r(1, 4)}, {r(1), r(1, 2)}});
    REQUIRE(a.atoms.size() == 2);
    CHECK(a.atoms[1].mass == r(3, 4));
    CHECK(atom_count(a) == 2);
}

TEST_CASE("cdf limits and trapezoid ramp") {
    ProbMeasure g = predicted_density(1, r(1), r(1, 4), false);
    CHECK(cdf_exact(g, r(-10)) == 0);
    CHECK(cdf_exact(g, r(10)) == 1);
    CHECK(cdf_exact(g, r(0)) == r(1, 8));
    CHECK(cdf(g, 0.0) == doctest::Approx(0.125));
    double prev = 0;
    for (int k = -40; k <= 40; ++k) {
        double v = cdf(g, k / 20.0);
        CHECK(v >= prev);
        prev = v;
    }
    ProbMeasure at = make_atomic({{r(0), r(1, 2)}, {r(1), r(1, 2)}});
    CHECK(cdf_exact(at, r(0)) == r(1, 2));
    CHECK(cdf_left_exact(at, r(0)) == 0);
}

TEST_CASE("ks distance") {
    ProbMeasure d0 = make_atomic({{r(0), r(1)}}), d1 = make_atomic({{r(1), r(1)}});
    CHECK(ks_distance_exact(d0, d1) == 1);
    CHECK(ks_distance(d0, d1) == doctest::Approx(1.0));
    ProbMeasure g2 = predicted_density(2, r(1), r(1, 10), true);
    ProbMeasure g3 = predicted_density(3, r(1), r(1, 10), true);
    Rational ks = ks_distance_exact(g2, g3);
    CHECK(ks > 0);
    CHECK(ks < 1);
}

TEST_CASE("ks is a metric and rescaling is a group action on random exact measures") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        ProbMeasure p = random_exact(rng), q = random_exact(rng), s = random_exact(rng);
        Rational pq = ks_distance_exact(p, q);
        CHECK(pq == ks_distance_exact(q, p));
        CHECK(ks_distance_exact(p, p) == 0);
        CHECK(pq <= ks_distance_exact(p, s) + ks_distance_exact(s, q));
        CHECK(pq >= 0);
        CHECK(pq <= 1);
        Rational v = r(trial % 5 + 1, 3), w = r(-(trial % 3) - 1, 2);
        CHECK(ks_distance_exact(rescale(rescale(p, w), v), rescale(p, v * w)) == 0);
        CHECK(total_mass(rescale(p, w)) == total_mass(p));
        CHECK(atom_count(rescale(p, w)) == atom_count(p));
    }
}

TEST_CASE("atom spectrum") {
    CHECK(atom_spectrum(uniform01(), r(0)).empty());
    ProbMeasure pa = predicted_atomic(3, r(1, 10), r(2, 5), r(1, 5), r(1));
    CHECK(atom_spectrum(pa, r(0)).size() == 4);
    CHECK(atom_spectrum(pa, r(1, 4)).size() == 1);
}

TEST_CASE("exponential decay") {
    ProbMeasure g = predicted_density(3, r(1), r(1, 10), false);
    double R = support_radius(g);
    CHECK(exp_decay_check(g, std::exp(1.0 * R) * 1.000001, 1.0));
    CHECK(exp_decay_check(make_atomic({{r(0), r(1)}}), 1.5, 2.0));
    CHECK(exp_decay_check(g, find_decay_constant(g, 0.5), 0.5));

    // mass proportional to 2^-k at t = 2^k gives P(|X| > t) ~ 1/t
    std::vector<Atom> heavy;
    Rational total = 0;
    for (int k = 0; k < 30; ++k) {
        Rational m = make_rational(Integer(1), Integer(1) << k);
        heavy.push_back({Rational(Integer(1) << k), m});
        total += m;
    }
    ProbMeasure h = normalize(make_atomic(heavy));
    for (double c : {2.0, 10.0, 100.0})
        for (double b : {0.5, 1.0, 2.0}) CHECK_FALSE(exp_decay_check(h, c, b));
}

TEST_CASE("empirical measures are handled in floating point only") {
    ProbMeasure e = make_empirical({0.0, 0.5, 1.0});
    CHECK(!is_exact(e));
    CHECK(total_mass_double(e) == doctest::Approx(1.0));
    CHECK(cdf(e, 0.6) == doctest::Approx(2.0 / 3));
    CHECK(error_kind([&] { total_mass(e); }).has_value());
}

TEST_CASE("level components and maxima") {
    ProbMeasure g2 = predicted_density(2, r(1), r(1, 20), true);
    CHECK(max_density(g2) == 2);
    CHECK(level_components(g2, r(2)) == 1);
    ProbMeasure g5 = predicted_density(5, r(1), r(1, 40), true);
    CHECK(level_components(g5, r(2)) == 4);
}
