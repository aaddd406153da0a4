#include "ergoscope/birkhoff_log.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <boost/math/constants/constants.hpp>

#include <cmath>

using namespace ergoscope;

namespace {

using Big = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<200>>;

Big big(const Rational& q) { return Big(q.get_mpq_t()); }

// Independent 200-bit re-summation of sum_{i<n} f(x + i p/q), with x rational.
double oracle_sum(double c_f, const TrigPolynomial& g, const ContinuedFraction& cf, std::uint64_t n,
                  const Rational& x) {
    const Rational alpha = make_rational(cf.p(cf.depth()), cf.q(cf.depth()));
    const Big two_pi = 2 * boost::math::constants::pi<Big>();
    Big total = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        Big y = big(frac_of(x + Rational(static_cast<long>(i)) * alpha));
        Big v = Big(c_f) * (-log(y) - log(1 - y)) + Big(g.constant);
        for (std::size_t k = 0; k < g.cos_coeffs.size(); ++k) v += Big(g.cos_coeffs[k]) * cos(two_pi * (k + 1) * y);
        for (std::size_t k = 0; k < g.sin_coeffs.size(); ++k) v += Big(g.sin_coeffs[k]) * sin(two_pi * (k + 1) * y);
        total += v;
    }
    return static_cast<double>(total);
}

ContinuedFraction golden(std::size_t depth) { return ContinuedFraction(std::vector<Integer>(depth, Integer(1))); }

const TrigPolynomial kG{2.0, {0.5}, {0.0, 0.25}};

}  // namespace

TEST_CASE("single term and constant roofs") {
    LogRoof roof(1.0, kG);
    ContinuedFraction cf = golden(30);
    CHECK(birkhoff_sum(roof, cf, 0, 1, 0.3).value == doctest::Approx(roof.value(0.3)));
    LogRoof flat(0.0, TrigPolynomial{3.0, {}, {}});
    CHECK(birkhoff_sum(flat, cf, 0, 57, 0.41).value == doctest::Approx(171.0));
    CHECK(error_kind([&] { birkhoff_sum(roof, cf, 4, 3, 0.3); }) == ErrorKind::OrderUnsupported);
    CHECK(error_kind([&] { birkhoff_sum(roof, cf, 0, 3, 0.0); }) == ErrorKind::SingularityHit);
}

TEST_CASE("birkhoff sums agree with a 200-bit re-summation") {
    LogRoof roof(1.0, kG);
    ContinuedFraction cf = golden(30);
    for (const Rational& x : {make_rational(3183, 10000), make_rational(1, 97), make_rational(5, 7)}) {
        for (std::size_t n : {8, 14, 20}) {
            std::uint64_t qn = cf.q(n).get_ui();
            SumResult s = birkhoff_sum(roof, cf, 0, qn, to_double(x));
            double want = oracle_sum(1.0, kG, cf, qn, x);
            CHECK(std::abs(s.value - want) <= s.error_bound + 1e-12 * std::abs(want));
        }
    }
}

TEST_CASE("first derivative sum follows the nearest orbit points") {
    LogRoof h(1.0, TrigPolynomial{1.0, {}, {}});
    ContinuedFraction cf = golden(30);
    const Rational alpha = make_rational(cf.p(30), cf.q(30));
    for (std::size_t n : {6, 8, 10}) {
        std::uint64_t qn = cf.q(n).get_ui();
        Rational x = make_rational(3183, 10000);
        OrbitMinima m = orbit_min_distance(x, cf, n);
        double predicted = -1.0 / to_double(m.minus) + 1.0 / to_double(m.plus);
        double got = birkhoff_sum(h, cf, 1, qn, to_double(x)).value;
        double budget = 100.0 / to_double(circle_norm(Rational(cf.q(n - 1)) * alpha));
        CHECK(std::abs(got - predicted) <= budget);
    }
}

TEST_CASE("cocycle identity") {
    LogRoof roof(1.0, kG);
    ContinuedFraction cf = golden(30);
    RotationPhases rot(cf);
    const double x = 0.2718;
    for (auto [m, n] : {std::pair<std::uint64_t, std::uint64_t>{13, 21}, {100, 7}, {1, 500}}) {
        SumResult whole = birkhoff_sum(roof, cf, 0, m + n, x);
        SumResult a = birkhoff_sum(roof, cf, 0, m, x);
        SumResult b = birkhoff_sum(roof, cf, 0, n, x + rot.phase(static_cast<std::int64_t>(m)));
        CHECK(std::abs(whole.value - a.value - b.value) <= whole.error_bound + a.error_bound + b.error_bound + 1e-9);
    }
}

TEST_CASE("rotation phases are exact residues") {
    ContinuedFraction cf = golden(25);
    RotationPhases rot(cf);
    const Rational alpha = make_rational(cf.p(25), cf.q(25));
    for (std::int64_t j : {0L, 1L, 17L, -5L, 123456L})
        CHECK(rot.phase(j) == doctest::Approx(to_double(frac_of(Rational(j) * alpha))).epsilon(1e-15));
}

TEST_CASE("center statistics") {
    ContinuedFraction cf({1, 2, 1, 750, 1, 1, 1, 1, 1, 1});
    DiophantineWitness w = find_diophantine_indices(cf, 1, 2, 1.0);
    REQUIRE(w.indices == std::vector<std::size_t>{3});
    LogRoof one(0.0, TrigPolynomial{1.0, {}, {}});
    CenterStats s = center_stats(one, cf, w, 0);
    CHECK(s.q == 4);
    CHECK(s.c_k == doctest::Approx(4.0));
    LogRoof roof(1.0, TrigPolynomial{1.0, {}, {}});
    CenterStats t = center_stats(roof, cf, w, 0);
    double want = oracle_sum(1.0, TrigPolynomial{1.0, {}, {}}, cf, 4, t.x_k);
    CHECK(std::abs(t.c_k - want) <= t.error_bound + 1e-12);
    CHECK(error_kind([&] { center_stats(roof, cf, w, 1); }) == ErrorKind::OutOfRange);

    // At the centre the orbit is within 1/(a q) of the midpoints (m + 1/2)/q, where
    // sum_m -log((m + 1/2)/q) = q log q - lgamma(q + 1/2) + lgamma(1/2) and harmonics of
    // degree below q average out.
    CklLayout layout;
    layout.lead = 4;
    ContinuedFraction two = make_ckl(1, 2, 2, 1.0, 2, layout);
    DiophantineWitness w2 = find_diophantine_indices(two, 1, 2, 1.0);
    REQUIRE(w2.indices.size() == 2);
    for (std::size_t k = 0; k < 2; ++k) {
        CenterStats c = center_stats(LogRoof(1.0, kG), two, w2, k);
        double q = c.q.get_d();
        double half = q * std::log(q) - std::lgamma(q + 0.5) + std::lgamma(0.5);
        double want = 2.0 * half + q * kG.mean();
        CHECK(std::abs(c.c_k - want) < 1e-2 * q);
    }
}

TEST_CASE("tail tables, covers and separation") {
    CklLayout layout;
    layout.lead = 5;
    ContinuedFraction cf = make_ckl(2, 3, 1, 1.0, 2, layout);
    DiophantineWitness w = find_diophantine_indices(cf, 2, 3, 1.0);
    REQUIRE(w.indices.size() == 1);
    LogRoof roof(1.0, kG);
    const std::size_t q = cf.q(w.indices[0]).get_ui();
    TailTable t = tail_mass(roof, cf, w, 0, 1, {0.0, 2.0, 1e6}, 20 * q);
    CHECK(t.mass[0] == 1.0);
    CHECK(t.mass[1] > 0.0);
    CHECK(t.mass[1] < 1.0);
    CHECK(t.mass[2] == 0.0);
    CHECK(error_kind([&] { tail_mass(roof, cf, w, 0, 1, {0.0}, q); }) == ErrorKind::GridTooCoarse);

    IntervalCover full = ak_interval_cover(cf, w, 0, 0.0, 1e6);
    CHECK(full.length == doctest::Approx(1.0));
    const double D = 2.0, b = 4.0;
    IntervalCover part = ak_interval_cover(cf, w, 0, b, D);
    // the interval around 0 may be split at the origin
    std::size_t pieces = part.intervals.size();
    if (pieces == q + 1) CHECK(part.intervals.front().first == 0.0);
    if (pieces == q + 1) CHECK(part.intervals.back().second == 1.0);
    CHECK((pieces == q || pieces == q + 1));
    CHECK(part.length == doctest::Approx(D * std::exp(-b)));
    for (std::size_t k = 0; k + 1 < part.intervals.size(); ++k)
        CHECK(part.intervals[k].second <= part.intervals[k + 1].first);

    SeparationReport huge = separation_check(roof, cf, w, 0, 1e6, 3, 20 * q, D);
    CHECK(huge.grid_violations == 0);
    CHECK(huge.cusp_violations == 0);
    SeparationReport tiny = separation_check(roof, cf, w, 0, 0.0, 3, 20 * q, D);
    CHECK(tiny.below_threshold);
}

TEST_CASE("denjoy koksma bound") {
    ContinuedFraction cf = golden(30);
    for (std::size_t n : {5, 10, 15}) CHECK(denjoy_koksma_check(kG, cf, n, midpoint_grid(2000)).holds);
    CHECK(kG.lower_bound() > 0);
    CHECK(kG.mean() == 2.0);
}
