#include "ergoscope/special_flow.hpp"
#include "test_util.hpp"

#include <doctest.h>

using namespace ergoscope;

namespace {

Rational r(long a, long b = 1) { return make_rational(a, b); }

const ConstructionState& state() {
    static const ConstructionState st = [] {
        Permutation pi0 = Permutation::symmetric(4);
        return build_default_construction(find_positive_path(pi0, 200, 8), pi0, 3, 2, 3);
    }();
    return st;
}

std::vector<Rational> probes(const IntervalUnion& u) {
    std::vector<Rational> xs;
    for (const auto& iv : u.intervals()) {
        xs.push_back(iv.lo);
        xs.push_back((2 * iv.lo + iv.hi) / 3);
    }
    return xs;
}

// Orbit walk with the roof written out from its definition.
Rational walk_sum(const IET& t, const Roof& roof, std::int64_t n, Rational x) {
    Rational s = 0;
    for (std::int64_t k = 0; k < n; ++k) {
        int a = t.letter_at(x);
        if (auto* pc = std::get_if<RoofPC>(&roof)) {
            s += pc->c[a];
            Interval I = t.interval(pc->beta_letter);
            if (pc->beta <= x && x < I.hi) s += pc->D_beta;
        } else {
            const auto& pl = std::get<RoofPL>(roof);
            s += pl.kappa * x + pl.c[a];
        }
        x = t.apply(x);
    }
    return s;
}

Rational mass_at(const ProbMeasure& m, const Rational& loc) {
    for (const auto& a : std::get<AtomicMeasure>(m).atoms)
        if (a.location == loc) return a.mass;
    return 0;
}

}  // namespace

TEST_CASE("cocycle sums") {
    const ConstructionState& st = state();
    IET rot = make_iet(Permutation::symmetric(2), {r(2, 3), r(1, 3)});
    RoofPC flat;
    flat.c = {r(5, 2), r(5, 2)};
    flat.D_beta = 0;
    CHECK(cocycle_sum(rot, flat, 0, r(1, 5)) == 0);
    CHECK(cocycle_sum(rot, flat, 17, r(1, 5)) == r(85, 2));

    Roof pl = default_roof_pl(st.T, r(1));
    Roof pc = default_roof_pc(st.T, pick_beta(st, 0, r(3, 4)), r(1));
    for (const Roof* roof : {&pl, &pc}) {
        CHECK(cocycle_sum(st.T, *roof, st.q, r(0)) == walk_sum(st.T, *roof, st.q, r(0)));
        for (const Rational& x : probes(st.W)) {
            Rational whole = cocycle_sum(st.T, *roof, 3 * st.q, x);
            Rational parts = 0;
            for (int m = 0; m < 3; ++m) parts += cocycle_sum(st.T, *roof, st.q, st.T.apply(x, m * st.q));
            REQUIRE(whole == parts);
        }
    }
    CHECK(error_kind([&] { cocycle_sum(st.T, pl, -1, r(0)); }) == ErrorKind::OutOfRange);
    CHECK(error_kind([&] { cocycle_sum(st.T, pl, 1, r(2)); }) == ErrorKind::OutOfDomain);
}

TEST_CASE("roof constructors enforce positivity") {
    const IET& t = state().T;
    std::vector<Rational> ones(4, r(1));
    CHECK(error_kind([&] { make_roof_pc(t, ones, r(1, 100), r(0)); }) == ErrorKind::InvalidParams);
    CHECK(error_kind([&] { make_roof_pc(t, ones, r(1, 100), r(-2)); }) == ErrorKind::InvalidParams);
    CHECK(error_kind([&] { make_roof_pl(t, r(0), ones); }) == ErrorKind::InvalidParams);
    CHECK(error_kind([&] { make_roof_pl(t, r(-2), ones); }) == ErrorKind::InvalidParams);
    RoofPL ok = default_roof_pl(t, r(-1));
    for (long k = 0; k < 50; ++k) CHECK(ok.value(t, r(k, 50)) > 0);
}

TEST_CASE("piecewise constant pushforwards are atomic on multiples of D") {
    const ConstructionState& st = state();
    const Rational D = r(3, 2);
    Roof roof = default_roof_pc(st.T, pick_beta(st, 0, r(3, 4)), D);
    const Rational controlled = st.controlled().measure();
    for (int i = 1; i <= 3; ++i) {
        PushforwardResult pf = pushforward_exact(st, roof, i);
        CHECK(pf.a_n == walk_sum(st.T, roof, st.q, r(0)));
        CHECK(total_mass(pf.measure) == controlled);
        CHECK(total_mass(pf.conditional()) == 1);
        const auto& atoms = std::get<AtomicMeasure>(pf.measure).atoms;
        CHECK(atoms.size() <= static_cast<std::size_t>(i + 1));
        for (const auto& a : atoms) {
            Rational j = a.location / D;
            CHECK(j.get_den() == 1);
            CHECK(j >= 0);
            CHECK(j <= i);
        }
        // every sampled controlled point lands on an atom
        for (const IntervalUnion* set : {&st.W, &st.Z, &st.U})
            for (const Rational& x : probes(*set)) {
                Rational v = cocycle_sum(st.T, roof, i * st.q, x) - i * pf.a_n;
                CHECK(mass_at(pf.measure, v) > 0);
            }
        CHECK(mass_at(pf.measure, r(0)) >= st.Z.measure());
        CHECK(mass_at(pf.measure, i * D) >= st.U_parts[3 - i].measure());
    }
    CHECK(error_kind([&] { pushforward_exact(st, roof, 0); }) == ErrorKind::OutOfRange);
    CHECK(error_kind([&] { pushforward_exact(st, roof, 4); }) == ErrorKind::OutOfRange);

    IntervalUnion allowed = beta_region(st);
    Rational bad = -1;
    for (long k = 1; k < 1000 && bad < 0; ++k)
        if (!allowed.contains(r(k, 1000))) bad = r(k, 1000);
    REQUIRE(bad > 0);
    Roof outside = default_roof_pc(st.T, bad, r(1));
    CHECK(error_kind([&] { pushforward_exact(st, outside, 2); }) == ErrorKind::BetaInForbiddenRegion);
}

TEST_CASE("piecewise linear pushforwards") {
    const ConstructionState& st = state();
    const Rational gamma = measure_report(st).gamma;
    for (const Rational& kappa : {r(1), r(-1), r(2)}) {
        Roof roof = default_roof_pl(st.T, kappa);
        for (int i = 1; i <= 3; ++i) {
            PushforwardResult pf = pushforward_exact(st, roof, i);
            CHECK(total_mass(pf.measure) == st.controlled().measure());
            ProbMeasure cond = pf.conditional();
            CHECK(total_mass(cond) == 1);
            // the sampled values sit inside the support of the density
            const auto& pc = std::get<PiecewiseConstantDensity>(cond);
            for (const Rational& x : probes(st.W)) {
                Rational v = cocycle_sum(st.T, roof, i * st.q, x) - i * pf.a_n;
                CHECK(v >= pc.breakpoints.front());
                CHECK(v <= pc.breakpoints.back());
            }
            double ks = to_double(ks_distance_exact(cond, predicted_density(i, kappa, gamma, false)));
            CHECK(ks < 0.01);
        }
    }
}

TEST_CASE("predicted atomic measures") {
    ProbMeasure one = predicted_atomic(1, r(1, 10), r(1, 2), r(1, 2), r(1));
    CHECK(atom_count(one) == 2);
    ProbMeasure three = predicted_atomic(3, r(1, 10), r(2, 5), r(1, 5), r(2));
    const auto& at = std::get<AtomicMeasure>(three).atoms;
    REQUIRE(at.size() == 4);
    CHECK(at[0].mass == r(2, 5));
    CHECK(at[1].location == 2);
    CHECK(at[1].mass == r(1, 5));
    CHECK(at[2].mass == r(1, 5));
    CHECK(at[3].location == 6);
    CHECK(at[3].mass == r(1, 5));
    // masses 4/10 + 4/10 + 2 * 2 * 1/10 exceed one
    CHECK(error_kind([] { predicted_atomic(3, r(1, 10), r(2, 5), r(2, 5), r(1)); }) == ErrorKind::MassMismatch);
    CHECK(error_kind([] { predicted_atomic(2, r(1, 4), r(1, 8), r(3, 8), r(1)); }) == ErrorKind::MassMismatch);
}

TEST_CASE("predicted densities") {
    for (const Rational& kappa : {r(1), r(3, 2)}) {
        const Rational gamma = r(1, 4);
        ProbMeasure g1 = predicted_density(1, kappa, gamma, false);
        CHECK(total_mass(g1) == 1);
        CHECK(max_density(g1) == 1 / kappa);
        CHECK(cdf_exact(g1, -kappa * gamma) == 0);
        CHECK(cdf_exact(g1, r(0)) == gamma / 2);
        CHECK(cdf_exact(g1, kappa * (1 - gamma)) == gamma / 2 + (1 - gamma));
        CHECK(cdf_exact(g1, kappa) == 1);
        CHECK(level_components(g1, 1 / kappa) == 1);
    }
    for (int i = 1; i <= 5; ++i) {
        const Rational gamma = make_rational(1, 10 * i);
        ProbMeasure g = predicted_density(i, r(1), gamma, false);
        CHECK(total_mass(g) == 1);
        ProbMeasure neg = predicted_density(i, r(-1), gamma, false);
        CHECK(ks_distance_exact(neg, rescale(g, r(-1))) == 0);
        ProbMeasure tilde = predicted_density(i, r(1), gamma, true);
        CHECK(ks_distance_exact(tilde, rescale(g, Rational(i))) == 0);
        if (i >= 2) CHECK(level_components(tilde, r(2)) == static_cast<std::size_t>(i - 1));
    }
    CHECK(error_kind([] { predicted_density(2, r(1), r(1, 3), false); }) == ErrorKind::DegenerateSupport);
    CHECK(error_kind([] { predicted_density(2, r(1), r(0), false); }) == ErrorKind::DegenerateSupport);
    CHECK(error_kind([] { predicted_density(2, r(0), r(1, 10), false); }) == ErrorKind::InvalidParams);
}
