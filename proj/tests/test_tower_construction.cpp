#include "ergoscope/tower_construction.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <map>

using namespace ergoscope;

namespace {

const Permutation& pi0() {
    static const Permutation p = Permutation::symmetric(4);
    return p;
}

const PositivePath& path() {
    static const PositivePath p = find_positive_path(pi0(), 200, 8);
    return p;
}

const ConstructionState& state(int n) {
    static std::map<int, ConstructionState> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_default_construction(path(), pi0(), 3, 2, n)).first;
    return it->second;
}

// Left endpoints and midpoints of every piece.
std::vector<Rational> probes(const IntervalUnion& u) {
    std::vector<Rational> xs;
    for (const auto& iv : u.intervals()) {
        xs.push_back(iv.lo);
        xs.push_back((iv.lo + iv.hi) / 2);
    }
    return xs;
}

}  // namespace

TEST_CASE("sampled lengths satisfy every Y_n inequality") {
    for (int n = 2; n <= 10; ++n) {
        ConstructionParams p = default_params(path(), pi0(), 3, 2, n);
        auto lambda = sample_Yn(p);
        YnReport r = check_Yn(lambda, p);
        CHECK(r.ok);
        Rational total = 0;
        for (const auto& x : lambda) total += x;
        CHECK(total == 1);

        // ineq4 and the filler bound, evaluated from the lengths directly
        const auto& top = p.pi_hat.top();
        Rational tail = lambda[top[1]] + lambda[top[2]] + lambda[top[3]];
        Rational Q = lambda[top[0]] - (n - 2) * tail;
        Rational tilde = lambda[top[0]] - (n - 1) * tail;
        Rational x4 = (lambda[top[3]] - tilde) / Q;
        CHECK(x4 > p.epsilon / 2);
        CHECK(x4 < p.epsilon);
        CHECK((lambda[top[1]] + lambda[top[2]]) / Q < 1 / (n + rho(p.B).value));
    }
}

TEST_CASE("Y_n rejects uniform and badly perturbed vectors") {
    ConstructionParams p = default_params(path(), pi0(), 3, 2, 4);
    CHECK_FALSE(check_Yn(std::vector<Rational>(4, make_rational(1, 4)), p).ok);
    auto lambda = sample_Yn(p);
    const int last = p.pi_hat.top()[3];
    auto far = lambda;
    far[last] += make_rational(1, 10);
    CHECK_FALSE(check_Yn(far, p).ok);
    auto near = lambda;
    near[last] += make_rational(1, 1000000000000L);
    CHECK(check_Yn(near, p).ok);
}

TEST_CASE("two-letter smoke test") {
    Permutation s2 = Permutation::symmetric(2);
    PositivePath p2 = find_positive_path(s2, 50, 1);
    ConstructionParams p = default_params(p2, s2, 2, 1, 3);
    CHECK(check_Yn(sample_Yn(p), p).ok);
}

TEST_CASE("parameter validation") {
    ConstructionParams p = default_params(path(), pi0(), 3, 2, 4);
    auto bad = p;
    bad.delta_prime = bad.delta;
    CHECK(error_kind([&] { sample_Yn(bad); }) == ErrorKind::InvariantViolated);
    bad = p;
    bad.L = 3;
    CHECK(error_kind([&] { sample_Yn(bad); }) == ErrorKind::InvariantViolated);
    bad = p;
    bad.epsilon = 1;
    CHECK(error_kind([&] { sample_Yn(bad); }) == ErrorKind::InvariantViolated);
}

TEST_CASE("heights and the partition") {
    for (int n = 3; n <= 6; ++n) {
        const ConstructionState& st = state(n);
        CHECK(st.q == st.sd + n * st.s1);
        for (int b : st.middle_letters) CHECK(st.towers.towers[b].height == st.s[b] + (n - 1) * st.s1);
        IntervalUnion all = st.W.unite(st.Z).unite(st.U).unite(st.X);
        CHECK(all == IntervalUnion(Rational(0), Rational(1)));
        CHECK(st.W.measure() + st.Z.measure() + st.U.measure() + st.X.measure() == 1);
        CHECK(st.glue_ok);
        MeasureReport m = measure_report(st);
        CHECK(m.partition_exact);
        CHECK(m.gamma == Rational(st.q) * st.Delta);
    }
    for (int n = 4; n <= 6; ++n) CHECK(state(n).X.measure() < state(n - 1).X.measure());
}

TEST_CASE("T^{i q_n} translates the controlled set by i Delta_n") {
    for (int n : {3, 5}) {
        const ConstructionState& st = state(n);
        for (int i = 1; i <= 3; ++i) {
            for (const IntervalUnion* set : {&st.W, &st.Z, &st.U})
                for (const Rational& x : probes(*set))
                    REQUIRE(st.T.apply(x, static_cast<long>(i) * st.q) == x + i * st.Delta);
            RigidityReport r = verify_rigidity(st, i);
            CHECK(r.max_deviation == 0);
            CHECK(r.verified_measure == st.controlled().measure());
        }
        CHECK(verify_rigidity_on(st, st.U_parts[0], 3).max_deviation == 0);
        CHECK(st.X.disjoint_from(st.controlled()));
    }
}

TEST_CASE("beta placement") {
    const ConstructionState& st = state(4);
    Rational b = pick_beta(st, 0, make_rational(3, 4));
    CHECK(b == st.J.hi * 3 / 4);
    CHECK(beta_region(st).contains(b));
    CHECK(pick_beta(st, 0, make_rational(1, 2)) == st.J.hi / 2);
    CHECK(beta_region(st).contains(pick_beta(st, 5, make_rational(3, 4))));
    CHECK(error_kind([&] { pick_beta(st, st.q, make_rational(3, 4)); }) == ErrorKind::OutOfRange);
    CHECK(error_kind([&] { pick_beta(st, 0, make_rational(1, 4)); }) == ErrorKind::OutOfRange);
}
