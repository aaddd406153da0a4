#include "ergoscope/cf_rotation.hpp"
#include "ergoscope/iet.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

using namespace ergoscope;

namespace {

Rational r(long a, long b = 1) { return make_rational(a, b); }

std::vector<Rational> random_lengths(std::mt19937_64& rng, int d) {
    std::uniform_int_distribution<long> num(1, 997);
    std::vector<Rational> v;
    for (int k = 0; k < d; ++k) v.push_back(make_rational(num(rng), 997));
    return v;
}

// Irreducible iff no proper prefix of the top row has the same letters as the bottom prefix.
bool irreducible_oracle(const Permutation& p) {
    std::set<int> a, b;
    for (int k = 0; k + 1 < p.d(); ++k) {
        a.insert(p.top()[k]);
        b.insert(p.bottom()[k]);
        if (a == b) return false;
    }
    return true;
}

// Steps until the T-orbit of x returns to [0, len).
std::int64_t first_return(const IET& t, const Rational& x, const Rational& len, Rational& landing) {
    Rational y = t.apply(x);
    std::int64_t n = 1;
    while (y >= len) {
        y = t.apply(y);
        ++n;
    }
    landing = y;
    return n;
}

}  // namespace

TEST_CASE("two-interval exchange is a rotation") {
    IET t = make_iet(Permutation::symmetric(2), {r(2, 3), r(1, 3)});
    for (long k = 0; k < 30; ++k) {
        Rational x = r(k, 30);
        CHECK(t.apply(x) == frac_of(x + r(1, 3)));
        CHECK(t.apply(x, 0) == x);
        CHECK(t.apply(t.apply(x, 5), -5) == x);
    }
    // Rational surrogate alpha = p_N/q_N: T^{q_n} x = x + q_n alpha mod 1.
    ContinuedFraction cf(std::vector<Integer>(12, Integer(1)));
    Rational alpha = make_rational(cf.p(12), cf.q(12));
    IET rot = make_iet(Permutation::symmetric(2), {1 - alpha, alpha});
    Rational x = r(1, 7);
    for (std::size_t n : {4, 6, 8}) {
        long qn = cf.q(n).get_si();
        CHECK(apply_iet(rot, x, qn) == frac_of(x + Rational(qn) * alpha));
    }
}

TEST_CASE("identity permutation is valid but reducible") {
    Permutation id({0, 1, 2}, {0, 1, 2});
    CHECK(!is_irreducible(id));
    IET t(id, {r(1, 2), r(1, 4), r(1, 4)});
    for (long k = 0; k < 8; ++k) CHECK(t.apply(r(k, 8)) == r(k, 8));
    for (int d = 2; d <= 7; ++d) CHECK(is_irreducible(Permutation::symmetric(d)));
}

TEST_CASE("irreducibility matches the prefix oracle on all d = 4 permutations") {
    std::vector<int> top{0, 1, 2, 3}, bottom{0, 1, 2, 3};
    int count = 0;
    do {
        Permutation p(top, bottom);
        CHECK(is_irreducible(p) == irreducible_oracle(p));
        count += irreducible_oracle(p);
    } while (std::next_permutation(bottom.begin(), bottom.end()));
    CHECK(count == 13);
}

TEST_CASE("images of the exchanged intervals re-partition the domain") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        IET t = make_iet(Permutation::symmetric(4), random_lengths(rng, 4));
        std::vector<Interval> images;
        for (int a = 0; a < 4; ++a) {
            Interval I = t.interval(a);
            CHECK(t.apply(I.lo) == t.bottom_start(a));
            images.push_back({t.bottom_start(a), t.bottom_start(a) + I.length()});
        }
        CHECK(total_length(images) == t.domain_length());
        CHECK(IntervalUnion(images) == IntervalUnion(Rational(0), t.domain_length()));
        for (const auto& x : t.discontinuities()) {
            int a = t.letter_at(x);
            CHECK(t.apply(x) == t.bottom_start(a));
        }
    }
}

TEST_CASE("invalid IETs are rejected") {
    CHECK(error_kind([] { make_iet(Permutation::symmetric(2), {r(1), r(0)}); }) == ErrorKind::NonPositiveLength);
    CHECK(error_kind([] { make_iet(Permutation::symmetric(3), {r(1), r(1)}); }) == ErrorKind::InvalidParams);
    CHECK(error_kind([] { Permutation({0, 1}, {0, 0}); }) == ErrorKind::InvalidParams);
    IET t = make_iet(Permutation::symmetric(2), {r(1), r(1)});
    CHECK(error_kind([&] { t.apply(r(2)); }) == ErrorKind::OutOfDomain);
}

TEST_CASE("rauzy step on a rotation is one Euclid subtraction") {
    IET t = make_iet(Permutation::symmetric(2), {r(5, 7), r(2, 7)});
    RauzyStep s = rauzy_step(t);
    CHECK(s.next.lengths() == std::vector<Rational>{r(3, 7), r(2, 7)});
    CHECK(s.winner == 0);
    CHECK(s.next.perm() == t.perm());
    IET even = make_iet(Permutation::symmetric(2), {r(1, 2), r(1, 2)});
    CHECK(error_kind([&] { rauzy_step(even); }) == ErrorKind::DegenerateStep);
}

TEST_CASE("induction matrices map induced lengths back exactly") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 30; ++trial) {
        IET t = make_iet(Permutation::symmetric(4), random_lengths(rng, 4));
        RauzyStep s = rauzy_step(t);
        CHECK(apply_matrix(s.elementary, s.next.lengths()) == t.lengths());
        CHECK(determinant(s.elementary) == 1);
        InductionRecord rec;
        if (error_kind([&] { rec = rauzy_induct(t, 12); })) continue;
        CHECK(apply_matrix(rec.matrix, rec.end_state.lengths()) == t.lengths());
        CHECK(is_irreducible(rec.end_state.perm()));
    }
    IET t = make_iet(Permutation::symmetric(4), {r(1, 3), r(1, 5), r(1, 7), r(1, 11)});
    InductionRecord zero = rauzy_induct(t, 0);
    CHECK(zero.matrix == identity_matrix(4));
    CHECK(zero.end_state.lengths() == t.lengths());
}

TEST_CASE("column sums are first return times") {
    std::mt19937_64 rng(6);
    int checked = 0;
    for (int trial = 0; trial < 20; ++trial) {
        IET t = make_iet(Permutation::symmetric(4), random_lengths(rng, 4));
        InductionRecord rec;
        if (error_kind([&] { rec = rauzy_induct(t, 12); })) continue;
        auto s = column_sums(rec.matrix);
        const Rational len = rec.end_state.domain_length();
        Rational measure = 0;
        for (int b = 0; b < 4; ++b) {
            Interval I = rec.end_state.interval(b);
            for (const Rational& x : std::vector<Rational>{I.lo, (I.lo + I.hi) / 2}) {
                Rational landing;
                CHECK(first_return(t, x, len, landing) == s[b]);
                CHECK(landing == rec.end_state.apply(x));
            }
            measure += Rational(s[b]) * I.length();
        }
        CHECK(measure == t.domain_length());
        ++checked;
    }
    CHECK(checked > 10);
}

TEST_CASE("tower levels partition the domain") {
    IET t = make_iet(Permutation::symmetric(4), {r(3, 10), r(1, 5), r(7, 20), r(3, 20)});
    const TowerDecomposition zero = tower_decomposition(t, rauzy_induct(t, 0));
    for (int a = 0; a < 4; ++a) {
        CHECK(zero.towers[a].height == 1);
        CHECK(zero.towers[a].levels.front() == t.interval(a));
    }
    // lengths chosen so that ten induction steps stay non-degenerate
    std::mt19937_64 rng(12);
    InductionRecord rec;
    while (error_kind([&] { rec = rauzy_induct(t, 10); })) t = make_iet(Permutation::symmetric(4), random_lengths(rng, 4));
    TowerDecomposition td = tower_decomposition(t, rec);
    std::vector<Interval> all;
    for (const auto& tw : td.towers) {
        CHECK(static_cast<std::int64_t>(tw.levels.size()) == tw.height);
        for (std::size_t k = 0; k + 1 < tw.levels.size(); ++k)
            CHECK(t.apply(tw.levels[k].lo) == tw.levels[k + 1].lo);
        all.insert(all.end(), tw.levels.begin(), tw.levels.end());
    }
    CHECK(total_length(all) == t.domain_length());
    CHECK(IntervalUnion(all) == IntervalUnion(Rational(0), t.domain_length()));

    IET rot = make_iet(Permutation::symmetric(2), {r(5, 8), r(3, 8)});
    TowerDecomposition two = tower_decomposition(rot, rauzy_induct(rot, 1));
    Rational total = 0;
    for (const auto& tw : two.towers) total += Rational(tw.height) * tw.levels.front().length();
    CHECK(total == 1);
}

TEST_CASE("rotation induction runs are the continued fraction quotients") {
    for (auto [p, q] : {std::pair<long, long>{13, 21}, {7, 30}, {355, 1131}, {1, 9}}) {
        Rational a = make_rational(p, q);
        IET t = make_iet(Permutation::symmetric(2), {a, r(1)});
        auto runs = rauzy_run_lengths(t, 10000);
        ContinuedFraction cf = cf_expand_rational(a, 100);
        REQUIRE(runs.size() == cf.depth());
        for (std::size_t k = 0; k < runs.size(); ++k) CHECK(Integer(static_cast<long>(runs[k])) == cf.a(k + 1));
    }
}

TEST_CASE("balance constant rho") {
    CHECK(rho(Matrix{{1, 1}, {1, 1}}).value == 1);
    CHECK(rho(Matrix{{1, 1}, {1, 2}}).value == 2);
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<std::int64_t> e(1, 9);
    for (int trial = 0; trial < 50; ++trial) {
        Matrix a(4, std::vector<std::int64_t>(4)), b = a;
        for (auto* m : {&a, &b})
            for (auto& row : *m)
                for (auto& x : row) x = e(rng);
        CHECK(rho(multiply(a, b)).value <= rho(b).value);
    }
}

TEST_CASE("positive path search") {
    PositivePath p = find_positive_path(Permutation::symmetric(4), 200, 8);
    CHECK(is_positive(p.B));
    CHECK(endpoint_condition(p.pi_hat));
    CHECK(rho(p.B).value == 5);
    PositivePath two = find_positive_path(Permutation::symmetric(2), 50, 1);
    CHECK(two.pi_hat == Permutation::symmetric(2));
    CHECK(is_positive(two.B));
    CHECK(error_kind([] { find_positive_path(Permutation::symmetric(4), 1, 8); }) == ErrorKind::NotFound);
}
