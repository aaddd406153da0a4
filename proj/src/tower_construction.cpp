#include "ergoscope/tower_construction.hpp"

#include "ergoscope/error.hpp"

#include <json.hpp>

#include <algorithm>

namespace ergoscope {

namespace {

Rational as_rational(std::int64_t v) { return Rational(Integer(static_cast<long>(v))); }

// Union of T^i(start) for i_from <= i < i_to.
IntervalUnion sweep(const IET& t, const IntervalUnion& start, std::int64_t i_from, std::int64_t i_to) {
    std::vector<Interval> all;
    IntervalUnion cur = start;
    for (std::int64_t i = 0; i < i_to; ++i) {
        if (i >= i_from) all.insert(all.end(), cur.intervals().begin(), cur.intervals().end());
        if (i + 1 < i_to) cur = t.image(cur);
    }
    return IntervalUnion(std::move(all));
}

struct Piece {
    Rational src;  // left endpoint in the source
    Rational len;
    Rational cur;  // left endpoint of the current image
};

// Pushes every piece `steps` times, splitting at discontinuities.
std::vector<Piece> push_pieces(const IET& t, std::vector<Piece> pieces, std::int64_t steps) {
    for (std::int64_t k = 0; k < steps; ++k) {
        std::vector<Piece> next;
        next.reserve(pieces.size());
        for (auto& p : pieces) {
            Rational src = p.src, cur = p.cur, len = p.len;
            while (len > 0) {
                int a = t.letter_at(cur);
                Rational room = t.top_start(a) + t.lengths()[a] - cur;
                Rational part = room < len ? room : len;
                next.push_back({src, part, cur + t.bottom_start(a) - t.top_start(a)});
                src += part;
                cur += part;
                len -= part;
            }
        }
        pieces = std::move(next);
    }
    return pieces;
}

}  // namespace

ConstructionParams default_params(const PositivePath& path, const Permutation& pi0, int K, int L, int n) {
    ConstructionParams p;
    p.K = K;
    p.L = L;
    p.n = n;
    p.pi0 = pi0;
    p.pi_hat = path.pi_hat;
    p.B = path.B;
    p.path = path.path;
    Balance r = rho(path.B);
    if (r.infinite) fail(ErrorKind::InvalidParams, "B is not strictly positive");
    Rational a = 1 / (100 * r.value);
    Rational b = make_rational(1, 100L * K);
    p.epsilon = (a < b ? a : b) / 2;
    p.delta = p.epsilon * make_rational(9, 20);
    p.delta_prime = p.epsilon * make_rational(2, 5);
    return p;
}

void validate_params(const ConstructionParams& p) {
    if (!(p.K > p.L) || p.L < 1) fail(ErrorKind::InvariantViolated, "need K > L >= 1");
    if (p.n < 2) fail(ErrorKind::InvariantViolated, "need n >= 2");
    const int d = p.pi_hat.d();
    if (d < 2 || p.pi0.d() != d || static_cast<int>(p.B.size()) != d)
        fail(ErrorKind::InvariantViolated, "alphabet sizes disagree");
    if (!endpoint_condition(p.pi_hat))
        fail(ErrorKind::InvariantViolated, "pi_hat violates the endpoint condition");
    Balance r = rho(p.B);
    if (r.infinite) fail(ErrorKind::InvariantViolated, "B is not strictly positive");
    Rational cap = 1 / (100 * r.value);
    Rational capk = make_rational(1, 100L * p.K);
    if (!(p.epsilon > 0 && p.epsilon < cap && p.epsilon < capk))
        fail(ErrorKind::InvariantViolated, "epsilon must lie in (0, min(1/(100 rho), 1/(100 K)))");
    if (!(p.epsilon / 3 < p.delta_prime && p.delta_prime < p.delta && p.delta < p.epsilon / 2))
        fail(ErrorKind::InvariantViolated, "need epsilon/3 < delta' < delta < epsilon/2");
}

YnReport check_Yn(const std::vector<Rational>& lambda, const ConstructionParams& p) {
    const auto& top = p.pi_hat.top();
    const int d = p.pi_hat.d();
    if (static_cast<int>(lambda.size()) != d) fail(ErrorKind::InvalidParams, "length vector size");
    const Rational rho_b = rho(p.B).value;
    Rational tail = 0, middle = 0;
    for (int k = 1; k < d; ++k) tail += lambda[top[k]];
    for (int k = 1; k + 1 < d; ++k) middle += lambda[top[k]];
    const Rational& la = lambda[top[0]];
    const Rational& ld = lambda[top[d - 1]];
    const Rational diff = p.delta - p.delta_prime;
    YnReport r;
    r.Q = la - (p.n - 2) * tail;
    if (r.Q <= 0) return r;
    Rational tilde = la - (p.n - 1) * tail;
    Rational x1 = tilde / r.Q;
    Rational base1 = Rational(1, 2) - p.delta;
    r.ineq1_lower = x1 - (base1 + 3 * diff / 8);
    r.ineq1_upper = (base1 + 5 * diff / 8) - x1;
    Rational x2 = ld / r.Q;
    Rational base2 = Rational(1, 2) + p.delta_prime;
    r.ineq2_lower = x2 - (base2 + 3 * diff / 8);
    r.ineq2_upper = (base2 + 5 * diff / 8) - x2;
    r.ineq3 = 1 / (p.n + rho_b) - middle / r.Q;
    Rational x4 = (ld - tilde) / r.Q;
    r.ineq4_lower = x4 - p.epsilon / 2;
    r.ineq4_upper = p.epsilon - x4;
    r.ok = r.ineq1_lower > 0 && r.ineq1_upper > 0 && r.ineq2_lower > 0 && r.ineq2_upper > 0 &&
           r.ineq3 > 0 && r.ineq4_lower > 0 && r.ineq4_upper > 0;
    return r;
}

std::vector<Rational> sample_Yn(const ConstructionParams& p) {
    validate_params(p);
    const auto& top = p.pi_hat.top();
    const int d = p.pi_hat.d();
    const Rational diff = p.delta - p.delta_prime;
    // The floor 2d + 3 keeps ineq1 strict when (d - 1)(n + rho) is small, as for d = 2.
    Rational spread = (d - 1) * (p.n + rho(p.B).value);
    if (spread < 2 * d + 3) spread = 2 * d + 3;
    const Rational filler = diff / spread;
    std::vector<Rational> v(d);
    for (int k = 1; k + 1 < d; ++k) v[top[k]] = filler;
    v[top[d - 1]] = Rational(1, 2) + p.delta_prime + 3 * diff / 8 + filler;
    Rational tail = 0;
    for (int k = 1; k < d; ++k) tail += v[top[k]];
    v[top[0]] = Rational(1, 2) - p.delta + 5 * diff / 8 - 2 * filler + (p.n - 1) * tail;
    Rational total = 0;
    for (const auto& x : v) total += x;
    for (auto& x : v) x /= total;
    if (!check_Yn(v, p).ok)
        fail(ErrorKind::InvariantViolated, "sample vector fails the simplex inequalities at n = " +
                                               std::to_string(p.n));
    return v;
}

ConstructionState build_construction(const ConstructionParams& params,
                                     const std::vector<Rational>& lambda_prime) {
    validate_params(params);
    YnReport yn = check_Yn(lambda_prime, params);
    if (!yn.ok) fail(ErrorKind::InvariantViolated, "lambda' is outside the simplex set");
    if (params.path.empty()) fail(ErrorKind::InvalidParams, "empty induction path");

    ConstructionState st;
    st.params = params;
    st.rho = rho(params.B).value;
    st.lambda_prime = lambda_prime;
    const int d = params.pi_hat.d();
    const auto& top = params.pi_hat.top();
    st.letter_first = top[0];
    st.letter_last = top[d - 1];
    for (int k = 1; k + 1 < d; ++k) st.middle_letters.push_back(top[k]);
    const int A = st.letter_first, D = st.letter_last;

    std::vector<Rational> bl = apply_matrix(params.B, lambda_prime);
    Rational total = 0;
    for (const auto& x : bl) total += x;
    for (auto& x : bl) x /= total;
    st.T = IET(params.pi0, bl);

    // The positive path, replayed from the top-level map.
    const std::size_t N = params.path.size();
    InductionRecord rec = rauzy_induct(st.T, N);
    if (!(rec.end_state.perm() == params.pi_hat))
        fail(ErrorKind::PermutationMismatch, "path does not end at pi_hat");
    if (rec.matrix != params.B) fail(ErrorKind::PermutationMismatch, "path matrix differs from B");
    for (std::size_t j = 0; j < N; ++j)
        if (rec.step_types[j] != params.path[j])
            fail(ErrorKind::PermutationMismatch, "step types differ from the recorded path");
    const std::vector<Rational> lambda_prev = rec.end_state.lengths();
    const Rational scale = lambda_prev[0] / lambda_prime[0];
    for (int a = 0; a < d; ++a)
        if (lambda_prev[a] != scale * lambda_prime[a])
            fail(ErrorKind::InconsistentRecord, "induced lengths are not proportional to lambda'");

    // (d-1)(n-1) further steps; only the first letter is cut.
    for (int block = 0; block < params.n - 1; ++block) {
        for (int k = 0; k + 1 < d; ++k) {
            RauzyStep step = rauzy_step(rec.end_state);
            if (step.winner != A || step.type != StepType::Bottom)
                fail(ErrorKind::PermutationMismatch, "extra step does not cut the first letter");
            rec.matrix = multiply(rec.matrix, step.elementary);
            rec.step_types.push_back(step.type);
            rec.winners.push_back(step.winner);
            rec.end_state = std::move(step.next);
            ++rec.steps;
        }
        if (!(rec.end_state.perm() == params.pi_hat))
            fail(ErrorKind::PermutationMismatch, "permutation does not return to pi_hat");
    }
    st.record = rec;
    st.lambda_rn = rec.end_state.lengths();
    st.towers = tower_decomposition(st.T, rec);

    st.s = column_sums(params.B);
    st.s1 = st.s[A];
    st.sd = st.s[D];
    st.q = st.sd + static_cast<std::int64_t>(params.n) * st.s1;
    for (int a = 0; a < d; ++a) {
        std::int64_t expect = a == A ? st.s1 : st.s[a] + (params.n - 1) * st.s1;
        if (st.towers.towers[a].height != expect)
            fail(ErrorKind::InconsistentRecord, "tower height over " + letter_name(a) + " is " +
                                                    std::to_string(st.towers.towers[a].height));
    }

    const auto& lam = st.lambda_rn;
    st.Delta = lam[D] - lam[A];
    if (st.Delta <= 0) fail(ErrorKind::InvariantViolated, "Delta_n is not positive");
    st.Sigma = 0;
    for (int k = 0; k + 1 < d; ++k) st.Sigma += lam[top[k]];
    st.domain = st.Sigma + lam[D];
    Rational tail_prev = 0;
    for (int k = 1; k < d; ++k) tail_prev += lambda_prev[top[k]];
    st.Q = lambda_prev[A] - (params.n - 2) * tail_prev;
    if (st.Q != st.domain) fail(ErrorKind::InconsistentRecord, "domain length differs from Q_n");

    const int K = params.K;
    st.J = {Rational(0), lam[A] - K * st.Delta};
    if (st.J.hi <= 0) fail(ErrorKind::InvariantViolated, "J^n is empty");
    const IET& T = st.T;
    st.W = sweep(T, IntervalUnion(st.J.lo, st.J.hi), 0, st.q);
    st.Z = sweep(T, IntervalUnion(st.Sigma, st.Sigma + st.Delta), 0, st.sd + (params.n - 1) * st.s1);

    std::vector<Interval> x1;
    for (int a : st.middle_letters)
        for (const auto& lv : st.towers.towers[a].levels) x1.push_back(lv);
    st.X1 = IntervalUnion(std::move(x1));
    st.X2 = sweep(T, IntervalUnion(st.domain - K * st.Delta, st.domain),
                  (params.n - 3) * st.s1, st.sd + (params.n - 1) * st.s1);
    std::vector<Interval> mids;
    for (int a : st.middle_letters) mids.push_back(rec.end_state.interval(a));
    st.X3 = sweep(T.inverse(), IntervalUnion(std::move(mids)), 0, K * st.q);
    st.X = st.X1.unite(st.X2).unite(st.X3);

    const Rational jlen = st.J.hi;
    const std::int64_t u_height = (params.n - 2) * st.s1;
    for (int p = 1; p <= K; ++p) {
        IntervalUnion raw = sweep(T, IntervalUnion(jlen + (p - 1) * st.Delta, jlen + p * st.Delta), 0, u_height);
        st.U_parts.push_back(raw.subtract(st.X));
    }
    for (const auto& u : st.U_parts) st.U = st.U.unite(u);

    // Gluing of the images of [lambda_first, Q_n).
    st.glue_ok = true;
    {
        const std::int64_t hi = (params.n - 1) * st.s1;
        std::vector<IntervalUnion> img;
        IntervalUnion cur(lam[A], st.domain);
        for (std::int64_t i = 0; i < hi; ++i) {
            img.push_back(cur);
            cur = T.image(cur);
        }
        for (std::int64_t i = st.s1; i < u_height; ++i) {
            const auto& a = img[i];
            const auto& b = img[i + st.s1];
            if (a.size() != 1 || b.size() != 1 || a.intervals()[0].hi != b.intervals()[0].lo) {
                st.glue_ok = false;
                break;
            }
        }
    }
    return st;
}

ConstructionState build_default_construction(const PositivePath& path, const Permutation& pi0,
                                             int K, int L, int n) {
    ConstructionParams p = default_params(path, pi0, K, L, n);
    return build_construction(p, sample_Yn(p));
}

RigidityReport verify_rigidity_on(const ConstructionState& state, const IntervalUnion& set, int i) {
    if (i < 1 || i > state.params.K) fail(ErrorKind::OutOfRange, "rigidity multiple " + std::to_string(i));
    std::vector<Piece> pieces;
    for (const auto& iv : set.intervals()) pieces.push_back({iv.lo, iv.hi - iv.lo, iv.lo});
    pieces = push_pieces(state.T, std::move(pieces), static_cast<std::int64_t>(i) * state.q);
    RigidityReport rep;
    rep.i = i;
    rep.max_deviation = 0;
    rep.verified_measure = 0;
    rep.pieces = pieces.size();
    const Rational shift = i * state.Delta;
    for (const auto& p : pieces) {
        Rational dev = abs(p.cur - p.src - shift);
        if (dev > rep.max_deviation) rep.max_deviation = dev;
        rep.verified_measure += p.len;
    }
    return rep;
}

RigidityReport verify_rigidity(const ConstructionState& state, int i) {
    return verify_rigidity_on(state, state.controlled(), i);
}

MeasureReport measure_report(const ConstructionState& state) {
    MeasureReport r;
    r.W = state.W.measure();
    r.Z = state.Z.measure();
    r.U = state.U.measure();
    r.X = state.X.measure();
    r.X1 = state.X1.measure();
    r.X2 = state.X2.measure();
    r.X3 = state.X3.measure();
    r.q_delta = as_rational(state.q) * state.Delta;
    r.gamma = r.q_delta;
    bool disjoint = state.W.disjoint_from(state.Z) && state.W.disjoint_from(state.U) &&
                    state.Z.disjoint_from(state.U) && state.X.disjoint_from(state.controlled());
    IntervalUnion all = state.controlled().unite(state.X);
    r.partition_exact = disjoint && all == IntervalUnion(Rational(0), Rational(1));
    return r;
}

IntervalUnion beta_region(const ConstructionState& state) {
    return sweep(state.T, IntervalUnion(state.J.hi / 2, state.J.hi), 0, state.q);
}

Rational pick_beta(const ConstructionState& state, std::int64_t m, const Rational& offset) {
    if (m < 0 || m >= state.q) fail(ErrorKind::OutOfRange, "level " + std::to_string(m));
    if (offset < Rational(1, 2) || offset >= 1) fail(ErrorKind::OutOfRange, "offset " + to_string(offset));
    Rational beta = state.T.apply(offset * state.J.hi, m);
    IntervalUnion window(state.J.hi / 2, state.J.hi);
    for (std::int64_t i = 0; i < m; ++i) window = state.T.image(window);
    if (!window.contains(beta)) fail(ErrorKind::InvariantViolated, "beta left its admissible window");
    return beta;
}

std::string interval_union_to_json(const IntervalUnion& u) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& iv : u.intervals()) j.push_back({to_string(iv.lo), to_string(iv.hi)});
    return j.dump();
}

std::string construction_to_json(const ConstructionState& st) {
    nlohmann::ordered_json j;
    const auto& p = st.params;
    MeasureReport m = measure_report(st);
    j["n"] = p.n;
    j["K"] = p.K;
    j["L"] = p.L;
    j["epsilon"] = to_string(p.epsilon);
    j["delta"] = to_string(p.delta);
    j["delta_prime"] = to_string(p.delta_prime);
    j["rho"] = to_string(st.rho);
    j["pi0"] = p.pi0.to_string();
    j["pi_hat"] = p.pi_hat.to_string();
    j["B"] = nlohmann::json::parse(matrix_to_json(p.B));
    j["T"] = nlohmann::json::parse(iet_to_json(st.T));
    std::vector<std::string> lrn;
    for (const auto& x : st.lambda_rn) lrn.push_back(to_string(x));
    j["lambda_rn"] = lrn;
    j["heights"] = st.s;
    j["q_n"] = st.q;
    j["Delta_n"] = to_string(st.Delta);
    j["Sigma_n"] = to_string(st.Sigma);
    j["J_n"] = {to_string(st.J.lo), to_string(st.J.hi)};
    j["leb_W"] = to_string(m.W);
    j["leb_Z"] = to_string(m.Z);
    j["leb_U"] = to_string(m.U);
    j["leb_X"] = to_string(m.X);
    j["gamma_n"] = to_string(m.gamma);
    j["partition_exact"] = m.partition_exact;
    j["glue_ok"] = st.glue_ok;
    return j.dump();
}

}  // namespace ergoscope
