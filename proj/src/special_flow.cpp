#include "ergoscope/special_flow.hpp"

#include "ergoscope/error.hpp"

namespace ergoscope {

namespace {

Rational abs_q(const Rational& x) { return x < 0 ? Rational(-x) : x; }

void check_letters(const IET& t, const std::vector<Rational>& c) {
    if (static_cast<int>(c.size()) != t.d()) fail(ErrorKind::InvalidParams, "one offset per letter expected");
}

struct Piece {
    Rational src;
    Rational len;
    Rational cur;
    Rational acc;  // S_k(f)(src)
};

}  // namespace

Rational RoofPC::value(const IET& t, const Rational& x) const {
    int a = t.letter_at(x);
    Rational v = c[a];
    if (a == beta_letter && x >= beta) v += D_beta;
    return v;
}

Rational RoofPL::value(const IET& t, const Rational& x) const {
    return kappa * x + c[t.letter_at(x)];
}

RoofPC make_roof_pc(const IET& t, std::vector<Rational> c, const Rational& beta, const Rational& D_beta) {
    check_letters(t, c);
    if (D_beta == 0) fail(ErrorKind::InvalidParams, "D_beta must be non-zero");
    RoofPC r;
    r.beta_letter = t.letter_at(beta);
    r.c = std::move(c);
    r.beta = beta;
    r.D_beta = D_beta;
    for (int a = 0; a < t.d(); ++a)
        if (r.c[a] <= 0) fail(ErrorKind::InvalidParams, "roof offset over " + letter_name(a) + " not positive");
    if (r.c[r.beta_letter] + D_beta <= 0) fail(ErrorKind::InvalidParams, "roof not positive right of beta");
    return r;
}

RoofPL make_roof_pl(const IET& t, const Rational& kappa, std::vector<Rational> c) {
    check_letters(t, c);
    if (kappa == 0) fail(ErrorKind::InvalidParams, "kappa must be non-zero");
    RoofPL r{kappa, std::move(c)};
    for (int a = 0; a < t.d(); ++a) {
        Interval iv = t.interval(a);
        // Infimum over [lo, hi) of an affine map is attained at an endpoint.
        if (kappa * iv.lo + r.c[a] <= 0 || kappa * iv.hi + r.c[a] <= 0)
            fail(ErrorKind::InvalidParams, "roof not positive over " + letter_name(a));
    }
    return r;
}

RoofPC default_roof_pc(const IET& t, const Rational& beta, const Rational& D_beta) {
    std::vector<Rational> c;
    for (int a = 0; a < t.d(); ++a) c.push_back(1 + abs_q(D_beta) + make_rational(a, 4));
    return make_roof_pc(t, std::move(c), beta, D_beta);
}

RoofPL default_roof_pl(const IET& t, const Rational& kappa) {
    std::vector<Rational> c;
    for (int a = 0; a < t.d(); ++a) c.push_back(1 + abs_q(kappa) + make_rational(a, 4));
    return make_roof_pl(t, kappa, std::move(c));
}

Rational roof_value(const IET& t, const Roof& roof, const Rational& x) {
    return std::visit([&](const auto& r) { return r.value(t, x); }, roof);
}

Rational cocycle_sum(const IET& t, const Roof& roof, std::int64_t n_terms, const Rational& x) {
    if (n_terms < 0) fail(ErrorKind::OutOfRange, "negative number of terms");
    if (x < 0 || x >= t.domain_length()) fail(ErrorKind::OutOfDomain, "x = " + to_string(x));
    Rational sum = 0, y = x;
    for (std::int64_t k = 0; k < n_terms; ++k) {
        sum += roof_value(t, roof, y);
        y = t.apply(y);
    }
    return sum;
}

PushforwardResult pushforward_exact(const ConstructionState& state, const Roof& roof, int i) {
    if (i < 1 || i > state.params.K) fail(ErrorKind::OutOfRange, "i = " + std::to_string(i));
    const IET& T = state.T;
    const RoofPC* pc = std::get_if<RoofPC>(&roof);
    const RoofPL* pl = std::get_if<RoofPL>(&roof);
    if (pc && !beta_region(state).contains(pc->beta))
        fail(ErrorKind::BetaInForbiddenRegion, "beta = " + to_string(pc->beta));

    PushforwardResult res;
    res.i = i;
    res.a_n = cocycle_sum(T, roof, state.q, Rational(0));
    const IntervalUnion controlled = state.controlled();
    res.controlled_mass = controlled.measure();

    std::vector<Piece> pieces;
    for (const auto& iv : controlled.intervals()) pieces.push_back({iv.lo, iv.hi - iv.lo, iv.lo, Rational(0)});
    const std::int64_t steps = static_cast<std::int64_t>(i) * state.q;
    for (std::int64_t k = 0; k < steps; ++k) {
        std::vector<Piece> next;
        next.reserve(pieces.size() + 8);
        for (const auto& p : pieces) {
            Rational src = p.src, cur = p.cur, len = p.len;
            while (len > 0) {
                int a = T.letter_at(cur);
                Rational cut = T.top_start(a) + T.lengths()[a];
                if (pc && a == pc->beta_letter && cur < pc->beta && pc->beta < cut) cut = pc->beta;
                Rational part = cut - cur;
                if (part > len) part = len;
                next.push_back({src, part, cur + T.bottom_start(a) - T.top_start(a),
                                p.acc + roof_value(T, roof, cur) + (pl ? k * pl->kappa * (src - p.src) : Rational(0))});
                src += part;
                cur += part;
                len -= part;
            }
        }
        pieces = std::move(next);
    }
    res.pieces = pieces.size();

    const Rational shift = i * res.a_n;
    if (pc) {
        std::vector<Atom> atoms;
        atoms.reserve(pieces.size());
        for (const auto& p : pieces) atoms.push_back({p.acc - shift, p.len});
        res.measure = make_atomic(std::move(atoms));
    } else {
        // On each piece S(x) = acc + i q kappa (x - src).
        const Rational slope = steps * pl->kappa;
        const Rational density = 1 / abs_q(slope);
        std::vector<Box> boxes;
        boxes.reserve(pieces.size());
        for (const auto& p : pieces) {
            Rational a = p.acc - shift, b = a + slope * p.len;
            if (b < a) std::swap(a, b);
            boxes.push_back({a, b, density});
        }
        res.measure = pc_from_boxes(boxes);
    }
    return res;
}

ProbMeasure predicted_atomic(int i, const Rational& gamma, const Rational& alpha_mass,
                             const Rational& beta_mass, const Rational& D_beta) {
    if (i < 1) fail(ErrorKind::OutOfRange, "i = " + std::to_string(i));
    if (alpha_mass + beta_mass + 2 * gamma * (i - 1) != 1)
        fail(ErrorKind::MassMismatch, "alpha + beta + 2 gamma (i - 1) = " +
                                          to_string(alpha_mass + beta_mass + 2 * gamma * (i - 1)));
    if (alpha_mass < gamma || beta_mass < gamma)
        fail(ErrorKind::MassMismatch, "end masses must be at least gamma");
    std::vector<Atom> atoms;
    atoms.push_back({Rational(0), alpha_mass});
    for (int j = 1; j < i; ++j) atoms.push_back({j * D_beta, 2 * gamma});
    atoms.push_back({i * D_beta, beta_mass});
    return make_atomic(std::move(atoms));
}

ProbMeasure predicted_density(int i, const Rational& kappa, const Rational& gamma, bool rescaled) {
    if (i < 1) fail(ErrorKind::OutOfRange, "i = " + std::to_string(i));
    if (kappa == 0) fail(ErrorKind::InvalidParams, "kappa must be non-zero");
    if (!(gamma > 0 && gamma < make_rational(1, i + 1)))
        fail(ErrorKind::DegenerateSupport, "gamma = " + to_string(gamma) + " outside (0, 1/(i+1))");
    const Rational k = abs_q(kappa);
    const Rational top = 1 / k;
    const Rational c = make_rational(i - 1, 2) * k * gamma;
    std::vector<LinearPiece> pieces;
    pieces.push_back({c - k * gamma, c, Rational(0), top});
    pieces.push_back({c, c + k * (1 - i * gamma), top, top});
    pieces.push_back({c + k * (1 - i * gamma), c + k * (1 - (i - 1) * gamma), top, Rational(0)});
    for (int p = 1; p < i; ++p) {
        Rational centre = c + make_rational(p, i) * k - p * k * gamma;
        pieces.push_back({centre - k * gamma, centre, Rational(0), top});
        pieces.push_back({centre, centre + k * gamma, top, Rational(0)});
    }
    if (!rescaled) {
        // G_i(x) = G~_i(x / i) / i.
        for (auto& pc : pieces) {
            pc.lo *= i;
            pc.hi *= i;
            pc.v_lo /= i;
            pc.v_hi /= i;
        }
    }
    ProbMeasure g = pl_from_pieces(pieces);
    if (kappa < 0) g = rescale(g, Rational(-1));
    return g;
}

}  // namespace ergoscope
