#include "ergoscope/cf_rotation.hpp"

#include "ergoscope/error.hpp"

#include <mpfr.h>

#include <cmath>
#include <sstream>

namespace ergoscope {

ContinuedFraction::ContinuedFraction(std::vector<Integer> quotients)
    : quotients_(std::move(quotients)) {
    for (const auto& a : quotients_)
        if (a < 1) fail(ErrorKind::InvalidParams, "partial quotients must be positive");
    // p_{-1} = 1, q_{-1} = 0, p_0 = 0, q_0 = 1.
    p_.reserve(quotients_.size() + 1);
    q_.reserve(quotients_.size() + 1);
    Integer p_prev = 1, q_prev = 0;
    p_.push_back(0);
    q_.push_back(1);
    for (const auto& a : quotients_) {
        Integer p_next = a * p_.back() + p_prev;
        Integer q_next = a * q_.back() + q_prev;
        p_prev = p_.back();
        q_prev = q_.back();
        p_.push_back(p_next);
        q_.push_back(q_next);
    }
}

const Integer& ContinuedFraction::a(std::size_t n) const {
    if (n == 0 || n > quotients_.size())
        fail(ErrorKind::DepthExceeded, "partial quotient index " + std::to_string(n));
    return quotients_[n - 1];
}

const Integer& ContinuedFraction::p(std::size_t n) const {
    if (n >= p_.size()) fail(ErrorKind::DepthExceeded, "convergent index " + std::to_string(n));
    return p_[n];
}

const Integer& ContinuedFraction::q(std::size_t n) const {
    if (n >= q_.size()) fail(ErrorKind::DepthExceeded, "convergent index " + std::to_string(n));
    return q_[n];
}

std::pair<Integer, Integer> convergents(const ContinuedFraction& cf, std::size_t n) {
    return {cf.p(n), cf.q(n)};
}

namespace {

// Expands every real in [lo, hi] simultaneously; stops when the quotients disagree.
std::vector<Integer> expand_interval(Rational lo, Rational hi, std::size_t depth, bool strict) {
    std::vector<Integer> out;
    while (out.size() < depth) {
        if (lo <= 0) {
            if (strict)
                fail(ErrorKind::PrecisionExhausted,
                     "fractional part reached the precision floor after " +
                         std::to_string(out.size()) + " quotients");
            break;
        }
        Rational inv_hi = 1 / hi;
        Rational inv_lo = 1 / lo;
        Integer a = floor_of(inv_hi);
        Integer a_lo = floor_of(inv_lo);
        bool lo_exact = (Rational(a_lo) == inv_lo);
        if (a != a_lo || (lo_exact && lo != hi)) {
            if (strict)
                fail(ErrorKind::PrecisionExhausted,
                     "quotient " + std::to_string(out.size() + 1) + " not determined at this precision");
            break;
        }
        out.push_back(a);
        Rational next_lo = inv_hi - Rational(a);
        Rational next_hi = inv_lo - Rational(a);
        lo = next_lo;
        hi = next_hi;
    }
    return out;
}

}  // namespace

ContinuedFraction cf_expand(const Real& alpha, std::size_t depth, unsigned precision_bits) {
    if (depth < 1) fail(ErrorKind::InvalidParams, "depth must be at least 1");
    if (precision_bits < 8) fail(ErrorKind::InvalidParams, "precision too small");
    mpfr_t x;
    mpfr_init2(x, precision_bits);
    mpfr_set(x, alpha.backend().data(), MPFR_RNDN);
    if (mpfr_sgn(x) <= 0 || mpfr_cmp_ui(x, 1) >= 0) {
        mpfr_clear(x);
        fail(ErrorKind::OutOfRange, "alpha must lie in (0,1)");
    }
    Integer mant;
    mpfr_exp_t e2 = mpfr_get_z_2exp(mant.get_mpz_t(), x);
    mpfr_exp_t ex = mpfr_get_exp(x);
    mpfr_clear(x);
    Rational center(mant);
    Rational pow2 = 1;
    if (e2 < 0) {
        Integer den = 1;
        mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), static_cast<mp_bitcnt_t>(-e2));
        center = make_rational(mant, den);
    } else {
        Integer m2 = mant;
        mpz_mul_2exp(m2.get_mpz_t(), m2.get_mpz_t(), static_cast<mp_bitcnt_t>(e2));
        center = Rational(m2);
    }
    // One unit in the last place: alpha is only known to within 2^(ex - precision).
    long shift = static_cast<long>(precision_bits) - static_cast<long>(ex);
    Integer den = 1;
    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), static_cast<mp_bitcnt_t>(shift));
    pow2 = make_rational(Integer(1), den);
    Rational lo = center - pow2;
    Rational hi = center + pow2;
    if (lo <= 0) fail(ErrorKind::PrecisionExhausted, "alpha indistinguishable from 0");
    return ContinuedFraction(expand_interval(lo, hi, depth, true));
}

ContinuedFraction cf_expand_rational(const Rational& alpha, std::size_t depth) {
    if (alpha <= 0 || alpha >= 1) fail(ErrorKind::OutOfRange, "alpha must lie in (0,1)");
    std::vector<Integer> out;
    Rational x = alpha;
    while (out.size() < depth && x != 0) {
        Rational inv = 1 / x;
        Integer a = floor_of(inv);
        out.push_back(a);
        x = inv - Rational(a);
    }
    return ContinuedFraction(std::move(out));
}

RationalApprox alpha_from_quotients(const std::vector<Integer>& quotients) {
    if (quotients.empty()) fail(ErrorKind::EmptyInput, "no quotients");
    ContinuedFraction cf(quotients);
    std::size_t N = cf.depth();
    Rational value = make_rational(cf.p(N), cf.q(N));
    Rational bound = make_rational(Integer(1), cf.q(N) * cf.q(N));
    return {value, bound};
}

double circle_norm(double x) {
    double f = x - std::floor(x);
    return std::min(f, 1.0 - f);
}

Rational circle_norm(const Rational& x) {
    Rational f = frac_of(x);
    Rational g = 1 - f;
    return f < g ? f : g;
}

std::vector<Integer> ostrowski_decompose(const Integer& ell, const ContinuedFraction& cf) {
    std::size_t N = cf.depth();
    if (N == 0) fail(ErrorKind::EmptyInput, "empty continued fraction");
    if (ell < 0 || ell >= cf.q(N))
        fail(ErrorKind::OutOfRange, "ell must lie in [0, q_N) for the supplied depth");
    std::vector<Integer> digits(N, Integer(0));
    Integer rest = ell;
    for (std::size_t i = N; i-- > 0;) {
        Integer b = rest / cf.q(i);
        digits[i] = b;
        rest -= b * cf.q(i);
    }
    return digits;
}

OrbitMinima orbit_min_distance(const Rational& x, const ContinuedFraction& cf, std::size_t n) {
    std::size_t N = cf.depth();
    if (N == 0) fail(ErrorKind::EmptyInput, "empty continued fraction");
    const Integer& qn = cf.q(n);
    if (qn > 100000000) fail(ErrorKind::OutOfRange, "q_n too large for an exhaustive scan");
    const Integer& P = cf.p(N);
    const Integer& Q = cf.q(N);
    Rational xf = frac_of(x);
    // x + j*P/Q = (u*Q + j*P*v) / (v*Q) with x = u/v.
    Integer u = xf.get_num(), v = xf.get_den();
    Integer M = v * Q;
    Integer cur = (u * Q) % M;
    Integer step = (P * v) % M;
    Integer best_lo = M, best_hi = -1;
    std::uint64_t arg_lo = 0, arg_hi = 0;
    std::uint64_t count = qn.get_ui();
    for (std::uint64_t j = 0; j < count; ++j) {
        if (cur == 0) fail(ErrorKind::SingularOrbit, "orbit point j=" + std::to_string(j) + " hits 0");
        if (cur < best_lo) {
            best_lo = cur;
            arg_lo = j;
        }
        if (cur > best_hi) {
            best_hi = cur;
            arg_hi = j;
        }
        cur += step;
        if (cur >= M) cur -= M;
    }
    OrbitMinima out;
    out.minus = make_rational(best_lo, M);
    out.plus = make_rational(M - best_hi, M);
    out.argmin_index = arg_lo;
    out.argmin_plus_index = arg_hi;
    return out;
}

namespace {

bool le_exp(const Integer& a, double exponent) {
    if (exponent > 700.0) return true;
    long double bound = std::exp(static_cast<long double>(exponent));
    // Quotients in this code base are far below 2^63.
    if (!mpz_fits_slong_p(a.get_mpz_t())) return false;
    return static_cast<long double>(a.get_si()) <= bound;
}

}  // namespace

DiophantineWitness find_diophantine_indices(const ContinuedFraction& cf, int K, int L, double c) {
    DiophantineWitness w;
    w.c = c;
    w.K = K;
    w.L = L;
    const long S = static_cast<long>(K) * K + static_cast<long>(L) * L;
    const Integer lo = 100 * S, hi = 200 * S;
    std::size_t N = cf.depth();
    for (std::size_t nk = 1; nk + 1 <= N; ++nk) {
        const Integer& spike = cf.a(nk + 1);
        if (!(spike > lo && spike < hi)) continue;
        bool ok = true;
        for (std::size_t n = 1; n <= nk && ok; ++n)
            ok = le_exp(cf.a(nk + 1 - n), c * static_cast<double>(n));
        if (ok) w.indices.push_back(nk);
    }
    return w;
}

std::size_t ckl_min_gap(int K, int L, double c) {
    const double S = static_cast<double>(K) * K + static_cast<double>(L) * L;
    double need = std::log(150.0 * S) / c;
    auto g = static_cast<std::size_t>(std::ceil(need - 1e-12));
    return std::max<std::size_t>(g, 1);
}

ContinuedFraction make_ckl(int K, int L, std::size_t count, double c, long filler_bound,
                           CklLayout layout) {
    if (K < 1 || L < 1) fail(ErrorKind::InvalidParams, "K and L must be positive");
    if (!(c > 0)) fail(ErrorKind::InvalidParams, "c must be positive");
    const long S = static_cast<long>(K) * K + static_cast<long>(L) * L;
    if (!(100 * S + 1 < 200 * S)) fail(ErrorKind::InvalidParams, "empty spike window");
    if (filler_bound < 1) fail(ErrorKind::InvalidParams, "filler_bound must be at least 1");
    if (static_cast<double>(filler_bound) > std::exp(c))
        fail(ErrorKind::InvalidParams, "filler_bound exceeds e^c");
    if (filler_bound > 100 * S) fail(ErrorKind::InvalidParams, "filler_bound reaches the spike window");
    std::size_t gmin = ckl_min_gap(K, L, c);
    std::size_t gap = layout.gap == 0 ? gmin : layout.gap;
    if (gap < gmin) fail(ErrorKind::InvalidParams, "gap too small for e^{c*gap} >= spike");
    std::size_t lead = layout.lead == 0 ? gap : layout.lead;
    std::size_t tail = layout.tail == 0 ? gap : layout.tail;
    const Integer filler(filler_bound);
    const Integer spike(150 * S);
    std::vector<Integer> qs;
    if (count == 0) {
        qs.assign(lead + tail, filler);
        return ContinuedFraction(std::move(qs));
    }
    qs.assign(lead, filler);
    for (std::size_t k = 0; k < count; ++k) {
        if (k > 0)
            for (std::size_t i = 0; i + 1 < gap; ++i) qs.push_back(filler);
        qs.push_back(spike);
    }
    for (std::size_t i = 0; i < tail; ++i) qs.push_back(filler);
    return ContinuedFraction(std::move(qs));
}

std::string quotients_to_json(const ContinuedFraction& cf) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < cf.depth(); ++i) os << (i ? "," : "") << cf.quotients()[i].get_str();
    os << ']';
    return os.str();
}

std::string witness_to_json(const DiophantineWitness& w) {
    std::ostringstream os;
    os.precision(17);
    os << "{\"indices\":[";
    for (std::size_t i = 0; i < w.indices.size(); ++i) os << (i ? "," : "") << w.indices[i];
    os << "],\"c\":" << w.c << ",\"K\":" << w.K << ",\"L\":" << w.L << '}';
    return os.str();
}

}  // namespace ergoscope
