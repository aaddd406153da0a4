#include "ergoscope/birkhoff_log.hpp"

#include "ergoscope/error.hpp"
#include "ergoscope/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace ergoscope {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
// Absolute error of a phase frac(x + j alpha) computed from exact residues.
constexpr double kPhaseError = 4.0 * kEps;

double factorial(int r) {
    double f = 1;
    for (int i = 2; i <= r; ++i) f *= i;
    return f;
}

double wrap(double y) {
    y -= std::floor(y);
    if (y >= 1.0) y = 0.0;
    return y;
}

// Neumaier compensated accumulator.
struct Compensated {
    double sum = 0.0, comp = 0.0, abs_sum = 0.0;
    void add(double v) {
        double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
        abs_sum += std::abs(v);
    }
    double value() const { return sum + comp; }
    double error() const { return 2.0 * kEps * abs_sum; }
};

double ratio(const Integer& num, const Integer& den) {
    long en = 0, ed = 0;
    double mn = mpz_get_d_2exp(&en, num.get_mpz_t());
    double md = mpz_get_d_2exp(&ed, den.get_mpz_t());
    double v = std::ldexp(mn / md, static_cast<int>(en - ed));
    if (v >= 1.0) v = std::nextafter(1.0, 0.0);
    return v;
}

// Harmonic sums sum_{j<q} cos(2 pi k phi_j), sin(...) for k = 1..deg.
struct HarmonicSums {
    std::vector<double> c, s;
};

HarmonicSums harmonic_sums(const std::vector<double>& phases, std::size_t deg) {
    HarmonicSums h;
    for (std::size_t k = 1; k <= deg; ++k) {
        Compensated cs, sn;
        for (double p : phases) {
            double th = kTwoPi * static_cast<double>(k) * p;
            cs.add(std::cos(th));
            sn.add(std::sin(th));
        }
        h.c.push_back(cs.value());
        h.s.push_back(sn.value());
    }
    return h;
}

std::size_t degree(const TrigPolynomial& g) {
    return std::max(g.cos_coeffs.size(), g.sin_coeffs.size());
}

double coeff(const std::vector<double>& v, std::size_t k) { return k <= v.size() ? v[k - 1] : 0.0; }

// S_q(g)(y) - q * mean(g), from the harmonic sums of the first q phases.
double g_block_deviation(const TrigPolynomial& g, const HarmonicSums& h, double y) {
    double out = 0.0;
    for (std::size_t k = 1; k <= h.c.size(); ++k) {
        double th = kTwoPi * static_cast<double>(k) * y;
        double cy = std::cos(th), sy = std::sin(th);
        double a = coeff(g.cos_coeffs, k), b = coeff(g.sin_coeffs, k);
        out += a * (cy * h.c[k - 1] - sy * h.s[k - 1]) + b * (sy * h.c[k - 1] + cy * h.s[k - 1]);
    }
    return out;
}

struct LogBlock {
    double log_sum = 0.0;  // sum of log(t (1 - t))
    double min_v = 1.0;
    double inv_sum = 0.0;  // sum of 1/t + 1/(1-t), when requested
};

// Orbit points x + phases[j], j < count. The product is flushed to a log before underflow.
template <bool WithInverse>
LogBlock log_block(double x, const double* phases, std::size_t count) {
    LogBlock out;
    double prod = 1.0;
    double min_v = 1.0;
    double inv = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
        double t = x + phases[j];
        if (t >= 1.0) t -= 1.0;
        double u = 1.0 - t;
        double v = t * u;
        min_v = std::min(min_v, v);
        if constexpr (WithInverse) inv += 1.0 / t + 1.0 / u;
        prod *= v;
        if (prod < 1e-250) {
            out.log_sum += std::log(prod);
            prod = 1.0;
        }
    }
    out.log_sum += std::log(prod);
    out.min_v = min_v;
    out.inv_sum = inv;
    return out;
}

}  // namespace

double TrigPolynomial::value(double x) const { return derivative(x, 0); }

double TrigPolynomial::derivative(double x, int r) const {
    double out = r == 0 ? constant : 0.0;
    const double shift = r * std::numbers::pi / 2.0;
    for (std::size_t k = 1; k <= degree(*this); ++k) {
        double w = kTwoPi * static_cast<double>(k);
        double th = w * x + shift;
        out += std::pow(w, r) * (coeff(cos_coeffs, k) * std::cos(th) + coeff(sin_coeffs, k) * std::sin(th));
    }
    return out;
}

double TrigPolynomial::variation_bound(int r) const {
    double v = 0.0;
    for (std::size_t k = 1; k <= degree(*this); ++k) {
        double amp = std::hypot(coeff(cos_coeffs, k), coeff(sin_coeffs, k));
        v += 4.0 * static_cast<double>(k) * std::pow(kTwoPi * static_cast<double>(k), r) * amp;
    }
    return v;
}

double TrigPolynomial::lower_bound() const {
    double v = constant;
    for (std::size_t k = 1; k <= degree(*this); ++k)
        v -= std::hypot(coeff(cos_coeffs, k), coeff(sin_coeffs, k));
    return v;
}

LogRoof::LogRoof(double c_f, TrigPolynomial g) : c_f_(c_f), g_(std::move(g)) {
    if (!(c_f_ >= 0.0) || !std::isfinite(c_f_))
        fail(ErrorKind::InvalidParams, "C_f must be a non-negative finite number");
    if (!(g_.lower_bound() > 0.0))
        fail(ErrorKind::InvalidParams, "g must be positive: constant term must exceed the harmonic amplitudes");
}

double LogRoof::derivative(double x, int r) const {
    if (r < 0 || r > 3) fail(ErrorKind::OrderUnsupported, "derivative order " + std::to_string(r));
    double h;
    if (r == 0) {
        h = -std::log(x) - std::log1p(-x);
    } else {
        double sign = (r % 2 == 0) ? 1.0 : -1.0;
        h = factorial(r - 1) * (sign * std::pow(x, -r) + std::pow(1.0 - x, -r));
    }
    return c_f_ * h + g_.derivative(x, r);
}

RotationPhases::RotationPhases(const ContinuedFraction& cf)
    : p_(cf.p(cf.depth())), q_(cf.q(cf.depth())) {}

double RotationPhases::phase(std::int64_t j) const {
    Integer r = p_ * Integer(static_cast<long>(j));
    mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), q_.get_mpz_t());
    return ratio(r, q_);
}

std::vector<double> RotationPhases::table(std::int64_t lo, std::int64_t hi) const {
    std::vector<double> out;
    if (hi <= lo) return out;
    out.reserve(static_cast<std::size_t>(hi - lo));
    Integer r = p_ * Integer(static_cast<long>(lo));
    mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), q_.get_mpz_t());
    for (std::int64_t j = lo; j < hi; ++j) {
        out.push_back(ratio(r, q_));
        r += p_;
        if (r >= q_) r -= q_;
    }
    return out;
}

SumResult birkhoff_sum(const LogRoof& roof, const ContinuedFraction& cf, int r,
                       std::uint64_t n_terms, double x, double guard) {
    if (r < 0 || r > 3) fail(ErrorKind::OrderUnsupported, "derivative order " + std::to_string(r));
    const Integer p = cf.p(cf.depth()), q = cf.q(cf.depth());
    Integer res = 0;
    x = wrap(x);
    Compensated acc;
    double eval_err = 0.0;
    const double c_f = roof.c_f();
    for (std::uint64_t i = 0; i < n_terms; ++i) {
        double y = wrap(x + ratio(res, q));
        if (y < guard || 1.0 - y < guard)
            fail(ErrorKind::SingularityHit, "orbit point " + std::to_string(i) + " inside the guard band");
        double term = roof.derivative(y, r);
        acc.add(term);
        // Sensitivity to the phase error plus evaluation rounding.
        double next = c_f * factorial(r) * (std::pow(y, -(r + 1)) + std::pow(1.0 - y, -(r + 1))) +
                      roof.g().variation_bound(r + 1);
        eval_err += next * kPhaseError + 8.0 * kEps * std::abs(term);
        res += p;
        if (res >= q) res -= q;
    }
    return {acc.value(), acc.error() + eval_err};
}

CenterStats center_stats(const LogRoof& roof, const ContinuedFraction& cf,
                         const DiophantineWitness& witness, std::size_t k) {
    if (k >= witness.indices.size())
        fail(ErrorKind::OutOfRange, "witness index " + std::to_string(k));
    CenterStats s;
    s.k = k;
    s.n_k = witness.indices[k];
    s.q = cf.q(s.n_k);
    s.x_k = make_rational(Integer(1), Integer(2) * s.q);
    auto sum = birkhoff_sum(roof, cf, 0, static_cast<std::uint64_t>(to_int64(s.q)), to_double(s.x_k));
    s.c_k = sum.value;
    s.error_bound = sum.error_bound;
    return s;
}

std::vector<double> midpoint_grid(std::size_t grid_size) {
    std::vector<double> g(grid_size);
    for (std::size_t m = 0; m < grid_size; ++m)
        g[m] = (static_cast<double>(m) + 0.5) / static_cast<double>(grid_size);
    return g;
}

BlockScan scan_blocks(const LogRoof& roof, const ContinuedFraction& cf, std::size_t n_k,
                      int i_min, int i_max, std::size_t grid_size, unsigned threads) {
    if (i_min > i_max) fail(ErrorKind::InvalidParams, "empty block range");
    BlockScan scan;
    scan.n_k = n_k;
    scan.q = to_int64(cf.q(n_k));
    scan.i_min = i_min;
    scan.i_max = i_max;
    scan.grid = midpoint_grid(grid_size);
    const std::int64_t q = scan.q;
    const int width = scan.width();
    scan.blocks.assign(grid_size * width, 0.0);

    RotationPhases rot(cf);
    const std::int64_t j0 = static_cast<std::int64_t>(i_min) * q;
    const std::vector<double> phases = rot.table(j0, (static_cast<std::int64_t>(i_max) + 1) * q);
    const HarmonicSums hs = harmonic_sums(rot.table(0, q), degree(roof.g()));
    const double c_f = roof.c_f();
    const double g_total = static_cast<double>(q) * roof.g().mean();
    std::vector<double> block_shift(width);
    for (int i = 0; i < width; ++i) block_shift[i] = phases[static_cast<std::size_t>(i) * q];

    std::vector<unsigned char> shifted(grid_size, 0);
    parallel_chunks(grid_size, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t m = lo; m < hi; ++m) {
            double x = scan.grid[m];
            for (int attempt = 0;; ++attempt) {
                bool singular = false;
                for (int i = 0; i < width && !singular; ++i) {
                    LogBlock lb = log_block<false>(x, phases.data() + static_cast<std::size_t>(i) * q,
                                                   static_cast<std::size_t>(q));
                    if (lb.min_v < kGuardBand) singular = true;
                    double y = wrap(x + block_shift[i]);
                    scan.blocks[m * width + i] = -c_f * lb.log_sum + g_total + g_block_deviation(roof.g(), hs, y);
                }
                if (!singular) break;
                if (attempt == 4)
                    fail(ErrorKind::SingularityHit, "grid point stays inside the guard band after shifting");
                x = wrap(x + 1.0 / (3.0 * static_cast<double>(grid_size)) / (attempt + 1));
                shifted[m] = 1;
            }
            scan.grid[m] = x;
        }
    });
    for (auto s : shifted) scan.shifted_points += s;
    return scan;
}

TailTable tail_from_scan(const BlockScan& scan, double c_k, int w, const std::vector<double>& b_grid) {
    if (w < 1 || scan.i_min > 0 || scan.i_max < w - 1)
        fail(ErrorKind::InvalidParams, "scan does not cover blocks 0..w-1");
    const std::size_t n = scan.grid.size();
    std::vector<double> dev(n);
    for (std::size_t m = 0; m < n; ++m) {
        double s = 0.0;
        for (int i = 0; i < w; ++i) s += scan.block(m, i) - c_k;
        dev[m] = std::abs(s);
    }
    std::sort(dev.begin(), dev.end());
    TailTable t;
    t.w = w;
    t.n_k = scan.n_k;
    t.grid_size = n;
    for (double b : b_grid) {
        auto it = std::lower_bound(dev.begin(), dev.end(), w * b);
        std::size_t c = static_cast<std::size_t>(dev.end() - it);
        t.b.push_back(b);
        t.count.push_back(c);
        t.mass.push_back(n == 0 ? 0.0 : static_cast<double>(c) / static_cast<double>(n));
    }
    return t;
}

TailTable tail_mass(const LogRoof& roof, const ContinuedFraction& cf,
                    const DiophantineWitness& witness, std::size_t k, int w,
                    const std::vector<double>& b_grid, std::size_t grid_size, unsigned threads) {
    CenterStats cs = center_stats(roof, cf, witness, k);
    if (Integer(static_cast<long>(grid_size)) < 10 * cs.q)
        fail(ErrorKind::GridTooCoarse, "grid of " + std::to_string(grid_size) +
                                           " points for q = " + cs.q.get_str());
    BlockScan scan = scan_blocks(roof, cf, cs.n_k, 0, w - 1, grid_size, threads);
    return tail_from_scan(scan, cs.c_k, w, b_grid);
}

std::string tail_table_csv(const TailTable& t) {
    std::string out = "b,mass,w,n_k,grid_size\n";
    char buf[160];
    for (std::size_t i = 0; i < t.b.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%zu,%zu\n", t.b[i], t.mass[i], t.w, t.n_k,
                      t.grid_size);
        out += buf;
    }
    return out;
}

TailFit fit_tail_slope(const TailTable& t, double b_lo, double b_hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < t.b.size(); ++i) {
        if (t.b[i] < b_lo || t.b[i] > b_hi || t.mass[i] <= 0) continue;
        double x = t.b[i], y = std::log(t.mass[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    TailFit f;
    f.points = n;
    if (n < 2) return f;
    double denom = n * sxx - sx * sx;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

double fit_tail_constant(const TailTable& t, double b_lo, double b_hi) {
    double d = 1.0;
    for (std::size_t i = 0; i < t.b.size(); ++i) {
        if (t.b[i] < b_lo || t.b[i] > b_hi || t.mass[i] <= 0) continue;
        double r = t.mass[i] * std::exp(t.b[i]);
        d = std::max({d, r, 1.0 / r});
    }
    return d;
}

bool IntervalCover::contains(double x) const {
    auto it = std::upper_bound(intervals.begin(), intervals.end(), x,
                               [](double v, const std::pair<double, double>& iv) { return v < iv.first; });
    if (it == intervals.begin()) return false;
    --it;
    return x <= it->second;
}

IntervalCover ak_interval_cover(const ContinuedFraction& cf, const DiophantineWitness& witness,
                                std::size_t k, double b, double D) {
    if (k >= witness.indices.size())
        fail(ErrorKind::OutOfRange, "witness index " + std::to_string(k));
    const std::int64_t q = to_int64(cf.q(witness.indices[k]));
    const double r = D * std::exp(-b) / (2.0 * static_cast<double>(q));
    IntervalCover cover;
    if (2.0 * r >= 1.0) {
        cover.intervals.emplace_back(0.0, 1.0);
        cover.length = 1.0;
        return cover;
    }
    RotationPhases rot(cf);
    std::vector<std::pair<double, double>> raw;
    const auto centers = rot.table(-(q - 1), 1);
    for (double c : centers) {
        double lo = c - r, hi = c + r;
        if (lo < 0) {
            raw.emplace_back(lo + 1.0, 1.0);
            raw.emplace_back(0.0, hi);
        } else if (hi > 1.0) {
            raw.emplace_back(lo, 1.0);
            raw.emplace_back(0.0, hi - 1.0);
        } else {
            raw.emplace_back(lo, hi);
        }
    }
    std::sort(raw.begin(), raw.end());
    for (const auto& iv : raw) {
        if (!cover.intervals.empty() && iv.first <= cover.intervals.back().second)
            cover.intervals.back().second = std::max(cover.intervals.back().second, iv.second);
        else
            cover.intervals.push_back(iv);
    }
    for (const auto& iv : cover.intervals) cover.length += iv.second - iv.first;
    return cover;
}

std::string cover_to_json(const IntervalCover& c) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& iv : c.intervals) j.push_back({iv.first, iv.second});
    return j.dump();
}

SeparationReport separation_from_scan(const BlockScan& scan, double c_k, double b, int L) {
    if (scan.i_min > -L || scan.i_max < L)
        fail(ErrorKind::InvalidParams, "scan does not cover blocks -L..L");
    SeparationReport rep;
    rep.b = b;
    rep.L = L;
    rep.grid_points = scan.grid.size();
    rep.grid_min_margin = std::numeric_limits<double>::infinity();
    const double small = b / (2.0 * L);
    for (std::size_t m = 0; m < scan.grid.size(); ++m) {
        double d0 = std::abs(scan.block(m, 0) - c_k);
        double dmax = 0.0;
        for (int i = -L; i <= L; ++i)
            if (i != 0) dmax = std::max(dmax, std::abs(scan.block(m, i) - c_k));
        if (d0 >= small && dmax >= b) ++rep.grid_violations;
        rep.grid_min_margin = std::min(rep.grid_min_margin, std::max(small - d0, b - dmax));
    }
    return rep;
}

void cusp_separation(const LogRoof& roof, const ContinuedFraction& cf, std::size_t n_k,
                     double c_k, double D, SeparationReport& rep, unsigned threads) {
    const std::int64_t q = to_int64(cf.q(n_k));
    const int L = rep.L;
    RotationPhases rot(cf);
    const std::vector<double> phases = rot.table(0, q);
    const HarmonicSums hs = harmonic_sums(phases, degree(roof.g()));
    const double radius = D * std::exp(-rep.b) / (2.0 * static_cast<double>(q));
    const double g_lip = static_cast<double>(q) * roof.g().variation_bound(1) / 4.0;
    const double small = rep.b / (2.0 * L);

    std::vector<std::int64_t> ms;
    for (std::int64_t m = -static_cast<std::int64_t>(L) * q; m < 0; ++m) ms.push_back(m);
    for (std::int64_t m = q; m < (static_cast<std::int64_t>(L) + 1) * q; ++m) ms.push_back(m);
    std::vector<double> centers(ms.size());
    {
        auto neg = rot.table(1, static_cast<std::int64_t>(L) * q + 1);  // frac(j alpha) = frac(-m alpha), m = -j
        auto pos = rot.table(-(static_cast<std::int64_t>(L) + 1) * q + 1, -q + 1);
        std::size_t idx = 0;
        for (std::int64_t m : ms) {
            if (m < 0)
                centers[idx++] = neg[static_cast<std::size_t>(-m - 1)];
            else
                centers[idx++] = pos[static_cast<std::size_t>(-m + (L + 1) * q - 1)];
        }
    }
    std::vector<double> margin(ms.size());
    parallel_chunks(ms.size(), threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t t = lo; t < hi; ++t) {
            double x = centers[t];
            LogBlock lb = log_block<true>(x, phases.data(), static_cast<std::size_t>(q));
            if (lb.min_v < kGuardBand)
                fail(ErrorKind::SingularityHit, "cusp preimage orbit inside the guard band");
            double s = -roof.c_f() * lb.log_sum + static_cast<double>(q) * roof.g().mean() +
                       g_block_deviation(roof.g(), hs, x);
            double slack = radius * (roof.c_f() * lb.inv_sum + g_lip);
            margin[t] = small - (std::abs(s - c_k) + slack);
        }
    });
    rep.cusp_points = ms.size();
    rep.cusp_violations = 0;
    rep.cusp_min_margin = std::numeric_limits<double>::infinity();
    for (double v : margin) {
        if (v <= 0) ++rep.cusp_violations;
        rep.cusp_min_margin = std::min(rep.cusp_min_margin, v);
    }
}

SeparationReport separation_check(const LogRoof& roof, const ContinuedFraction& cf,
                                  const DiophantineWitness& witness, std::size_t k, double b,
                                  int L, std::size_t grid_size, double D, unsigned threads) {
    CenterStats cs = center_stats(roof, cf, witness, k);
    BlockScan scan = scan_blocks(roof, cf, cs.n_k, -L, L, grid_size, threads);
    SeparationReport rep = separation_from_scan(scan, cs.c_k, b, L);
    cusp_separation(roof, cf, cs.n_k, cs.c_k, D, rep, threads);
    rep.b0 = estimate_b0(D, witness.K, L);
    rep.below_threshold = b < rep.b0;
    return rep;
}

double estimate_b0(double D, int K, int L) {
    const double S = static_cast<double>(K) * K + static_cast<double>(L) * L;
    for (int step = 1; step <= 4000; ++step) {
        double b = 0.25 * step;
        double near = D * std::exp(-b / (2.0 * L));
        double far = 2.0 * D * std::exp(-b);
        if (1.0 / (300.0 * S) - near >= far && 1.0 - 2.0 * L / (200.0 * S) - near > far) return b;
    }
    return std::numeric_limits<double>::infinity();
}

DenjoyKoksmaReport denjoy_koksma_check(const TrigPolynomial& g, const ContinuedFraction& cf,
                                       std::size_t n, const std::vector<double>& grid) {
    DenjoyKoksmaReport rep;
    rep.n = n;
    rep.q = to_int64(cf.q(n));
    RotationPhases rot(cf);
    const HarmonicSums hs = harmonic_sums(rot.table(0, rep.q), degree(g));
    for (double x : grid) rep.max_deviation = std::max(rep.max_deviation, std::abs(g_block_deviation(g, hs, x)));
    rep.variation = g.variation_bound(0);
    double budget = 0.0;
    for (std::size_t k = 1; k <= degree(g); ++k) {
        double amp = std::hypot(coeff(g.cos_coeffs, k), coeff(g.sin_coeffs, k));
        budget += amp * static_cast<double>(rep.q) * (kTwoPi * static_cast<double>(k) * kPhaseError + 8.0 * kEps);
    }
    rep.error_budget = budget;
    rep.holds = rep.max_deviation <= rep.variation + rep.error_budget;
    return rep;
}

}  // namespace ergoscope
