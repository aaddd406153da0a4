#pragma once

#include "ergoscope/cf_rotation.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ergoscope {

constexpr double kGuardBand = 1e-14;

// constant + sum_k a_k cos(2 pi k x) + b_k sin(2 pi k x), k = 1, 2, ...
struct TrigPolynomial {
    double constant = 0.0;
    std::vector<double> cos_coeffs;
    std::vector<double> sin_coeffs;

    double value(double x) const;
    double derivative(double x, int r) const;
    double mean() const { return constant; }
    // Upper bound on the total variation of the r-th derivative over one period.
    double variation_bound(int r = 0) const;
    // Lower bound of the function on the circle.
    double lower_bound() const;
};

// f(x) = C_f (-log x - log(1 - x)) + g(x).
class LogRoof {
public:
    LogRoof(double c_f, TrigPolynomial g);

    double c_f() const { return c_f_; }
    const TrigPolynomial& g() const { return g_; }
    double value(double x) const { return derivative(x, 0); }
    // r-th derivative, r in 0..3.
    double derivative(double x, int r) const;

private:
    double c_f_;
    TrigPolynomial g_;
};

// frac(j alpha) for alpha = p_N / q_N, the deepest convergent of cf, from exact residues.
class RotationPhases {
public:
    explicit RotationPhases(const ContinuedFraction& cf);
    double phase(std::int64_t j) const;
    double alpha() const { return phase(1); }
    // Values frac(j alpha) for j in [lo, hi).
    std::vector<double> table(std::int64_t lo, std::int64_t hi) const;

private:
    Integer p_, q_;
};

struct SumResult {
    double value = 0.0;
    double error_bound = 0.0;
};

// sum_{i < n_terms} f^{(r)}(x + i alpha) with compensated summation.
SumResult birkhoff_sum(const LogRoof& roof, const ContinuedFraction& cf, int r,
                       std::uint64_t n_terms, double x, double guard = kGuardBand);

struct CenterStats {
    std::size_t k = 0;
    std::size_t n_k = 0;
    Integer q;
    Rational x_k;
    double c_k = 0.0;
    double error_bound = 0.0;
};

CenterStats center_stats(const LogRoof& roof, const ContinuedFraction& cf,
                         const DiophantineWitness& witness, std::size_t k);

// Block sums S_q(f)(x + i q alpha) for every grid point x and i in [i_min, i_max].
struct BlockScan {
    std::size_t n_k = 0;
    std::int64_t q = 0;
    int i_min = 0;
    int i_max = 0;
    std::vector<double> grid;
    std::vector<double> blocks;  // row-major, grid.size() rows
    std::size_t shifted_points = 0;

    int width() const { return i_max - i_min + 1; }
    double block(std::size_t m, int i) const { return blocks[m * width() + (i - i_min)]; }
};

BlockScan scan_blocks(const LogRoof& roof, const ContinuedFraction& cf, std::size_t n_k,
                      int i_min, int i_max, std::size_t grid_size, unsigned threads = 1);

struct TailTable {
    std::vector<double> b;
    std::vector<double> mass;
    std::vector<std::size_t> count;
    int w = 1;
    std::size_t n_k = 0;
    std::size_t grid_size = 0;
};

// Fraction of grid points with |S_{wq}(f)(x) - w c_k| >= w b, via the cocycle identity.
TailTable tail_from_scan(const BlockScan& scan, double c_k, int w, const std::vector<double>& b_grid);
TailTable tail_mass(const LogRoof& roof, const ContinuedFraction& cf,
                    const DiophantineWitness& witness, std::size_t k, int w,
                    const std::vector<double>& b_grid, std::size_t grid_size, unsigned threads = 1);
std::string tail_table_csv(const TailTable& t);

struct TailFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::size_t points = 0;
};
// Least squares of log(mass) against b over b_lo <= b <= b_hi, skipping empty bins.
TailFit fit_tail_slope(const TailTable& t, double b_lo, double b_hi);
// Smallest D with D^{-1} e^{-b} <= mass <= D e^{-b} over the b range.
double fit_tail_constant(const TailTable& t, double b_lo, double b_hi);

struct IntervalCover {
    std::vector<std::pair<double, double>> intervals;  // disjoint, within [0, 1)
    double length = 0.0;
    bool contains(double x) const;
};

// Union of [-j alpha - r, -j alpha + r], j < q_{n_k}, with r = D e^{-b} / (2 q_{n_k}).
IntervalCover ak_interval_cover(const ContinuedFraction& cf, const DiophantineWitness& witness,
                                std::size_t k, double b, double D);
std::string cover_to_json(const IntervalCover& c);

struct SeparationReport {
    double b = 0.0;
    int L = 0;
    std::size_t grid_points = 0;
    std::size_t grid_violations = 0;
    double grid_min_margin = 0.0;
    // Points whose i q_{n_k} rotation is a cusp -j alpha, i in [-L, L] \ {0}.
    std::size_t cusp_points = 0;
    std::size_t cusp_violations = 0;
    double cusp_min_margin = 0.0;
    double b0 = 0.0;
    bool below_threshold = false;
};

SeparationReport separation_from_scan(const BlockScan& scan, double c_k, double b, int L);
// Checks |S_q(f)(x*) - c_k| < b / (2L) at the cusp preimages x*, widened by a Lipschitz
// slack over the radius D e^{-b} / (2q).
void cusp_separation(const LogRoof& roof, const ContinuedFraction& cf, std::size_t n_k,
                     double c_k, double D, SeparationReport& report, unsigned threads = 1);
SeparationReport separation_check(const LogRoof& roof, const ContinuedFraction& cf,
                                  const DiophantineWitness& witness, std::size_t k, double b,
                                  int L, std::size_t grid_size, double D, unsigned threads = 1);

// Least b (step 1/4) with (300S)^{-1} - D e^{-b/2L} >= 2 D e^{-b} and
// 1 - 2L/(200S) - D e^{-b/2L} > 2 D e^{-b}, S = K^2 + L^2.
double estimate_b0(double D, int K, int L);

struct DenjoyKoksmaReport {
    std::size_t n = 0;
    std::int64_t q = 0;
    double max_deviation = 0.0;  // max_x |S_q(g)(x) - q * mean(g)|
    double variation = 0.0;
    double error_budget = 0.0;
    bool holds = false;
};

// |S_{q_n}(g)(x) - q_n mean(g)| <= Var(g) at every grid point.
DenjoyKoksmaReport denjoy_koksma_check(const TrigPolynomial& g, const ContinuedFraction& cf,
                                       std::size_t n, const std::vector<double>& grid);

std::vector<double> midpoint_grid(std::size_t grid_size);

}  // namespace ergoscope
