#pragma once

#include "ergoscope/rational.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ergoscope {

using Real = boost::multiprecision::mpfr_float;

constexpr unsigned kDefaultPrecisionBits = 256;

// Quotients a_1, a_2, ... of [0; a_1, a_2, ...]. Convergents are cached on construction.
class ContinuedFraction {
public:
    ContinuedFraction() = default;
    explicit ContinuedFraction(std::vector<Integer> quotients);

    const std::vector<Integer>& quotients() const { return quotients_; }
    std::size_t depth() const { return quotients_.size(); }
    // a_n for 1 <= n <= depth.
    const Integer& a(std::size_t n) const;
    const Integer& p(std::size_t n) const;
    const Integer& q(std::size_t n) const;

private:
    std::vector<Integer> quotients_;
    std::vector<Integer> p_;
    std::vector<Integer> q_;
};

ContinuedFraction cf_expand(const Real& alpha, std::size_t depth,
                            unsigned precision_bits = kDefaultPrecisionBits);
ContinuedFraction cf_expand_rational(const Rational& alpha, std::size_t depth);

std::pair<Integer, Integer> convergents(const ContinuedFraction& cf, std::size_t n);

struct RationalApprox {
    Rational value;
    Rational error_bound;
};
RationalApprox alpha_from_quotients(const std::vector<Integer>& quotients);

double circle_norm(double x);
Rational circle_norm(const Rational& x);

// Digits b_0 .. b_{n-1} with ell = sum b_i q_i, where n is the least index with q_n > ell.
std::vector<Integer> ostrowski_decompose(const Integer& ell, const ContinuedFraction& cf);

struct OrbitMinima {
    Rational minus;
    Rational plus;
    std::uint64_t argmin_index = 0;
    std::uint64_t argmin_plus_index = 0;
};
// Orbit of x under rotation by the deepest convergent p_N/q_N of cf.
OrbitMinima orbit_min_distance(const Rational& x, const ContinuedFraction& cf, std::size_t n);

struct DiophantineWitness {
    std::vector<std::size_t> indices;
    double c = 0.0;
    int K = 0;
    int L = 0;
};
DiophantineWitness find_diophantine_indices(const ContinuedFraction& cf, int K, int L, double c);

struct CklLayout {
    std::size_t lead = 0;  // filler quotients before the first spike; 0 selects the minimal gap
    std::size_t gap = 0;   // distance between consecutive witnesses; 0 selects the minimal gap
    std::size_t tail = 0;  // filler after the last spike; 0 selects gap
};
ContinuedFraction make_ckl(int K, int L, std::size_t count, double c, long filler_bound,
                           CklLayout layout = {});
std::size_t ckl_min_gap(int K, int L, double c);

std::string quotients_to_json(const ContinuedFraction& cf);
std::string witness_to_json(const DiophantineWitness& w);

}  // namespace ergoscope
