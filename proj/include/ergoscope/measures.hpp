#pragma once

#include "ergoscope/rational.hpp"

#include <string>
#include <variant>
#include <vector>

namespace ergoscope {

struct Atom {
    Rational location;
    Rational mass;
};

struct AtomicMeasure {
    std::vector<Atom> atoms;  // sorted by location, distinct, positive mass
};

// Segment k is [breakpoints[k], breakpoints[k+1]) with the density running linearly from
// start_values[k] to end_values[k]. Zero outside the breakpoint range.
struct PiecewiseLinearDensity {
    std::vector<Rational> breakpoints;
    std::vector<Rational> start_values;
    std::vector<Rational> end_values;
};

struct PiecewiseConstantDensity {
    std::vector<Rational> breakpoints;
    std::vector<Rational> values;  // one per segment
};

struct EmpiricalMeasure {
    std::vector<double> samples;  // sorted
    std::vector<double> weights;  // same length, non-negative
};

using ProbMeasure =
    std::variant<AtomicMeasure, PiecewiseLinearDensity, PiecewiseConstantDensity, EmpiricalMeasure>;

AtomicMeasure make_atomic(std::vector<Atom> atoms);
PiecewiseLinearDensity make_pl_density(std::vector<Rational> breakpoints,
                                       std::vector<Rational> start_values,
                                       std::vector<Rational> end_values);
// Continuous density through (breakpoints[k], values[k]).
PiecewiseLinearDensity pl_from_nodes(const std::vector<Rational>& breakpoints,
                                     const std::vector<Rational>& values);

struct LinearPiece {
    Rational lo, hi;
    Rational v_lo, v_hi;  // values at lo and hi
};
// Sum of possibly overlapping linear pieces.
PiecewiseLinearDensity pl_from_pieces(const std::vector<LinearPiece>& pieces);

PiecewiseConstantDensity make_pc_density(std::vector<Rational> breakpoints,
                                         std::vector<Rational> values);
struct Box {
    Rational lo, hi, value;
};
// Sum of indicator densities value * 1[lo, hi).
PiecewiseConstantDensity pc_from_boxes(const std::vector<Box>& boxes);

EmpiricalMeasure make_empirical(std::vector<double> samples, std::vector<double> weights = {});

bool is_exact(const ProbMeasure& p);
Rational total_mass(const ProbMeasure& p);  // exact variants only
double total_mass_double(const ProbMeasure& p);
ProbMeasure normalize(const ProbMeasure& p);

// [Res_w P](A) = P(wA).
ProbMeasure rescale(const ProbMeasure& p, const Rational& w);

// P((-inf, t]) and P((-inf, t)).
Rational cdf_exact(const ProbMeasure& p, const Rational& t);
Rational cdf_left_exact(const ProbMeasure& p, const Rational& t);
double cdf(const ProbMeasure& p, double t);

Rational ks_distance_exact(const ProbMeasure& p, const ProbMeasure& q);
double ks_distance(const ProbMeasure& p, const ProbMeasure& q);

std::vector<Atom> atom_spectrum(const ProbMeasure& p, const Rational& mass_threshold);
std::size_t atom_count(const ProbMeasure& p);

// Number of connected components of {x : density(x) = level}; exact variants with a density.
std::size_t level_components(const ProbMeasure& p, const Rational& level);
Rational max_density(const ProbMeasure& p);

// P(|X| > t) < c e^{-bt} on a grid of t plus every breakpoint and atom.
bool exp_decay_check(const ProbMeasure& p, double c, double b);
// A constant c for which exp_decay_check(p, c, b) holds; uses the support radius.
double find_decay_constant(const ProbMeasure& p, double b);
double support_radius(const ProbMeasure& p);

std::string measure_to_json(const ProbMeasure& p);
// "t,F" rows at the given points.
std::string cdf_csv(const ProbMeasure& p, const std::vector<double>& ts);

}  // namespace ergoscope
