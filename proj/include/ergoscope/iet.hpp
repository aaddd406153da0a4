#pragma once

#include "ergoscope/interval_union.hpp"
#include "ergoscope/rational.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ergoscope {

// Letters are 0..d-1 and print as A, B, C, ...
std::string letter_name(int letter);

// top[k] is the letter at position k of the top row (the order of the exchanged intervals),
// bottom[k] the letter at position k after the exchange. Positions are 0-based.
class Permutation {
public:
    Permutation() = default;
    Permutation(std::vector<int> top, std::vector<int> bottom);

    // Top row in alphabetical order, bottom row reversed.
    static Permutation symmetric(int d);

    int d() const { return static_cast<int>(top_.size()); }
    const std::vector<int>& top() const { return top_; }
    const std::vector<int>& bottom() const { return bottom_; }
    int top_pos(int letter) const { return top_pos_[letter]; }
    int bottom_pos(int letter) const { return bottom_pos_[letter]; }

    // Swap the rows; this is the permutation of the inverse map.
    Permutation swapped() const { return Permutation(bottom_, top_); }

    bool operator==(const Permutation& o) const { return top_ == o.top_ && bottom_ == o.bottom_; }
    std::string to_string() const;

private:
    std::vector<int> top_, bottom_;
    std::vector<int> top_pos_, bottom_pos_;
};

bool is_irreducible(const Permutation& perm);
// The first top letter ends the bottom row and the last top letter starts it.
bool endpoint_condition(const Permutation& perm);

using Matrix = std::vector<std::vector<std::int64_t>>;

Matrix identity_matrix(int d);
Matrix multiply(const Matrix& a, const Matrix& b);
std::vector<Rational> apply_matrix(const Matrix& a, const std::vector<Rational>& v);
std::vector<std::int64_t> column_sums(const Matrix& a);
bool is_positive(const Matrix& a);
std::int64_t determinant(const Matrix& a);

class IET {
public:
    IET() = default;
    // lengths[letter]; all must be positive.
    IET(Permutation perm, std::vector<Rational> lengths);

    const Permutation& perm() const { return perm_; }
    const std::vector<Rational>& lengths() const { return lengths_; }
    int d() const { return perm_.d(); }
    const Rational& domain_length() const { return total_; }

    // Left endpoint of I_a and of its image T(I_a).
    const Rational& top_start(int letter) const { return top_start_[letter]; }
    const Rational& bottom_start(int letter) const { return bottom_start_[letter]; }
    Interval interval(int letter) const;

    int letter_at(const Rational& x) const;
    Rational apply(const Rational& x) const;
    Rational apply(const Rational& x, long power) const;
    IET inverse() const { return IET(perm_.swapped(), lengths_); }
    IET normalized() const;

    // Left endpoints of I_a other than 0, in increasing order.
    std::vector<Rational> discontinuities() const;

    // Image of a union; intervals are split at discontinuities.
    IntervalUnion image(const IntervalUnion& set) const;

private:
    Permutation perm_;
    std::vector<Rational> lengths_;
    std::vector<Rational> top_start_, bottom_start_;
    Rational total_;
};

IET make_iet(const Permutation& perm, const std::vector<Rational>& lengths,
             bool normalize = false);
Rational apply_iet(const IET& t, const Rational& x, long power);

enum class StepType { Top, Bottom };
const char* step_type_name(StepType t);

struct RauzyStep {
    IET next;
    Matrix elementary;
    StepType type;
    int winner = 0;
    int loser = 0;
};

// One step of Rauzy-Veech induction: first return to [0, |lambda| - min of the two last lengths).
RauzyStep rauzy_step(const IET& t);

struct InductionRecord {
    std::size_t steps = 0;
    Matrix matrix;
    IET end_state;
    std::vector<StepType> step_types;
    std::vector<int> winners;
    // end_state.lengths * scale are the unnormalized lengths.
    Rational scale = 1;
};

InductionRecord rauzy_induct(const IET& t, std::size_t n, bool normalized = false);

// Induct until the two last lengths coincide; the terminal degenerate step closes the final run.
std::vector<std::size_t> rauzy_run_lengths(const IET& t, std::size_t max_steps);

struct Tower {
    int letter = 0;
    std::int64_t height = 0;
    std::vector<Interval> levels;
};

struct TowerDecomposition {
    std::vector<Tower> towers;  // indexed by letter
};

TowerDecomposition tower_decomposition(const IET& t, const InductionRecord& record);

struct Balance {
    Rational value;
    bool infinite = false;
};
// max over i, j, k of B_ij / B_ik.
Balance rho(const Matrix& b);

struct PositivePath {
    Matrix B;
    Permutation pi_hat;
    std::vector<StepType> path;
    std::vector<Rational> start_lengths;
    std::size_t attempts = 0;
};

PositivePath find_positive_path(const Permutation& start, std::size_t max_steps,
                                std::uint64_t seed, long max_denominator = 10000,
                                std::size_t max_attempts = 64);

std::string iet_to_json(const IET& t);
std::string matrix_to_json(const Matrix& m);

}  // namespace ergoscope
