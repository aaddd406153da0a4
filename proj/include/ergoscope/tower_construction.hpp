#pragma once

#include "ergoscope/iet.hpp"
#include "ergoscope/interval_union.hpp"

#include <string>
#include <vector>

namespace ergoscope {

struct ConstructionParams {
    int K = 3;
    int L = 2;
    Rational epsilon;
    Rational delta;
    Rational delta_prime;
    int n = 3;
    Permutation pi0;     // permutation of the top-level map
    Permutation pi_hat;  // end of the positive path; satisfies the endpoint condition
    Matrix B;            // matrix of the positive path
    std::vector<StepType> path;
};

// epsilon = min(1/(100 rho), 1/(100 K)) / 2, delta = 9 epsilon / 20, delta' = 2 epsilon / 5.
ConstructionParams default_params(const PositivePath& path, const Permutation& pi0, int K, int L, int n);
// Throws InvariantViolated when the epsilon / delta constraints fail.
void validate_params(const ConstructionParams& p);

struct YnReport {
    Rational Q;
    // Each margin is positive iff the corresponding strict inequality holds.
    Rational ineq1_lower, ineq1_upper;
    Rational ineq2_lower, ineq2_upper;
    Rational ineq3;
    Rational ineq4_lower, ineq4_upper;
    bool ok = false;
};

// lambda is indexed by letter.
YnReport check_Yn(const std::vector<Rational>& lambda, const ConstructionParams& p);
std::vector<Rational> sample_Yn(const ConstructionParams& p);

struct ConstructionState {
    ConstructionParams params;
    Rational rho;
    IET T;
    std::vector<Rational> lambda_prime;
    std::vector<Rational> lambda_rn;
    InductionRecord record;  // all steps from T down to level r_n
    TowerDecomposition towers;
    int letter_first = 0;  // letter at top position 1 of pi_hat
    int letter_last = 0;   // letter at top position d of pi_hat
    std::vector<int> middle_letters;
    std::vector<std::int64_t> s;  // column sums of B, by letter
    std::int64_t s1 = 0, sd = 0;
    std::int64_t q = 0;
    Rational Delta, Sigma, domain, Q;  // domain = |I^n|
    Interval J;
    IntervalUnion W, Z, U;
    std::vector<IntervalUnion> U_parts;  // p = 1..K
    IntervalUnion X1, X2, X3, X;
    bool glue_ok = false;

    IntervalUnion controlled() const { return W.unite(Z).unite(U); }
};

ConstructionState build_construction(const ConstructionParams& params,
                                     const std::vector<Rational>& lambda_prime);
// default_params plus the sampled point of the simplex set.
ConstructionState build_default_construction(const PositivePath& path, const Permutation& pi0,
                                             int K, int L, int n);

struct RigidityReport {
    int i = 0;
    Rational max_deviation;
    Rational verified_measure;
    std::size_t pieces = 0;
};

// T^{i q_n} x - x - i Delta_n over the controlled set, exactly.
RigidityReport verify_rigidity(const ConstructionState& state, int i);
RigidityReport verify_rigidity_on(const ConstructionState& state, const IntervalUnion& set, int i);

struct MeasureReport {
    Rational W, Z, U, X;
    Rational X1, X2, X3;
    Rational q_delta;
    Rational gamma;
    bool partition_exact = false;  // W, Z, U, X pairwise disjoint with union [0, 1)
};

MeasureReport measure_report(const ConstructionState& state);

// T^m of the point at relative position offset inside [0, |J|); offset in [1/2, 1).
Rational pick_beta(const ConstructionState& state, std::int64_t m, const Rational& offset);
// Union over l < q_n of T^l [|J|/2, |J|).
IntervalUnion beta_region(const ConstructionState& state);

std::string construction_to_json(const ConstructionState& state);
std::string interval_union_to_json(const IntervalUnion& u);

}  // namespace ergoscope
