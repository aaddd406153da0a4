#pragma once

#include "ergoscope/iet.hpp"
#include "ergoscope/measures.hpp"
#include "ergoscope/tower_construction.hpp"

#include <variant>
#include <vector>

namespace ergoscope {

// f = c_a on I_a, plus D_beta on [beta, end of the exchanged interval containing beta).
struct RoofPC {
    std::vector<Rational> c;  // by letter
    Rational beta;
    Rational D_beta;
    int beta_letter = 0;

    Rational value(const IET& t, const Rational& x) const;
};

// f(x) = kappa x + c_a on I_a.
struct RoofPL {
    Rational kappa;
    std::vector<Rational> c;  // by letter

    Rational value(const IET& t, const Rational& x) const;
};

using Roof = std::variant<RoofPC, RoofPL>;

// Throws InvalidParams unless f > 0 everywhere and D_beta != 0.
RoofPC make_roof_pc(const IET& t, std::vector<Rational> c, const Rational& beta, const Rational& D_beta);
RoofPL make_roof_pl(const IET& t, const Rational& kappa, std::vector<Rational> c);
// Offsets 1 + |D_beta| + a/4 (resp. 1 + |kappa| + a/4) for letter a.
RoofPC default_roof_pc(const IET& t, const Rational& beta, const Rational& D_beta);
RoofPL default_roof_pl(const IET& t, const Rational& kappa);

Rational roof_value(const IET& t, const Roof& roof, const Rational& x);
Rational cocycle_sum(const IET& t, const Roof& roof, std::int64_t n_terms, const Rational& x);

struct PushforwardResult {
    ProbMeasure measure;  // total mass = controlled_mass
    int i = 0;
    Rational a_n;
    Rational controlled_mass;
    std::size_t pieces = 0;

    ProbMeasure conditional() const { return normalize(measure); }
};

// Distribution of S_{i q_n}(f) - i a_n under Lebesgue on W u Z u U, a_n = S_{q_n}(f)(0).
PushforwardResult pushforward_exact(const ConstructionState& state, const Roof& roof, int i);

// alpha delta_0 + beta delta_{i D} + 2 gamma sum_{0<j<i} delta_{j D}.
ProbMeasure predicted_atomic(int i, const Rational& gamma, const Rational& alpha_mass,
                             const Rational& beta_mass, const Rational& D_beta);

// Limit density G_i, or the density of Res_i(P_i) when rescaled. Requires 0 < gamma < 1/(i+1).
ProbMeasure predicted_density(int i, const Rational& kappa, const Rational& gamma, bool rescaled);

}  // namespace ergoscope
