#pragma once

#include "ergoscope/acceptance.hpp"
#include "ergoscope/rational.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ergoscope {

enum class ExperimentKind { RotationLog, IetPc, IetPl };
const char* kind_name(ExperimentKind k);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::IetPc;
    int K = 3;
    int L = 2;
    // rotation-log
    double C_f = 1.0;
    double g_constant = 2.0;
    std::vector<double> g_cos{0.5};
    std::vector<double> g_sin{0.0, 0.25};
    double c = 1.0;
    std::size_t spike_count = 3;
    long filler = 2;
    std::size_t lead = 10;
    std::size_t grid_size = 100000;
    double q_max = 1e4;
    double b_min = 0.0, b_max = 12.0, b_step = 0.25;
    double fit_b_lo = 2.0, fit_b_hi = 8.0;
    // iet-pc / iet-pl
    int d = 4;
    std::uint64_t seed = 8;  // positive-path seed
    int n_min = 3;
    int n_max = 8;
    std::optional<Rational> epsilon, delta, delta_prime;
    std::int64_t beta_level = 0;
    Rational beta_offset{3, 4};
    Rational D_beta{1};
    Rational kappa{1};
    // common
    std::string out_dir = "ergoscope-out";
    unsigned threads = 1;
    std::uint64_t rng_seed = 1;
};

// key = value lines, '#' starts a comment. Throws ConfigError naming the offending key.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Config for `verify`: keys criteria (comma list of 1..10), threads, rng_seed, seed.
AcceptanceOptions parse_acceptance_config(const std::string& text);
AcceptanceOptions load_acceptance_config(const std::string& path);

struct AtomRow {
    int n = 0;
    int i = 0;
    Rational location, mass;
};

// Node of a density: value on [breakpoint, next breakpoint), or the right end value at the last node.
struct DensityRow {
    int n = 0;
    int i = 0;
    Rational breakpoint, value;
};

struct TailRow {
    double b = 0.0, mass = 0.0;
    int w = 1;
    std::size_t n_k = 0, grid_size = 0;
};

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ResultBundle {
    ExperimentConfig config;
    nlohmann::ordered_json summary;
    std::vector<AtomRow> atoms, oracle_atoms;
    std::vector<DensityRow> density, oracle_density;
    std::vector<TailRow> tails;
    std::vector<Check> checks;

    bool all_passed() const;
};

ResultBundle run_experiment(const ExperimentConfig& config);

// summary.json, atoms.csv, oracle_atoms.csv, density.csv, oracle_density.csv, tails.csv.
void emit_results(const ResultBundle& bundle, const std::string& dir);
// Reads a bundle directory back and writes SVG plots under dir/plots. Returns the files written.
std::vector<std::string> emit_plots(const std::string& dir);

}  // namespace ergoscope
