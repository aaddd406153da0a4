#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ergoscope {

// Positive-path seed for the d = 4 construction; gives a balanced B (rho = 5, s_1 = 26, s_d = 14).
constexpr std::uint64_t kConstructionSeed = 8;
constexpr std::size_t kPathSteps = 200;

struct AcceptanceOptions {
    std::vector<int> criteria;  // empty runs 1..10
    unsigned threads = 1;
    std::uint64_t rng_seed = 20240917;
    std::uint64_t construction_seed = kConstructionSeed;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

CriterionResult run_criterion(int id, const AcceptanceOptions& opts);
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts,
                                            const std::function<void(const CriterionResult&)>& on_result = {});
// "PASS [3] matrix-identity: ... (0.41 s)"
std::string format_result(const CriterionResult& r);

}  // namespace ergoscope
