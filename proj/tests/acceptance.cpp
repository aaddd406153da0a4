#include "ergoscope/acceptance.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

// Usage: acceptance [criterion ...]
int main(int argc, char** argv) {
    ergoscope::AcceptanceOptions opts;
    for (int i = 1; i < argc; ++i) opts.criteria.push_back(std::atoi(argv[i]));
    bool ok = true;
    ergoscope::run_acceptance(opts, [&](const ergoscope::CriterionResult& r) {
        std::printf("%s\n", ergoscope::format_result(r).c_str());
        std::fflush(stdout);
        ok = ok && r.passed;
    });
    return ok ? 0 : 1;
}
