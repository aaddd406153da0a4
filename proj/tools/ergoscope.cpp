#include "ergoscope/acceptance.hpp"
#include "ergoscope/error.hpp"
#include "ergoscope/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

namespace es = ergoscope;

namespace {

int cmd_run(const std::string& config_path, const std::string& out_dir, unsigned threads) {
    es::ExperimentConfig cfg = es::load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (threads > 0) cfg.threads = threads;
    es::ResultBundle b = es::run_experiment(cfg);
    es::emit_results(b, cfg.out_dir);
    for (const auto& c : b.checks)
        std::printf("%s %s%s%s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.empty() ? "" : ": ",
                    c.detail.c_str());
    std::printf("results written to %s\n", cfg.out_dir.c_str());
    return b.all_passed() ? 0 : 1;
}

int cmd_verify(const std::string& config_path) {
    es::AcceptanceOptions opts = es::load_acceptance_config(config_path);
    bool ok = true;
    es::run_acceptance(opts, [&](const es::CriterionResult& r) {
        std::printf("%s\n", es::format_result(r).c_str());
        std::fflush(stdout);
        ok = ok && r.passed;
    });
    return ok ? 0 : 1;
}

int cmd_plot(const std::string& dir) {
    for (const auto& f : es::emit_plots(dir)) std::printf("%s\n", f.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ergoscope: exact experiments on rotations and interval exchange special flows"};
    app.require_subcommand(1);

    std::string run_config, out_dir;
    unsigned threads = 0;
    auto* run = app.add_subcommand("run", "run an experiment and write a result bundle");
    run->add_option("config", run_config, "experiment config file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "output directory (overrides the config)");
    run->add_option("--threads", threads, "worker threads (overrides the config)")->check(CLI::PositiveNumber);

    std::string verify_config;
    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    verify->add_option("config", verify_config, "acceptance config file")->required()->check(CLI::ExistingFile);

    std::string bundle_dir;
    auto* plot = app.add_subcommand("plot", "write SVG plots for a result bundle");
    plot->add_option("bundle", bundle_dir, "result bundle directory")->required()->check(CLI::ExistingDirectory);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*run) return cmd_run(run_config, out_dir, threads);
        if (*verify) return cmd_verify(verify_config);
        if (*plot) return cmd_plot(bundle_dir);
    } catch (const es::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
