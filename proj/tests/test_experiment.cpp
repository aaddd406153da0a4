#include "ergoscope/experiment.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ergoscope;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string first_line(const fs::path& p) {
    std::ifstream f(p);
    std::string line;
    std::getline(f, line);
    return line;
}

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("ergoscope-test-" + name);
    fs::remove_all(p);
    return p;
}

const char* kFiles[] = {"summary.json", "atoms.csv", "oracle_atoms.csv", "density.csv", "oracle_density.csv", "tails.csv"};

}  // namespace

TEST_CASE("config parsing") {
    ExperimentConfig c = parse_config(
        "# comment line\n"
        "kind = iet-pl   # trailing comment\n"
        "K=4\nL = 1\nn_min = 3\nn_max = 5\nkappa = -3/2\nepsilon = 1/1000\nthreads = 2\nout = somewhere\n");
    CHECK(c.kind == ExperimentKind::IetPl);
    CHECK(c.K == 4);
    CHECK(c.L == 1);
    CHECK(c.kappa == make_rational(-3, 2));
    REQUIRE(c.epsilon.has_value());
    CHECK(*c.epsilon == make_rational(1, 1000));
    CHECK(c.threads == 2);
    CHECK(c.out_dir == "somewhere");

    ExperimentConfig rot = parse_config("kind = rotation-log\ng_cos = 0.5, 0.1\ng_sin =\ngrid_size = 5000\n");
    CHECK(rot.kind == ExperimentKind::RotationLog);
    CHECK(rot.K == 2);
    CHECK(rot.L == 3);
    CHECK(rot.g_cos == std::vector<double>{0.5, 0.1});
    CHECK(rot.g_sin.empty());
    CHECK(rot.grid_size == 5000);
}

TEST_CASE("config errors name the key") {
    auto message = [](const std::string& text) {
        try {
            parse_config(text);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::ConfigError);
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message("K = 3\n") .find("kind") != std::string::npos);
    CHECK(message("kind = torus\n").find("kind") != std::string::npos);
    CHECK(message("kind = iet-pc\nbogus = 1\n").find("bogus") != std::string::npos);
    CHECK(message("kind = iet-pc\ngrid_size = 10\n").find("grid_size") != std::string::npos);
    CHECK(message("kind = iet-pc\nkappa = 1\n").find("kappa") != std::string::npos);
    CHECK(message("kind = iet-pl\nD_beta = 1\n").find("D_beta") != std::string::npos);
    CHECK(message("kind = iet-pc\nK = 3\nK = 4\n").find("duplicate") != std::string::npos);
    CHECK(message("kind = iet-pc\nK = three\n").find("'K'") != std::string::npos);
    CHECK(message("kind = iet-pc\nbeta_offset = x/y\n").find("beta_offset") != std::string::npos);
    CHECK(message("kind = iet-pc\nK = 2\nL = 3\n") != "no error");
    CHECK(message("kind = iet-pc\njust words\n").find("line 2") != std::string::npos);
    CHECK(error_kind([] { load_config("/nonexistent/ergoscope.cfg"); }) == ErrorKind::IoError);
}

TEST_CASE("acceptance config") {
    AcceptanceOptions o = parse_acceptance_config("criteria = 1, 5, 10\nthreads = 2\nseed = 8\nrng_seed = 7\n");
    CHECK(o.criteria == std::vector<int>{1, 5, 10});
    CHECK(o.threads == 2);
    CHECK(o.construction_seed == 8);
    CHECK(o.rng_seed == 7);
    CHECK(error_kind([] { parse_acceptance_config("criteria = 11\n"); }) == ErrorKind::ConfigError);
    CHECK(error_kind([] { parse_acceptance_config("kind = iet-pc\n"); }) == ErrorKind::ConfigError);
}

TEST_CASE("empty bundle writes headers only") {
    ResultBundle b;
    fs::path dir = scratch("empty");
    emit_results(b, dir.string());
    CHECK(first_line(dir / "atoms.csv") == "n,i,location,mass");
    CHECK(first_line(dir / "oracle_atoms.csv") == "n,i,location,mass");
    CHECK(first_line(dir / "density.csv") == "n,i,breakpoint,value");
    CHECK(first_line(dir / "oracle_density.csv") == "n,i,breakpoint,value");
    CHECK(first_line(dir / "tails.csv") == "b,mass,w,n_k,grid_size");
    CHECK(slurp(dir / "atoms.csv") == "n,i,location,mass\n");
    fs::remove_all(dir);
}

TEST_CASE("piecewise constant bundle") {
    ExperimentConfig c = parse_config("kind = iet-pc\nn_min = 3\nn_max = 4\n");
    ResultBundle b = run_experiment(c);
    CHECK(b.all_passed());
    REQUIRE(!b.atoms.empty());
    for (const auto& a : b.atoms) {
        Rational j = a.location / c.D_beta;
        CHECK(j.get_den() == 1);
        CHECK(j >= 0);
        CHECK(j <= a.i);
    }
    fs::path dir = scratch("pc");
    emit_results(b, dir.string());
    std::string first[6];
    for (int k = 0; k < 6; ++k) first[k] = slurp(dir / kFiles[k]);
    CHECK(first[1].rfind("n,i,location,mass\n3,2,0,", 0) == 0);

    // rerun from scratch: byte-identical files
    ResultBundle again = run_experiment(c);
    emit_results(again, dir.string());
    for (int k = 0; k < 6; ++k) CHECK(slurp(dir / kFiles[k]) == first[k]);

    auto plots = emit_plots(dir.string());
    CHECK(plots.size() == 4);
    std::string svg = slurp(plots.front());
    CHECK(svg.rfind("<svg", 0) == 0);
    emit_plots(dir.string());
    CHECK(slurp(plots.front()) == svg);
    fs::remove_all(dir);
}

TEST_CASE("piecewise linear bundle") {
    ExperimentConfig c = parse_config("kind = iet-pl\nn_min = 3\nn_max = 5\n");
    ResultBundle b = run_experiment(c);
    CHECK(b.all_passed());
    CHECK(!b.density.empty());
    CHECK(!b.oracle_density.empty());
    fs::path dir = scratch("pl");
    emit_results(b, dir.string());
    CHECK(first_line(dir / "density.csv") == "n,i,breakpoint,value");
    CHECK(emit_plots(dir.string()).size() == 6);
    CHECK(b.summary["records"].size() == 3);
    fs::remove_all(dir);
}

TEST_CASE("module errors carry the offending parameter") {
    ExperimentConfig c = parse_config("kind = iet-pc\nn_min = 3\nn_max = 3\nepsilon = 1/2\n");
    try {
        run_experiment(c);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvariantViolated);
        CHECK(std::string(e.what()).find("n=3") != std::string::npos);
    }
    CHECK(error_kind([] { emit_plots("/nonexistent/bundle"); }) == ErrorKind::IoError);
}
