#include "ergoscope/experiment.hpp"

#include "ergoscope/acceptance.hpp"
#include "ergoscope/birkhoff_log.hpp"
#include "ergoscope/cf_rotation.hpp"
#include "ergoscope/error.hpp"
#include "ergoscope/measures.hpp"
#include "ergoscope/parallel.hpp"
#include "ergoscope/special_flow.hpp"
#include "ergoscope/tower_construction.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace ergoscope {

using ojson = nlohmann::ordered_json;

const char* kind_name(ExperimentKind k) {
    switch (k) {
    case ExperimentKind::RotationLog: return "rotation-log";
    case ExperimentKind::IetPc: return "iet-pc";
    case ExperimentKind::IetPl: return "iet-pl";
    }
    return "?";
}

namespace {

const std::set<std::string> kCommonKeys{"kind", "K", "L", "out", "threads", "rng_seed"};
const std::set<std::string> kRotationKeys{"C_f",  "g_constant", "g_cos", "g_sin",    "c",        "spike_count",
                                          "filler", "lead",     "grid_size", "q_max", "b_min", "b_max",
                                          "b_step", "fit_b_lo", "fit_b_hi"};
const std::set<std::string> kIetKeys{"d",     "seed",        "n_min",      "n_max",      "epsilon",
                                     "delta", "delta_prime", "beta_level", "beta_offset", "D_beta", "kappa"};

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& why) {
    fail(ErrorKind::ConfigError, "key '" + key + "': " + why + " (got '" + value + "')");
}

template <class T>
T parse_integer(const std::string& key, const std::string& v) {
    T out{};
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, v, "expected an integer");
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    if (v.empty()) bad_value(key, v, "expected a number");
    char* end = nullptr;
    double x = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size() || !std::isfinite(x)) bad_value(key, v, "expected a number");
    return x;
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    if (v.empty()) return out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
    return out;
}

Rational parse_q(const std::string& key, const std::string& v) {
    try {
        return parse_rational(v);
    } catch (const Error&) {
        bad_value(key, v, "expected a rational like 3/4");
    }
}

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string num(const Rational& x) { return num(to_double(x)); }

ojson config_to_json(const ExperimentConfig& c) {
    ojson j;
    j["kind"] = kind_name(c.kind);
    j["K"] = c.K;
    j["L"] = c.L;
    if (c.kind == ExperimentKind::RotationLog) {
        j["C_f"] = c.C_f;
        j["g_constant"] = c.g_constant;
        j["g_cos"] = c.g_cos;
        j["g_sin"] = c.g_sin;
        j["c"] = c.c;
        j["spike_count"] = c.spike_count;
        j["filler"] = c.filler;
        j["lead"] = c.lead;
        j["grid_size"] = c.grid_size;
        j["q_max"] = c.q_max;
        j["b_grid"] = {c.b_min, c.b_max, c.b_step};
        j["fit_range"] = {c.fit_b_lo, c.fit_b_hi};
    } else {
        j["d"] = c.d;
        j["seed"] = c.seed;
        j["n_range"] = {c.n_min, c.n_max};
        if (c.epsilon) j["epsilon"] = to_string(*c.epsilon);
        if (c.delta) j["delta"] = to_string(*c.delta);
        if (c.delta_prime) j["delta_prime"] = to_string(*c.delta_prime);
        if (c.kind == ExperimentKind::IetPc) {
            j["beta_level"] = c.beta_level;
            j["beta_offset"] = to_string(c.beta_offset);
            j["D_beta"] = to_string(c.D_beta);
        } else {
            j["kappa"] = to_string(c.kappa);
        }
    }
    j["rng_seed"] = c.rng_seed;
    return j;
}

void validate(const ExperimentConfig& c) {
    if (c.K < 1 || c.L < 1 || c.K == c.L) fail(ErrorKind::ConfigError, "K and L must be distinct positive integers");
    if (c.threads < 1) fail(ErrorKind::ConfigError, "threads must be at least 1");
    if (c.kind == ExperimentKind::RotationLog) {
        if (c.grid_size == 0) fail(ErrorKind::ConfigError, "grid_size must be positive");
        if (!(c.b_step > 0) || c.b_max < c.b_min) fail(ErrorKind::ConfigError, "bad b grid");
        if (c.fit_b_hi <= c.fit_b_lo) fail(ErrorKind::ConfigError, "fit_b_hi must exceed fit_b_lo");
        if (c.spike_count == 0) fail(ErrorKind::ConfigError, "spike_count must be positive");
    } else {
        if (c.K <= c.L) fail(ErrorKind::ConfigError, "the construction needs K > L");
        if (c.d < 2 || c.d > 8) fail(ErrorKind::ConfigError, "d must lie in 2..8");
        if (c.n_min < 2 || c.n_max < c.n_min) fail(ErrorKind::ConfigError, "need 2 <= n_min <= n_max");
        if (c.kind == ExperimentKind::IetPl && c.kappa == 0) fail(ErrorKind::ConfigError, "kappa must be non-zero");
        if (c.kind == ExperimentKind::IetPc && c.D_beta == 0) fail(ErrorKind::ConfigError, "D_beta must be non-zero");
    }
}

// Rethrows module errors with the parameter that triggered them.
template <class Fn>
auto with_context(const std::string& where, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        std::string msg = e.what();
        const std::string prefix = std::string(error_kind_name(e.kind())) + ": ";
        if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
        throw Error(e.kind(), where + ": " + msg);
    }
}

struct NRecord {
    ojson json;
    std::vector<AtomRow> atoms, oracle_atoms;
    std::vector<DensityRow> density, oracle_density;
    std::vector<Check> checks;
    std::map<int, double> ks;
};

void add_check(std::vector<Check>& out, std::string name, bool ok, std::string detail = {}) {
    out.push_back({std::move(name), ok, std::move(detail)});
}

void density_rows(const ProbMeasure& m, int n, int i, std::vector<DensityRow>& out) {
    if (auto* pc = std::get_if<PiecewiseConstantDensity>(&m)) {
        for (std::size_t k = 0; k < pc->breakpoints.size(); ++k)
            out.push_back({n, i, pc->breakpoints[k], k < pc->values.size() ? pc->values[k] : Rational(0)});
    } else if (auto* pl = std::get_if<PiecewiseLinearDensity>(&m)) {
        for (std::size_t k = 0; k < pl->breakpoints.size(); ++k)
            out.push_back({n, i, pl->breakpoints[k],
                           k < pl->start_values.size() ? pl->start_values[k] : pl->end_values.back()});
    }
}

NRecord run_construction_n(const ExperimentConfig& c, const PositivePath& path, const Permutation& pi0, int n) {
    NRecord rec;
    const std::string where = "n=" + std::to_string(n);
    ConstructionParams p = default_params(path, pi0, c.K, c.L, n);
    if (c.epsilon) p.epsilon = *c.epsilon;
    if (c.delta) p.delta = *c.delta;
    if (c.delta_prime) p.delta_prime = *c.delta_prime;
    ConstructionState st = with_context(where, [&] { return build_construction(p, sample_Yn(p)); });
    MeasureReport m = measure_report(st);
    const Rational gamma = m.q_delta;

    ojson j;
    j["n"] = n;
    j["q_n"] = st.q;
    j["Delta_n"] = to_string(st.Delta);
    j["gamma_n"] = to_string(gamma);
    j["leb_W"] = to_string(m.W);
    j["leb_Z"] = to_string(m.Z);
    j["leb_U"] = to_string(m.U);
    j["leb_X"] = to_string(m.X);
    add_check(rec.checks, where + " partition", m.partition_exact && st.glue_ok);
    bool rigid = true;
    for (int i = 1; i <= c.K; ++i) rigid = rigid && verify_rigidity(st, i).max_deviation == 0;
    j["rigidity_exact"] = rigid;
    add_check(rec.checks, where + " rigidity", rigid);

    ojson per_i = ojson::array();
    std::map<int, std::size_t> counts;
    const int is[2] = {c.L, c.K};
    for (int i : is) {
        ojson ji;
        ji["i"] = i;
        const std::string wi = where + " i=" + std::to_string(i);
        if (c.kind == ExperimentKind::IetPc) {
            Rational beta = with_context(wi, [&] { return pick_beta(st, c.beta_level, c.beta_offset); });
            Roof roof = default_roof_pc(st.T, beta, c.D_beta);
            PushforwardResult pf = with_context(wi, [&] { return pushforward_exact(st, roof, i); });
            ProbMeasure cond = pf.conditional();
            ji["beta"] = to_string(beta);
            ji["a_n"] = to_string(pf.a_n);
            ji["atoms"] = ojson::parse(measure_to_json(cond));
            bool support = true;
            Rational at0 = 0;
            for (const auto& a : std::get<AtomicMeasure>(cond).atoms) {
                rec.atoms.push_back({n, i, a.location, a.mass});
                Rational jj = a.location / c.D_beta;
                if (jj.get_den() != 1 || jj < 0 || jj > i) support = false;
                if (a.location == 0) at0 = a.mass;
            }
            add_check(rec.checks, wi + " support", support);
            counts[i] = atom_count(rescale(cond, Rational(i)));
            ji["rescaled_atom_count"] = counts[i];
            Rational beta_mass = 1 - at0 - 2 * gamma * (i - 1);
            if (at0 >= gamma && beta_mass >= gamma) {
                ProbMeasure pred = predicted_atomic(i, gamma, at0, beta_mass, c.D_beta);
                for (const auto& a : std::get<AtomicMeasure>(pred).atoms) rec.oracle_atoms.push_back({n, i, a.location, a.mass});
                ji["ks_rescaled_vs_oracle"] =
                    to_double(ks_distance_exact(rescale(cond, Rational(i)), rescale(pred, Rational(i))));
            } else {
                ji["ks_rescaled_vs_oracle"] = nullptr;
            }
        } else {
            Roof roof = with_context(wi, [&] { return Roof(default_roof_pl(st.T, c.kappa)); });
            PushforwardResult pf = with_context(wi, [&] { return pushforward_exact(st, roof, i); });
            ProbMeasure cond = pf.conditional();
            ProbMeasure pred = with_context(wi, [&] { return predicted_density(i, c.kappa, gamma, false); });
            ji["a_n"] = to_string(pf.a_n);
            bool mass_ok = total_mass(cond) == 1 && total_mass(pf.measure) == pf.controlled_mass;
            add_check(rec.checks, wi + " mass", mass_ok);
            double ks = to_double(ks_distance_exact(cond, pred));
            rec.ks[i] = ks;
            ji["ks_vs_oracle"] = ks;
            ji["max_density"] = to_double(max_density(cond));
            density_rows(cond, n, i, rec.density);
            density_rows(pred, n, i, rec.oracle_density);
        }
        per_i.push_back(ji);
    }
    if (c.kind == ExperimentKind::IetPc)
        add_check(rec.checks, where + " atom counts differ", counts[c.K] != counts[c.L],
                  std::to_string(counts[c.L]) + " vs " + std::to_string(counts[c.K]));
    j["pushforwards"] = per_i;
    rec.json = j;
    return rec;
}

void run_iet(const ExperimentConfig& c, ResultBundle& b) {
    const Permutation pi0 = Permutation::symmetric(c.d);
    PositivePath path = with_context("seed=" + std::to_string(c.seed),
                                     [&] { return find_positive_path(pi0, kPathSteps, c.seed); });
    b.summary["B"] = ojson::parse(matrix_to_json(path.B));
    b.summary["rho"] = to_string(rho(path.B).value);
    b.summary["pi_hat"] = path.pi_hat.to_string();
    const int count = c.n_max - c.n_min + 1;
    std::vector<NRecord> recs(count);
    parallel_chunks(static_cast<std::size_t>(count), c.threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) recs[k] = run_construction_n(c, path, pi0, c.n_min + static_cast<int>(k));
    });
    ojson arr = ojson::array();
    for (auto& r : recs) {
        arr.push_back(r.json);
        for (auto& x : r.atoms) b.atoms.push_back(x);
        for (auto& x : r.oracle_atoms) b.oracle_atoms.push_back(x);
        for (auto& x : r.density) b.density.push_back(x);
        for (auto& x : r.oracle_density) b.oracle_density.push_back(x);
        for (auto& x : r.checks) b.checks.push_back(x);
    }
    b.summary["records"] = arr;
    if (c.kind == ExperimentKind::IetPl) {
        for (int i : {c.L, c.K}) {
            bool dec = true;
            std::string trail;
            for (std::size_t k = 0; k < recs.size(); ++k) {
                if (k > 0 && recs[k].ks[i] > recs[k - 1].ks[i]) dec = false;
                char buf[32];
                std::snprintf(buf, sizeof buf, "%s%.3e", k ? " " : "", recs[k].ks[i]);
                trail += buf;
            }
            add_check(b.checks, "ks non-increasing in n, i=" + std::to_string(i), dec, trail);
        }
    }
}

void run_rotation(const ExperimentConfig& c, ResultBundle& b) {
    CklLayout layout;
    layout.lead = c.lead;
    ContinuedFraction cf = make_ckl(c.K, c.L, c.spike_count, c.c, c.filler, layout);
    DiophantineWitness w = find_diophantine_indices(cf, c.K, c.L, c.c);
    TrigPolynomial g{c.g_constant, c.g_cos, c.g_sin};
    LogRoof roof(c.C_f, g);
    std::vector<double> bs;
    for (int j = 0;; ++j) {
        double x = c.b_min + j * c.b_step;
        if (x > c.b_max + 1e-12) break;
        bs.push_back(x);
    }
    b.summary["quotients"] = ojson::parse(quotients_to_json(cf));
    b.summary["witness"] = ojson::parse(witness_to_json(w));
    const int W = std::max(c.K, c.L);
    ojson arr = ojson::array();
    for (std::size_t k = 0; k < w.indices.size(); ++k) {
        if (cf.q(w.indices[k]) > c.q_max) continue;
        const std::string where = "witness k=" + std::to_string(k);
        CenterStats cs = with_context(where, [&] { return center_stats(roof, cf, w, k); });
        if (Integer(static_cast<long>(c.grid_size)) < 10 * cs.q)
            fail(ErrorKind::GridTooCoarse, where + ": grid_size below 10 q");
        BlockScan scan = with_context(where, [&] { return scan_blocks(roof, cf, cs.n_k, -W, W, c.grid_size, c.threads); });
        std::map<int, TailTable> tails;
        for (int wv : {1, c.K, c.L}) {
            if (tails.count(wv)) continue;
            tails[wv] = tail_from_scan(scan, cs.c_k, wv, bs);
            const TailTable& t = tails[wv];
            for (std::size_t j = 0; j < t.b.size(); ++j)
                b.tails.push_back({t.b[j], t.mass[j], wv, t.n_k, t.grid_size});
        }
        TailFit fit = fit_tail_slope(tails[1], c.fit_b_lo, c.fit_b_hi);
        double D = fit_tail_constant(tails[1], c.fit_b_lo, c.fit_b_hi);
        double b0 = estimate_b0(D, c.K, c.L);
        SeparationReport sep = separation_from_scan(scan, cs.c_k, b0, c.L);
        with_context(where, [&] { cusp_separation(roof, cf, cs.n_k, cs.c_k, D, sep, c.threads); return 0; });
        DenjoyKoksmaReport dk = denjoy_koksma_check(g, cf, cs.n_k, scan.grid);

        ojson j;
        j["k"] = k;
        j["n_k"] = cs.n_k;
        j["q"] = cs.q.get_str();
        j["c_k"] = cs.c_k;
        j["c_k_error_bound"] = cs.error_bound;
        j["shifted_points"] = scan.shifted_points;
        j["tail_slope"] = fit.slope;
        j["tail_intercept"] = fit.intercept;
        j["tail_constant_D"] = D;
        j["b0"] = b0;
        j["separation"] = {{"grid_violations", sep.grid_violations},
                           {"cusp_points", sep.cusp_points},
                           {"cusp_violations", sep.cusp_violations},
                           {"cusp_min_margin", sep.cusp_min_margin}};
        j["denjoy_koksma"] = {{"max_deviation", dk.max_deviation},
                              {"variation", dk.variation},
                              {"error_budget", dk.error_budget},
                              {"holds", dk.holds}};
        ojson ratios = ojson::array();
        const TailTable &tk = tails[c.K], &tl = tails[c.L];
        for (std::size_t jb = 0; jb < bs.size(); ++jb) {
            if (tk.count[jb] == 0 || tl.count[jb] == 0) continue;
            double noise = std::sqrt(1.0 / tk.count[jb] + 1.0 / tl.count[jb]);
            ratios.push_back({{"b", bs[jb]}, {"ratio", tk.mass[jb] / tl.mass[jb]}, {"relative_noise", noise}});
        }
        j["rescaled_tail_ratio_K_over_L"] = ratios;
        arr.push_back(j);
        add_check(b.checks, where + " denjoy-koksma", dk.holds);
        add_check(b.checks, where + " tail slope in [-1.3, -0.7]", fit.slope >= -1.3 && fit.slope <= -0.7,
                  num(fit.slope));
        add_check(b.checks, where + " separation at b0", sep.grid_violations + sep.cusp_violations == 0);
    }
    if (arr.empty()) add_check(b.checks, "witness with q <= q_max", false);
    b.summary["records"] = arr;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) fail(ErrorKind::IoError, "cannot write " + p.string());
    f << text;
    if (!f) fail(ErrorKind::IoError, "write failed for " + p.string());
}

std::map<std::string, std::string> parse_pairs(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) fail(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty()) fail(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": empty key");
        if (!kv.emplace(key, value).second) fail(ErrorKind::ConfigError, "duplicate key '" + key + "'");
    }
    return kv;
}

std::string read_text(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail(ErrorKind::IoError, "cannot read " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    const auto kv = parse_pairs(text);
    ExperimentConfig c;
    auto kit = kv.find("kind");
    if (kit == kv.end()) fail(ErrorKind::ConfigError, "missing key 'kind'");
    if (kit->second == "rotation-log") {
        c.kind = ExperimentKind::RotationLog;
        c.K = 2;
        c.L = 3;
    } else if (kit->second == "iet-pc") {
        c.kind = ExperimentKind::IetPc;
    } else if (kit->second == "iet-pl") {
        c.kind = ExperimentKind::IetPl;
    } else {
        bad_value("kind", kit->second, "expected rotation-log, iet-pc or iet-pl");
    }
    const auto& family = c.kind == ExperimentKind::RotationLog ? kRotationKeys : kIetKeys;
    for (const auto& [key, value] : kv) {
        if (kCommonKeys.count(key) == 0 && family.count(key) == 0) {
            if (kRotationKeys.count(key) || kIetKeys.count(key))
                fail(ErrorKind::ConfigError, "key '" + key + "' does not apply to kind " + kind_name(c.kind));
            fail(ErrorKind::ConfigError, "unknown key '" + key + "'");
        }
        if (c.kind != ExperimentKind::IetPc && (key == "beta_level" || key == "beta_offset" || key == "D_beta"))
            fail(ErrorKind::ConfigError, "key '" + key + "' only applies to kind iet-pc");
        if (c.kind != ExperimentKind::IetPl && key == "kappa")
            fail(ErrorKind::ConfigError, "key 'kappa' only applies to kind iet-pl");

        if (key == "kind") continue;
        else if (key == "K") c.K = parse_integer<int>(key, value);
        else if (key == "L") c.L = parse_integer<int>(key, value);
        else if (key == "out") c.out_dir = value;
        else if (key == "threads") c.threads = parse_integer<unsigned>(key, value);
        else if (key == "rng_seed") c.rng_seed = parse_integer<std::uint64_t>(key, value);
        else if (key == "C_f") c.C_f = parse_double(key, value);
        else if (key == "g_constant") c.g_constant = parse_double(key, value);
        else if (key == "g_cos") c.g_cos = parse_list(key, value);
        else if (key == "g_sin") c.g_sin = parse_list(key, value);
        else if (key == "c") c.c = parse_double(key, value);
        else if (key == "spike_count") c.spike_count = parse_integer<std::size_t>(key, value);
        else if (key == "filler") c.filler = parse_integer<long>(key, value);
        else if (key == "lead") c.lead = parse_integer<std::size_t>(key, value);
        else if (key == "grid_size") c.grid_size = parse_integer<std::size_t>(key, value);
        else if (key == "q_max") c.q_max = parse_double(key, value);
        else if (key == "b_min") c.b_min = parse_double(key, value);
        else if (key == "b_max") c.b_max = parse_double(key, value);
        else if (key == "b_step") c.b_step = parse_double(key, value);
        else if (key == "fit_b_lo") c.fit_b_lo = parse_double(key, value);
        else if (key == "fit_b_hi") c.fit_b_hi = parse_double(key, value);
        else if (key == "d") c.d = parse_integer<int>(key, value);
        else if (key == "seed") c.seed = parse_integer<std::uint64_t>(key, value);
        else if (key == "n_min") c.n_min = parse_integer<int>(key, value);
        else if (key == "n_max") c.n_max = parse_integer<int>(key, value);
        else if (key == "epsilon") c.epsilon = parse_q(key, value);
        else if (key == "delta") c.delta = parse_q(key, value);
        else if (key == "delta_prime") c.delta_prime = parse_q(key, value);
        else if (key == "beta_level") c.beta_level = parse_integer<std::int64_t>(key, value);
        else if (key == "beta_offset") c.beta_offset = parse_q(key, value);
        else if (key == "D_beta") c.D_beta = parse_q(key, value);
        else if (key == "kappa") c.kappa = parse_q(key, value);
    }
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::string& path) { return parse_config(read_text(path)); }

AcceptanceOptions parse_acceptance_config(const std::string& text) {
    AcceptanceOptions o;
    for (const auto& [key, value] : parse_pairs(text)) {
        if (key == "criteria") {
            for (double x : parse_list(key, value)) {
                if (x != std::floor(x) || x < 1 || x > 10) bad_value(key, value, "criteria lie in 1..10");
                o.criteria.push_back(static_cast<int>(x));
            }
        } else if (key == "threads") {
            o.threads = parse_integer<unsigned>(key, value);
            if (o.threads < 1) bad_value(key, value, "threads must be at least 1");
        } else if (key == "rng_seed") {
            o.rng_seed = parse_integer<std::uint64_t>(key, value);
        } else if (key == "seed") {
            o.construction_seed = parse_integer<std::uint64_t>(key, value);
        } else {
            fail(ErrorKind::ConfigError, "unknown key '" + key + "' for verify");
        }
    }
    return o;
}

AcceptanceOptions load_acceptance_config(const std::string& path) { return parse_acceptance_config(read_text(path)); }

bool ResultBundle::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

ResultBundle run_experiment(const ExperimentConfig& config) {
    validate(config);
    ResultBundle b;
    b.config = config;
    b.summary["kind"] = kind_name(config.kind);
    b.summary["config"] = config_to_json(config);
    if (config.kind == ExperimentKind::RotationLog)
        run_rotation(config, b);
    else
        run_iet(config, b);
    ojson checks = ojson::array();
    for (const auto& c : b.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    b.summary["checks"] = checks;
    b.summary["all_passed"] = b.all_passed();
    return b;
}

void emit_results(const ResultBundle& b, const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorKind::IoError, "cannot create " + dir + ": " + ec.message());
    const std::filesystem::path root(dir);
    write_file(root / "summary.json", b.summary.dump(2) + "\n");

    auto atoms_csv = [](const std::vector<AtomRow>& rows) {
        std::string s = "n,i,location,mass\n";
        for (const auto& r : rows)
            s += std::to_string(r.n) + "," + std::to_string(r.i) + "," + num(r.location) + "," + num(r.mass) + "\n";
        return s;
    };
    auto density_csv = [](const std::vector<DensityRow>& rows) {
        std::string s = "n,i,breakpoint,value\n";
        for (const auto& r : rows)
            s += std::to_string(r.n) + "," + std::to_string(r.i) + "," + num(r.breakpoint) + "," + num(r.value) + "\n";
        return s;
    };
    write_file(root / "atoms.csv", atoms_csv(b.atoms));
    write_file(root / "oracle_atoms.csv", atoms_csv(b.oracle_atoms));
    write_file(root / "density.csv", density_csv(b.density));
    write_file(root / "oracle_density.csv", density_csv(b.oracle_density));
    std::string tails = "b,mass,w,n_k,grid_size\n";
    for (const auto& t : b.tails)
        tails += num(t.b) + "," + num(t.mass) + "," + std::to_string(t.w) + "," + std::to_string(t.n_k) + "," +
                 std::to_string(t.grid_size) + "\n";
    write_file(root / "tails.csv", tails);
}

}  // namespace ergoscope
