#include "qem/cli.hpp"

#include <atomic>
#include <cmath>
#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qem/adjacency.hpp"
#include "qem/code.hpp"
#include "qem/config.hpp"
#include "qem/errors.hpp"
#include "qem/formulas.hpp"
#include "qem/memory_sim.hpp"
#include "qem/noise.hpp"
#include "qem/rng.hpp"
#include "qem/ssf.hpp"

namespace qem {

namespace {

using nlohmann::json;

std::atomic<bool> g_stop{false};
void handle_sigint(int) { g_stop.store(true); }

std::string hex64(std::uint64_t v) {
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << v;
    return out.str();
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    out << body;
    if (!out) throw IoError("write failed: " + path);
}

json code_json(const QuantumExpanderCode& code) {
    return json{{"n", code.n},
                {"k", code.k},
                {"n_bits", code.n_bits},
                {"n_checks", code.n_checks},
                {"d_bits", code.d_a},
                {"d_checks", code.d_b},
                {"r", code.ratio()},
                {"rank_h_x", code.rank_h_x},
                {"rank_h_z", code.rank_h_z},
                {"delta_a", code.delta_a},
                {"gamma_a", code.gamma_a},
                {"seed", code.seed}};
}

struct BuildCodeArgs {
    std::string config_path, out_path;
    std::size_t n_bits = 0;
    unsigned d_bits = 0, d_checks = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    double delta_a = -1.0, gamma_a = -1.0;
    std::size_t distance_budget = 0;
    std::size_t distance_trials = 2000;
};

int run_build_code(const BuildCodeArgs& a) {
    Config cfg;
    if (!a.config_path.empty()) cfg = load_config(a.config_path);
    if (a.n_bits) cfg.n_bits = a.n_bits;
    if (a.d_bits) cfg.d_bits = a.d_bits;
    if (a.d_checks) cfg.d_checks = a.d_checks;
    if (a.seed_set) cfg.code_seed = a.seed;
    if (a.delta_a >= 0.0) cfg.delta_a = a.delta_a;
    if (a.gamma_a >= 0.0) cfg.gamma_a = a.gamma_a;

    QuantumExpanderCode code = cfg.build_code_from_config();
    json out = code_json(code);

    if (a.distance_budget > 0) {
        DistanceEstimate d = estimate_distance(code, a.distance_budget, a.distance_trials);
        out["distance"] = {{"lower_certified", d.lower_certified},
                           {"upper_found", d.upper_found},
                           {"exact", d.exact}};
    }
    if (!a.out_path.empty()) {
        std::ostringstream bundle;
        write_code_bundle(bundle, code);
        write_text_file(a.out_path, bundle.str());
        out["bundle"] = a.out_path;
    }
    std::cout << out.dump(2) << '\n';
    return 0;
}

struct SimulateArgs {
    std::string config_path, out_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::size_t trials = 0, phases = 0;
    unsigned workers = 0;
};

int run_simulate(const SimulateArgs& a) {
    Config cfg = load_config(a.config_path);
    if (a.seed_set) cfg.sim.master_seed = a.seed;
    if (a.trials) cfg.sim.trials = a.trials;
    if (a.phases) cfg.sim.phases = a.phases;
    if (a.workers) cfg.sim.workers = a.workers;

    QuantumExpanderCode code = cfg.build_code_from_config();
    AdjacencyGraph graph = build_adjacency(code);
    GFamily family = cfg.build_family();

    MemoryParams par = cfg.sim;
    par.monitor_threshold = cfg.monitor_threshold_for(code);
    par.record_phases = cfg.sim.record_phases && !a.out_path.empty();
    par.stop = &g_stop;

    g_stop.store(false);
    auto prev = std::signal(SIGINT, handle_sigint);
    MemoryRun run = run_memory(code, graph, cfg.field, family, par);
    std::signal(SIGINT, prev == SIG_ERR ? SIG_DFL : prev);
    const bool truncated = g_stop.load();

    std::size_t completed = 0, failures = 0, aj_violations = 0;
    std::size_t monitored = 0, exceeded = 0, eq_phases = 0, phases_total = 0;
    for (const SimSummary& s : run.summaries) {
        if (s.phases_run == 0) continue;
        ++completed;
        if (s.failed) ++failures;
        aj_violations += s.aj_violations;
        monitored += s.monitored_phases;
        exceeded += s.exceed_count;
        eq_phases += s.eq_phases;
        phases_total += s.phases_run;
    }

    json out;
    out["config_hash"] = hex64(config_hash(cfg));
    out["code"] = code_json(code);
    out["trials"] = cfg.sim.trials;
    out["completed"] = completed;
    out["phases"] = cfg.sim.phases;
    out["failures"] = failures;
    out["truncated"] = truncated;
    out["monitor"] = {{"threshold", par.monitor_threshold},
                      {"alpha", par.monitor_alpha},
                      {"monitored_phases", monitored},
                      {"exceed_count", exceeded}};
    out["aj_violations"] = aj_violations;
    out["eq_fraction"] =
        phases_total ? static_cast<double>(eq_phases) / static_cast<double>(phases_total) : 1.0;

    if (!truncated && completed >= 30) {
        RetentionCurve curve = retention_estimate(run.summaries, cfg.sim.phases);
        json ret;
        ret["failures"] = curve.failures;
        ret["median"] = curve.median ? json(*curve.median) : json(nullptr);
        ret["final_survival"] = curve.survival.empty() ? 1.0 : curve.survival.back();
        out["retention"] = ret;
    }

    if (!a.out_path.empty()) {
        std::string body = phase_records_csv(run.records);
        if (truncated) body += "# truncated: interrupted before all trials finished\n";
        write_text_file(a.out_path, body);

        json manifest;
        manifest["config"] = config_json(cfg);
        manifest["config_hash"] = hex64(config_hash(cfg));
        manifest["master_seed"] = cfg.sim.master_seed;
        manifest["seed_rule"] = "trial seed = splitmix64 stream at master_seed + trial index";
        manifest["truncated"] = truncated;
        json seeds = json::array();
        for (std::size_t t = 0; t < cfg.sim.trials; ++t)
            seeds.push_back(derive_stream_seed(cfg.sim.master_seed, t));
        manifest["trial_seeds"] = seeds;
        write_text_file(a.out_path + ".manifest.json", manifest.dump(2) + "\n");
        out["records"] = a.out_path;
    }

    std::cout << out.dump(2) << '\n';
    return truncated ? 3 : 0;
}

struct AnalyzeArgs {
    std::string config_path, out_prefix;
    std::size_t n = 0;
    std::size_t samples = 0;
    std::size_t max_lag = 16;
    std::uint64_t seed = 1;
};

int run_analyze_noise(const AnalyzeArgs& a) {
    Config cfg = load_config(a.config_path);
    GFamily family = cfg.build_family();
    const std::size_t n = a.n;
    if (n < 3) throw ParameterError("--n must be at least 3");

    CorrelationReport corr = coupling_matrix(cfg.field, n);

    double v_max = 0.0, v_sum = 0.0;
    for (double v : corr.v) {
        v_max = std::max(v_max, v);
        v_sum += v;
    }

    const double dg2 = family.dg_norm_sq(n);
    json out;
    out["n"] = n;
    out["family"] = cfg.family;
    out["d_norm"] = corr.d_norm;
    out["d_norm_sq"] = corr.d_norm_sq();
    out["dg_norm_sq"] = dg2;
    out["v_max"] = v_max;
    out["v_mean"] = v_sum / static_cast<double>(n);
    out["c_n"] = family.c_n(n);
    out["sensitivity"] = family.coordinate_sensitivity(n);
    out["field_tail"] = lemma_tail(family.c_coeff, static_cast<double>(n), family.eps_g,
                                   family.gamma_corr);

    json tails = json::array();
    for (int j = 1; j <= 4; ++j) {
        const double t = j * std::sqrt(static_cast<double>(n)) * family.c_n(n);
        const double bound = dg2 > 0.0 ? chazottes_bound(t, corr.d_norm_sq(), dg2) : 0.0;
        tails.push_back({{"t", t}, {"bound", bound}});
    }
    out["concentration"] = tails;

    if (a.samples > 0) {
        CovReport cov = empirical_cov(cfg.field, family, n, a.samples,
                                      std::min(a.max_lag, n - 1), a.seed);
        json jc;
        jc["samples"] = cov.samples;
        jc["mean_rate"] = cov.mean_rate;
        jc["weight_var_over_n"] = cov.weight_var_over_n;
        jc["cov"] = cov.cov;
        jc["se"] = cov.se;
        out["empirical"] = jc;
    }

    if (!a.out_prefix.empty()) {
        std::ostringstream d_csv;
        d_csv << std::setprecision(17);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (j) d_csv << ',';
                d_csv << corr.d(i, j);
            }
            d_csv << '\n';
        }
        write_text_file(a.out_prefix + "_coupling.csv", d_csv.str());

        std::ostringstream v_csv;
        v_csv << std::setprecision(17) << "site,v\n";
        for (std::size_t i = 0; i < n; ++i) v_csv << i << ',' << corr.v[i] << '\n';
        write_text_file(a.out_prefix + "_v.csv", v_csv.str());
        out["outputs"] = {a.out_prefix + "_coupling.csv", a.out_prefix + "_v.csv"};
    }

    std::cout << out.dump(2) << '\n';
    return 0;
}

struct ThresholdArgs {
    double r = 0.5, delta_a = 0.03125, gamma_a = 0.1;
    int d_g = 0;
    double eps_g = 0.25, gamma_corr = 0.0;
    bool as_json = false;
};

int run_thresholds(const ThresholdArgs& a) {
    ThresholdReport rep = make_threshold_report(a.r, a.delta_a, a.gamma_a, a.d_g, a.eps_g,
                                                a.gamma_corr);
    std::cout << (a.as_json ? rep.to_json() : rep.to_text()) << '\n';
    return 0;
}

struct MaxConnArgs {
    std::string bundle_path, errors_path;
    double p = -1.0;
    std::uint64_t seed = 1;
    double alpha = 0.5;
    std::size_t size_cap = 0;
    std::uint64_t budget = 50000000;
};

int run_maxconn(const MaxConnArgs& a) {
    std::ifstream in(a.bundle_path, std::ios::binary);
    if (!in) throw IoError("cannot open bundle: " + a.bundle_path);
    QuantumExpanderCode code = read_code_bundle(in);
    AdjacencyGraph graph = build_adjacency(code);

    BitVector errors(code.n);
    if (!a.errors_path.empty()) {
        std::ifstream ein(a.errors_path);
        if (!ein) throw IoError("cannot open error file: " + a.errors_path);
        std::size_t q;
        while (ein >> q) {
            if (q >= code.n) throw ParameterError("error index out of range");
            errors.set(q);
        }
    } else if (a.p >= 0.0) {
        Rng rng(a.seed);
        for (std::size_t i = 0; i < code.n; ++i)
            if (rng.bernoulli(a.p)) errors.set(i);
    } else {
        throw ParameterError("give --errors FILE or --p RATE");
    }

    const std::size_t cap = a.size_cap ? a.size_cap : code.n;
    MaxConnResult res = maxconn_exact(graph, errors, a.alpha, cap, a.budget);

    json out;
    out["n"] = code.n;
    out["error_weight"] = errors.weight();
    out["alpha"] = a.alpha;
    out["size_cap"] = cap;
    out["value"] = res.value;
    out["saturated"] = res.saturated;
    out["lower_bound"] = res.lower_bound;
    out["nodes_visited"] = res.nodes_visited;
    std::cout << out.dump(2) << '\n';
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"expander-code quantum memory toolkit"};
    app.require_subcommand(1);

    BuildCodeArgs bc;
    CLI::App* cmd_bc = app.add_subcommand("build-code", "sample a code and report/bundle it");
    cmd_bc->add_option("--config", bc.config_path, "experiment config (code section used)");
    cmd_bc->add_option("--n-bits", bc.n_bits, "classical bit count");
    cmd_bc->add_option("--d-bits", bc.d_bits, "bit degree");
    cmd_bc->add_option("--d-checks", bc.d_checks, "check degree");
    cmd_bc->add_option("--seed", bc.seed, "construction seed")->each([&](const std::string&) {
        bc.seed_set = true;
    });
    cmd_bc->add_option("--delta-a", bc.delta_a, "declared expansion defect");
    cmd_bc->add_option("--gamma-a", bc.gamma_a, "declared expansion fraction");
    cmd_bc->add_option("--out", bc.out_path, "write a code bundle here");
    cmd_bc->add_option("--distance-budget", bc.distance_budget,
                       "exhaustive distance scan up to this weight");
    cmd_bc->add_option("--distance-trials", bc.distance_trials, "random distance probes");

    SimulateArgs sm;
    CLI::App* cmd_sm = app.add_subcommand("simulate", "run the memory experiment");
    cmd_sm->add_option("--config", sm.config_path, "experiment config")->required();
    cmd_sm->add_option("--seed", sm.seed, "master seed override")->each([&](const std::string&) {
        sm.seed_set = true;
    });
    cmd_sm->add_option("--trials", sm.trials, "trial count override");
    cmd_sm->add_option("--phases", sm.phases, "phase count override");
    cmd_sm->add_option("--workers", sm.workers, "worker thread override");
    cmd_sm->add_option("--out", sm.out_path, "phase-record CSV path (manifest written beside)");

    AnalyzeArgs an;
    CLI::App* cmd_an = app.add_subcommand("analyze-noise", "coupling/concentration analytics");
    cmd_an->add_option("--config", an.config_path, "experiment config")->required();
    cmd_an->add_option("--n", an.n, "chain length")->required();
    cmd_an->add_option("--out", an.out_prefix, "CSV prefix for matrix and profile dumps");
    cmd_an->add_option("--samples", an.samples, "Monte Carlo covariance sample count");
    cmd_an->add_option("--max-lag", an.max_lag, "largest covariance lag");
    cmd_an->add_option("--mc-seed", an.seed, "Monte Carlo seed");

    ThresholdArgs th;
    CLI::App* cmd_th = app.add_subcommand("thresholds", "closed-form threshold report");
    cmd_th->add_option("--r", th.r, "check/bit ratio")->required();
    cmd_th->add_option("--d-g", th.d_g, "connectivity-graph degree")->required();
    cmd_th->add_option("--delta-a", th.delta_a, "expansion defect");
    cmd_th->add_option("--gamma-a", th.gamma_a, "expansion fraction");
    cmd_th->add_option("--eps-g", th.eps_g, "family decay exponent");
    cmd_th->add_option("--gamma-corr", th.gamma_corr, "correlation exponent");
    cmd_th->add_flag("--json", th.as_json, "emit JSON");

    MaxConnArgs mx;
    CLI::App* cmd_mx = app.add_subcommand("maxconn", "cluster statistic on a stored code");
    cmd_mx->add_option("--bundle", mx.bundle_path, "code bundle")->required();
    cmd_mx->add_option("--errors", mx.errors_path, "file of error qubit indices");
    cmd_mx->add_option("--p", mx.p, "iid error rate (alternative to --errors)");
    cmd_mx->add_option("--seed", mx.seed, "error-sampling seed");
    cmd_mx->add_option("--alpha", mx.alpha, "error-density threshold")->required();
    cmd_mx->add_option("--size-cap", mx.size_cap, "search cap (0 = n)");
    cmd_mx->add_option("--budget", mx.budget, "search node budget");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(cmd_bc)) return run_build_code(bc);
        if (app.got_subcommand(cmd_sm)) return run_simulate(sm);
        if (app.got_subcommand(cmd_an)) return run_analyze_noise(an);
        if (app.got_subcommand(cmd_th)) return run_thresholds(th);
        if (app.got_subcommand(cmd_mx)) return run_maxconn(mx);
        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const ResourceError& e) {
        std::cerr << "resource cap: " << e.what()
                  << "\nadvisory: lower --n / the budget, or raise the cap deliberately;"
                  << " partial progress = " << e.partial_count << "\n";
        return 4;
    } catch (const IoError& e) {
        std::cerr << "missing input: " << e.what() << "\n";
        return 3;
    } catch (const SamplingError& e) {
        std::cerr << "sampling failure: " << e.what() << "\n";
        return 3;
    } catch (const StatisticsError& e) {
        std::cerr << "statistics failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace qem
