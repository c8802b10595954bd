#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qem/cli.hpp"
#include "qem/code.hpp"
#include "qem/config.hpp"
#include "qem/errors.hpp"
#include "qem/formulas.hpp"

using namespace qem;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::vector<std::string>& args, std::string* captured = nullptr) {
    std::vector<const char*> argv;
    argv.push_back("qem");
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream cap;
    std::streambuf* old = std::cout.rdbuf(cap.rdbuf());
    int rc = cli_main(static_cast<int>(argv.size()), argv.data());
    std::cout.rdbuf(old);
    if (captured) *captured = cap.str();
    return rc;
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "qem_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& body) {
    std::ofstream out(p);
    out << body;
}

}  // namespace

TEST_CASE("config defaults, round trip and hashing") {
    Config base = parse_config(json::object());
    CHECK(base.n_bits == 8);
    CHECK(base.family == "constant");
    CHECK(base.p_bar == doctest::Approx(1e-3));
    CHECK(base.sim.trials == 100);
    CHECK(base.field.alphabet == 2);

    Config echo = parse_config(config_json(base));
    CHECK(config_hash(echo) == config_hash(base));

    Config other = base;
    other.code_seed = 8;
    CHECK(config_hash(other) != config_hash(base));

    // reference vectors for the 64-bit FNV-1a underneath the hash
    CHECK(fnv1a64("") == 14695981039346656037ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("config rejects malformed input") {
    CHECK_THROWS_AS(parse_config(json::parse(R"({"bogus":{}})")), ParameterError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"code":{"bits":4}})")), ParameterError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"noise":{"p_bar":"tiny"}})")), ParameterError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"field":{"init":[0.5,0.5]}})")), ParameterError);
    CHECK_THROWS_AS(
        parse_config(json::parse(R"({"field":{"init":[0.5,0.5],"kernel":[[1,0]]}})")),
        ParameterError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"field":{"alphabet":3,"flip_prob":0.1}})")),
                    ParameterError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"field":{"temporal":"sticky"}})")),
                    ParameterError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"noise":{"family":"quadratic"}})")),
                    ParameterError);
    // sigmoid recentering needs a stationary chain law
    CHECK_THROWS_AS(parse_config(json::parse(R"({
        "field":{"init":[1.0,0.0],"kernel":[[0.9,0.1],[0.1,0.9]],"stationary":false},
        "noise":{"family":"sigmoid","p_bar":0.01,"window":[0],"weights":[0.5]}})")),
                    ParameterError);
}

TEST_CASE("config builds the requested family") {
    Config c = parse_config(json::parse(
        R"({"noise":{"family":"affine","p_bar":0.05,"window":[-1,0,1],
            "weights":[0.01,0.02,0.01],"c_coeff":2.0}})"));
    GFamily g = c.build_family();
    CHECK(g.form == GFamily::Form::affine_window);
    CHECK(g.p_bar == doctest::Approx(0.05));
    CHECK(g.weights.size() == 3);

    Config gm = parse_config(
        json::parse(R"({"noise":{"family":"global_mean","p_bar":0.2,"coefficient":0.5}})"));
    CHECK(gm.build_family().form == GFamily::Form::global_mean);
}

TEST_CASE("monitor threshold derivation") {
    Config c = parse_config(json::object());
    QuantumExpanderCode code = c.build_code_from_config();
    REQUIRE(code.n == 80);
    CHECK(c.monitor_threshold_for(code) ==
          doctest::Approx(c_prime(0.5, 0.03125, 0.1) * std::sqrt(80.0)).epsilon(1e-12));
    c.monitor_coeff = 2.0;
    CHECK(c.monitor_threshold_for(code) == doctest::Approx(2.0 * std::sqrt(80.0)).epsilon(1e-12));
}

TEST_CASE("thresholds command") {
    std::string out;
    CHECK(run_cli({"thresholds", "--r", "0.5", "--d-g", "10"}, &out) == 0);
    CHECK(out.find("threshold report") != std::string::npos);
    CHECK(out.find("p_th") != std::string::npos);

    CHECK(run_cli({"thresholds", "--r", "0.5", "--d-g", "10", "--json"}, &out) == 0);
    json j = json::parse(out);
    CHECK(j.at("alpha_usable").get<bool>());
    CHECK(j.at("p_th").get<double>() ==
          doctest::Approx(p_threshold(0.5, 10)).epsilon(1e-12));
    CHECK(j.at("p_th_general").get<double>() > 0.0);
}

TEST_CASE("build-code bundle and maxconn round trip") {
    fs::path dir = fresh_dir("bundle");
    fs::path bundle = dir / "code.bundle";
    std::string out;
    CHECK(run_cli({"build-code", "--n-bits", "8", "--d-bits", "3", "--d-checks", "6", "--seed",
                   "7", "--out", bundle.string()},
                  &out) == 0);
    json j = json::parse(out);
    CHECK(j.at("n").get<std::size_t>() == 80);
    CHECK(j.at("k").get<std::size_t>() == 16);

    std::ifstream in(bundle);
    REQUIRE(in.good());
    QuantumExpanderCode code = read_code_bundle(in);
    CHECK(code.n == 80);

    CHECK(run_cli({"maxconn", "--bundle", bundle.string(), "--p", "0.05", "--seed", "3",
                   "--alpha", "0.5", "--size-cap", "6"},
                  &out) == 0);
    json m = json::parse(out);
    CHECK(m.at("value").get<std::size_t>() >= 1);
    CHECK(m.at("n").get<std::size_t>() == 80);

    // an error source is mandatory
    CHECK(run_cli({"maxconn", "--bundle", bundle.string(), "--alpha", "0.5"}) == 2);
    fs::remove_all(dir.parent_path());
}

TEST_CASE("simulate writes records and a manifest deterministically") {
    fs::path dir = fresh_dir("simulate");
    fs::path cfg = dir / "exp.json";
    write(cfg, R"({"noise":{"family":"constant","p_bar":0.002},
                   "sim":{"trials":3,"phases":5,"workers":1,"seed":12}})");

    fs::path csv1 = dir / "run1.csv";
    std::string out;
    CHECK(run_cli({"simulate", "--config", cfg.string(), "--out", csv1.string()}, &out) == 0);
    json summary = json::parse(out);
    CHECK(summary.at("completed").get<std::size_t>() == 3);
    CHECK(!summary.at("truncated").get<bool>());
    CHECK(!summary.contains("retention"));  // below the 30-trial floor

    std::string body = slurp(csv1);
    CHECK(body.rfind("trial,phase,new_weight,", 0) == 0);
    CHECK(body.find("truncated") == std::string::npos);

    json manifest = json::parse(slurp(csv1.string() + ".manifest.json"));
    CHECK(manifest.at("config_hash").get<std::string>() ==
          summary.at("config_hash").get<std::string>());
    CHECK(manifest.at("trial_seeds").size() == 3);
    CHECK(manifest.at("master_seed").get<std::uint64_t>() == 12);
    CHECK(!manifest.at("truncated").get<bool>());

    fs::path csv2 = dir / "run2.csv";
    CHECK(run_cli({"simulate", "--config", cfg.string(), "--out", csv2.string()}, &out) == 0);
    CHECK(slurp(csv2) == body);

    // overrides change the effective config hash surfaced in the manifest
    CHECK(run_cli({"simulate", "--config", cfg.string(), "--trials", "2"}, &out) == 0);
    json overridden = json::parse(out);
    CHECK(overridden.at("completed").get<std::size_t>() == 2);
    CHECK(overridden.at("config_hash").get<std::string>() !=
          summary.at("config_hash").get<std::string>());
    fs::remove_all(dir.parent_path());
}

TEST_CASE("analyze-noise reports and caps") {
    fs::path dir = fresh_dir("analyze");
    fs::path cfg = dir / "exp.json";
    write(cfg, R"({"field":{"flip_prob":0.1},
                   "noise":{"family":"constant","p_bar":0.001}})");
    std::string out;
    CHECK(run_cli({"analyze-noise", "--config", cfg.string(), "--n", "21", "--samples", "0",
                   "--out", (dir / "prof").string()},
                  &out) == 0);
    json j = json::parse(out);
    CHECK(j.at("d_norm").get<double>() == doctest::Approx(4.384551945702461).epsilon(1e-9));
    CHECK(j.at("v_max").get<double>() == doctest::Approx(7.1410065408).epsilon(1e-9));
    CHECK(j.at("concentration").size() == 4);
    CHECK(!j.contains("empirical"));
    std::string dcsv = slurp(dir / "prof_coupling.csv");
    CHECK(std::count(dcsv.begin(), dcsv.end(), '\n') == 21);

    CHECK(run_cli({"analyze-noise", "--config", cfg.string(), "--n", "5000"}) == 4);
    fs::remove_all(dir.parent_path());
}

TEST_CASE("bad invocations exit with the documented codes") {
    CHECK(run_cli({}) == 2);
    CHECK(run_cli({"no-such-command"}) == 2);
    CHECK(run_cli({"thresholds", "--r", "0.5"}) == 2);  // missing required --d-g
    // unreadable inputs are distinct from bad parameters
    CHECK(run_cli({"simulate", "--config", "/no/such/file"}) == 3);
    CHECK(run_cli({"maxconn", "--bundle", "/no/such/bundle", "--alpha", "0.5", "--p", "0.1"}) ==
          3);
}
