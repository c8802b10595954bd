#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "qem/code.hpp"
#include "qem/memory_sim.hpp"
#include "qem/noise.hpp"

namespace qem {

// One experiment description: code construction, hidden-field law, error
// family and simulation settings. Parsed strictly (unknown keys rejected).
struct Config {
    // code
    std::size_t n_bits = 8;
    unsigned d_bits = 3, d_checks = 6;
    std::uint64_t code_seed = 7;
    double delta_a = 0.03125, gamma_a = 0.1;

    HiddenFieldSpec field;

    // error family
    std::string family = "constant";  // constant | affine | sigmoid | global_mean
    double p_bar = 1e-3;
    std::vector<int> window;
    std::vector<double> weights;
    double coefficient = 0.0;  // global_mean
    double c_coeff = 1.0, eps_g = 0.25, gamma_corr = 0.0;

    MemoryParams sim;            // monitor_threshold is derived, see below
    double monitor_coeff = -1.0; // multiplier on sqrt(n); < 0 derives it from
                                 // the code's declared expansion parameters

    QuantumExpanderCode build_code_from_config() const;
    GFamily build_family() const;
    // c' * sqrt(n) with c' either monitor_coeff or the declared-parameter value
    double monitor_threshold_for(const QuantumExpanderCode& code) const;
};

Config parse_config(const nlohmann::json& j);
Config load_config(const std::string& path);

// Canonical JSON image of the parsed config (includes every field, sorted
// keys); hashing this makes runs self-identifying.
nlohmann::json config_json(const Config& c);
std::uint64_t config_hash(const Config& c);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace qem
