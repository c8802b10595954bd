#include "qem/config.hpp"

#include <fstream>
#include <set>

#include "qem/errors.hpp"
#include "qem/formulas.hpp"

namespace qem {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ParameterError("config section '" + where + "' must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ParameterError("unknown key '" + it.key() + "' in config section '" + where +
                                 "'");
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw ParameterError(std::string("config key '") + key + "' has the wrong type");
    }
}

}  // namespace

Config parse_config(const nlohmann::json& j) {
    check_keys(j, "(root)", {"code", "field", "noise", "sim"});
    Config c;

    if (j.contains("code")) {
        const json& jc = j.at("code");
        check_keys(jc, "code",
                   {"n_bits", "d_bits", "d_checks", "seed", "delta_a", "gamma_a"});
        c.n_bits = get_or<std::size_t>(jc, "n_bits", c.n_bits);
        c.d_bits = get_or<unsigned>(jc, "d_bits", c.d_bits);
        c.d_checks = get_or<unsigned>(jc, "d_checks", c.d_checks);
        c.code_seed = get_or<std::uint64_t>(jc, "seed", c.code_seed);
        c.delta_a = get_or<double>(jc, "delta_a", c.delta_a);
        c.gamma_a = get_or<double>(jc, "gamma_a", c.gamma_a);
    }

    c.field = HiddenFieldSpec::two_state_symmetric(0.1);
    if (j.contains("field")) {
        const json& jf = j.at("field");
        check_keys(jf, "field",
                   {"alphabet", "flip_prob", "init", "kernel", "temporal", "q_hold",
                    "stationary"});
        const std::string temporal = get_or<std::string>(jf, "temporal", "fresh");
        if (temporal != "fresh" && temporal != "lazy")
            throw ParameterError("field.temporal must be 'fresh' or 'lazy'");
        const auto mode = temporal == "fresh" ? HiddenFieldSpec::Temporal::fresh
                                              : HiddenFieldSpec::Temporal::lazy;
        const double q_hold = get_or<double>(jf, "q_hold", 0.0);
        if (jf.contains("init") || jf.contains("kernel")) {
            if (!jf.contains("init") || !jf.contains("kernel"))
                throw ParameterError("field needs both init and kernel (or neither)");
            HiddenFieldSpec s;
            s.init = jf.at("init").get<std::vector<double>>();
            s.alphabet = static_cast<unsigned>(s.init.size());
            const json& jk = jf.at("kernel");
            if (!jk.is_array() || jk.size() != s.alphabet)
                throw ParameterError("field.kernel must be a square row array");
            for (const auto& row : jk) {
                auto r = row.get<std::vector<double>>();
                if (r.size() != s.alphabet)
                    throw ParameterError("field.kernel must be a square row array");
                s.kernel.insert(s.kernel.end(), r.begin(), r.end());
            }
            s.temporal = mode;
            s.q_hold = q_hold;
            s.stationary_declared = get_or<bool>(jf, "stationary", false);
            c.field = s;
        } else {
            c.field = HiddenFieldSpec::two_state_symmetric(
                get_or<double>(jf, "flip_prob", 0.1), mode, q_hold);
        }
        if (jf.contains("alphabet") &&
            get_or<unsigned>(jf, "alphabet", 2) != c.field.alphabet)
            throw ParameterError("field.alphabet disagrees with the given laws");
    }
    c.field.validate();

    if (j.contains("noise")) {
        const json& jn = j.at("noise");
        check_keys(jn, "noise",
                   {"family", "p_bar", "window", "weights", "coefficient", "c_coeff", "eps_g",
                    "gamma_corr"});
        c.family = get_or<std::string>(jn, "family", c.family);
        c.p_bar = get_or<double>(jn, "p_bar", c.p_bar);
        c.window = get_or<std::vector<int>>(jn, "window", c.window);
        c.weights = get_or<std::vector<double>>(jn, "weights", c.weights);
        c.coefficient = get_or<double>(jn, "coefficient", c.coefficient);
        c.c_coeff = get_or<double>(jn, "c_coeff", c.c_coeff);
        c.eps_g = get_or<double>(jn, "eps_g", c.eps_g);
        c.gamma_corr = get_or<double>(jn, "gamma_corr", c.gamma_corr);
    }
    if (c.family != "constant" && c.family != "affine" && c.family != "sigmoid" &&
        c.family != "global_mean")
        throw ParameterError("noise.family must be constant|affine|sigmoid|global_mean");

    if (j.contains("sim")) {
        const json& js = j.at("sim");
        check_keys(js, "sim",
                   {"trials", "phases", "seed", "workers", "monitor_alpha", "monitor_coeff",
                    "monitor_node_budget", "monitor_stride", "record_phases"});
        c.sim.trials = get_or<std::size_t>(js, "trials", c.sim.trials);
        c.sim.phases = get_or<std::size_t>(js, "phases", c.sim.phases);
        c.sim.master_seed = get_or<std::uint64_t>(js, "seed", c.sim.master_seed);
        c.sim.workers = get_or<unsigned>(js, "workers", c.sim.workers);
        c.sim.monitor_alpha = get_or<double>(js, "monitor_alpha", c.sim.monitor_alpha);
        c.monitor_coeff = get_or<double>(js, "monitor_coeff", c.monitor_coeff);
        c.sim.monitor_node_budget =
            get_or<std::uint64_t>(js, "monitor_node_budget", c.sim.monitor_node_budget);
        c.sim.monitor_stride_large =
            get_or<std::size_t>(js, "monitor_stride", c.sim.monitor_stride_large);
        c.sim.record_phases = get_or<bool>(js, "record_phases", c.sim.record_phases);
    }

    // build once to surface family mistakes at parse time
    (void)c.build_family();
    return c;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

QuantumExpanderCode Config::build_code_from_config() const {
    return build_code(n_bits, d_bits, d_checks, code_seed, delta_a, gamma_a);
}

GFamily Config::build_family() const {
    if (family == "constant") return GFamily::constant(p_bar);
    if (family == "affine")
        return GFamily::affine(field, p_bar, window, weights, c_coeff, eps_g, gamma_corr);
    if (family == "sigmoid")
        return GFamily::sigmoid(field, p_bar, window, weights, c_coeff, eps_g, gamma_corr);
    if (family == "global_mean")
        return GFamily::global_mean(field, p_bar, coefficient, c_coeff, eps_g, gamma_corr);
    throw ParameterError("unknown noise family: " + family);
}

double Config::monitor_threshold_for(const QuantumExpanderCode& code) const {
    double coeff = monitor_coeff;
    if (coeff < 0.0) coeff = c_prime(code.ratio(), code.delta_a, code.gamma_a);
    return coeff * std::sqrt(static_cast<double>(code.n));
}

nlohmann::json config_json(const Config& c) {
    nlohmann::json j;
    j["code"] = {{"n_bits", c.n_bits},   {"d_bits", c.d_bits},   {"d_checks", c.d_checks},
                 {"seed", c.code_seed},  {"delta_a", c.delta_a}, {"gamma_a", c.gamma_a}};
    nlohmann::json kernel_rows = nlohmann::json::array();
    for (unsigned a = 0; a < c.field.alphabet; ++a) {
        nlohmann::json row = nlohmann::json::array();
        for (unsigned b = 0; b < c.field.alphabet; ++b) row.push_back(c.field.k(a, b));
        kernel_rows.push_back(row);
    }
    j["field"] = {{"alphabet", c.field.alphabet},
                  {"init", c.field.init},
                  {"kernel", kernel_rows},
                  {"temporal", c.field.temporal == HiddenFieldSpec::Temporal::fresh ? "fresh"
                                                                                     : "lazy"},
                  {"q_hold", c.field.q_hold},
                  {"stationary", c.field.stationary_declared}};
    j["noise"] = {{"family", c.family},       {"p_bar", c.p_bar},
                  {"window", c.window},       {"weights", c.weights},
                  {"coefficient", c.coefficient}, {"c_coeff", c.c_coeff},
                  {"eps_g", c.eps_g},         {"gamma_corr", c.gamma_corr}};
    j["sim"] = {{"trials", c.sim.trials},
                {"phases", c.sim.phases},
                {"seed", c.sim.master_seed},
                {"workers", c.sim.workers},
                {"monitor_alpha", c.sim.monitor_alpha},
                {"monitor_coeff", c.monitor_coeff},
                {"monitor_node_budget", c.sim.monitor_node_budget},
                {"monitor_stride", c.sim.monitor_stride_large},
                {"record_phases", c.sim.record_phases}};
    return j;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t config_hash(const Config& c) { return fnv1a64(config_json(c).dump()); }

}  // namespace qem
