#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qem/gf2.hpp"
#include "qem/rng.hpp"

namespace qem {

// Hidden spatial Markov field: J_1..J_n is a finite-alphabet chain with the
// given initial law and one-step kernel. Between phases the field is either
// redrawn ("fresh") or held with probability q_hold ("lazy").
struct HiddenFieldSpec {
    enum class Temporal { fresh, lazy };

    unsigned alphabet = 2;
    std::vector<double> init;    // length m
    std::vector<double> kernel;  // m*m row-major, kernel[a*m+b] = P(a -> b)
    Temporal temporal = Temporal::fresh;
    double q_hold = 0.0;
    bool stationary_declared = true;

    double k(unsigned a, unsigned b) const { return kernel[a * alphabet + b]; }

    // Throws ParameterError on malformed laws; if stationary_declared, also
    // verifies init * kernel = init within 1e-10.
    void validate() const;

    static HiddenFieldSpec two_state_symmetric(double flip_prob,
                                               Temporal temporal = Temporal::fresh,
                                               double q_hold = 0.0);
};

// Per-site error-probability map p_i = g_i(J). Window forms use reflective
// boundary (index -1 maps back to 0, index n maps to n-1).
struct GFamily {
    enum class Form { constant, affine_window, sigmoid_window, global_mean };

    Form form = Form::constant;
    double p_bar = 0.0;
    std::vector<int> window;       // offsets, e.g. {-1,0,1}
    std::vector<double> weights;   // one per offset; global_mean uses weights[0]
    std::vector<double> phi;       // feature value per alphabet state, in [0,1]
    double feature_mean = 0.0;     // E[phi(J)] under the field's marginal
    double c_coeff = 1.0;          // c in c_n = c * n^(-1/2 - eps_g)
    double eps_g = 0.25;
    double gamma_corr = 0.0;
    double sigmoid_offset = 0.0;   // solved by make_* for the sigmoid form

    double c_n(std::size_t n) const;
    // Largest change of any single p_i under a one-coordinate change of J.
    double coordinate_sensitivity(std::size_t n) const;
    // sum over coordinates of squared sensitivity of one g_i.
    double dg_norm_sq(std::size_t n) const;

    static GFamily constant(double p_bar);
    static GFamily affine(const HiddenFieldSpec& field, double p_bar, std::vector<int> window,
                          std::vector<double> weights, double c_coeff, double eps_g,
                          double gamma_corr);
    // Solves the logistic offset so that the interior-site stationary mean
    // equals p_bar to 1e-9. Requires a stationary field spec.
    static GFamily sigmoid(const HiddenFieldSpec& field, double p_bar, std::vector<int> window,
                           std::vector<double> weights, double c_coeff, double eps_g,
                           double gamma_corr);
    static GFamily global_mean(const HiddenFieldSpec& field, double p_bar, double coefficient,
                               double c_coeff, double eps_g, double gamma_corr);

    void validate(unsigned alphabet) const;
};

// One field sample of length n.
std::vector<std::uint8_t> sample_field(const HiddenFieldSpec& spec, std::size_t n, Rng& rng);

// Phase-to-phase update in place.
void evolve_field(const HiddenFieldSpec& spec, std::vector<std::uint8_t>& field, Rng& rng);

// p_i for every site; audits the realized per-coordinate sensitivity against
// c_n and throws ParameterError if the declared Lipschitz budget is violated.
std::vector<double> error_probabilities(const GFamily& g, const std::vector<std::uint8_t>& field);

BitVector sample_errors(const std::vector<double>& p, Rng& rng);

// max_i p_i <= p_bar + 1/ln(n); requires n >= 3.
bool a_j_event_check(const GFamily& g, const std::vector<std::uint8_t>& field);

// Coupling structure of the chain: D[i][j] is the worst-case total-variation
// distance between the laws of J_j conditioned on two values of J_i; V_i sums
// row i without the diagonal; d_norm is the operator norm of the
// upper-triangular part (unit diagonal included), the norm the concentration
// bound consumes.
struct CorrelationReport {
    std::size_t n = 0;
    Eigen::MatrixXd d;
    std::vector<double> v;
    double d_norm = 0.0;
    double d_norm_sq() const { return d_norm * d_norm; }
};

CorrelationReport coupling_matrix(const HiddenFieldSpec& spec, std::size_t n);

// Monte Carlo covariance of the error indicators at small lags, plus the
// weight-variance ratio var(|E|)/n.
struct CovReport {
    std::size_t n = 0, samples = 0;
    std::vector<double> cov;  // index = lag, starting at 0 (variance)
    std::vector<double> se;
    double mean_rate = 0.0;
    double weight_var_over_n = 0.0;
};

CovReport empirical_cov(const HiddenFieldSpec& spec, const GFamily& g, std::size_t n,
                        std::size_t samples, std::size_t max_lag, std::uint64_t seed);

}  // namespace qem
