#pragma once

#include <iosfwd>
#include <optional>
#include <string>

namespace qem {

// Closed-form quantities for expander-product memories under correlated
// noise. All of these are direct formula evaluations; anything empirical
// lives in the simulation modules.

// c_graph(d) = ln((d-1) (1 + 1/(d-2))^(d-2)); requires integer degree d >= 3.
double c_graph(int d_g);

// alpha(r, delta) = (r/2)(1-8 delta) / ((r/2)(1-8 delta) + 1).
// Returns the raw formula value; it is <= 0 once delta >= 1/8, and callers
// that need a usable ratio must check alpha_is_usable().
double alpha_max(double r, double delta_a);
inline bool alpha_is_usable(double alpha) { return alpha > 0.0 && alpha < 1.0; }

// c'(r, delta, gamma) = [r(1-8d)/(4+2r(1-8d))] * gamma * r^2/sqrt(1+r^2).
double c_prime(double r, double delta_a, double gamma_a);

// p_th(r, d_G) = exp(-808 (1+3r/8) c_graph(d_G) / (300 r)).
double p_threshold(double r, int d_g);

// exp(-101 c_graph_value / (100 alpha)); the tolerated-error form the
// specialized p_threshold reduces to at delta = 1/32.
double p_threshold_general(double alpha, double c_graph_value);

// k/n >= (1-r)^2 / (1+r^2) for full-rank seeds.
double rate_bound(double r);

// KL(a||b) for Bernoulli parameters; a in [0,1], b in (0,1) unless a == b
// at an endpoint (where the divergence is 0 or +inf by convention; endpoint
// b with a != b is a domain error).
double kl_bernoulli(double a, double b);

struct ChernoffBound {
    double value;
    bool vacuous;  // alpha <= p_eff: the bound degenerates to 1
};
// exp(-set_size * KL(alpha || p_eff)) when alpha > p_eff, else {1, vacuous}.
ChernoffBound chernoff_alpha_bound(double set_size, double alpha, double p_eff);

// Concentration bound exp(-2 t^2 / (d_norm_sq * dg_norm_sq)).
double chazottes_bound(double t, double d_norm_sq, double dg_norm_sq);

// Field-regularity tail exp(-c n^{2(eps-gamma)} / (ln n)^2), keeping the
// polylog factor explicit. Requires 0 <= gamma < eps <= 1/2 and n >= 3.
double lemma_tail(double c_coeff, double n, double eps_g, double gamma_corr);

// All threshold-related quantities for one parameter point, plus derived
// simulation constants.
struct ThresholdReport {
    // inputs
    double r = 0, delta_a = 0, gamma_a = 0;
    int d_g = 0;
    double eps_g = 0, gamma_corr = 0, c_prime_coeff = 0;  // c_prime_coeff = c' itself
    // derived
    double c_graph_value = 0;
    double alpha = 0;
    bool alpha_usable = false;
    double p_th = 0;          // specialized form
    double p_th_general = 0;  // general form at this alpha
    double rate = 0;
    double c1 = 0;  // c' * c_graph / 100, the sqrt(n) recursion-rate constant
    double b4 = 0;  // eps_g - gamma_corr, the field-tail exponent

    std::string to_text() const;  // aligned human-readable block
    std::string to_json() const;
};

ThresholdReport make_threshold_report(double r, double delta_a, double gamma_a, int d_g,
                                      double eps_g, double gamma_corr);

}  // namespace qem
