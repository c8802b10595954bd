#include "qem/formulas.hpp"

#include <cmath>
#include <sstream>

#include "qem/errors.hpp"

namespace qem {

double c_graph(int d_g) {
    if (d_g < 3) throw DomainError("c_graph requires degree >= 3");
    double d = static_cast<double>(d_g);
    return std::log((d - 1.0) * std::pow(1.0 + 1.0 / (d - 2.0), d - 2.0));
}

double alpha_max(double r, double delta_a) {
    if (r <= 0.0 || r > 1.0) throw DomainError("alpha_max requires 0 < r <= 1");
    if (delta_a < 0.0) throw DomainError("alpha_max requires delta_a >= 0");
    double x = 0.5 * r * (1.0 - 8.0 * delta_a);
    return x / (x + 1.0);
}

double c_prime(double r, double delta_a, double gamma_a) {
    if (r <= 0.0 || r > 1.0) throw DomainError("c_prime requires 0 < r <= 1");
    if (delta_a < 0.0) throw DomainError("c_prime requires delta_a >= 0");
    if (gamma_a < 0.0 || gamma_a > 1.0) throw DomainError("c_prime requires gamma_a in [0,1]");
    double u = r * (1.0 - 8.0 * delta_a);
    return u / (4.0 + 2.0 * u) * gamma_a * r * r / std::sqrt(1.0 + r * r);
}

double p_threshold(double r, int d_g) {
    if (r <= 0.0 || r > 1.0) throw DomainError("p_threshold requires 0 < r <= 1");
    return std::exp(-808.0 * (1.0 + 3.0 * r / 8.0) * c_graph(d_g) / (300.0 * r));
}

double p_threshold_general(double alpha, double c_graph_value) {
    if (alpha <= 0.0) throw DomainError("p_threshold_general requires alpha > 0");
    return std::exp(-101.0 * c_graph_value / (100.0 * alpha));
}

double rate_bound(double r) {
    if (r <= 0.0 || r > 1.0) throw DomainError("rate_bound requires 0 < r <= 1");
    return (1.0 - r) * (1.0 - r) / (1.0 + r * r);
}

double kl_bernoulli(double a, double b) {
    if (a < 0.0 || a > 1.0 || b < 0.0 || b > 1.0)
        throw DomainError("kl_bernoulli arguments must lie in [0,1]");
    if ((b == 0.0 && a != 0.0) || (b == 1.0 && a != 1.0))
        throw DomainError("kl_bernoulli: reference at {0,1} only defined when a matches");
    double t = 0.0;
    if (a > 0.0) t += a * std::log(a / b);
    if (a < 1.0) t += (1.0 - a) * std::log((1.0 - a) / (1.0 - b));
    return t;
}

ChernoffBound chernoff_alpha_bound(double set_size, double alpha, double p_eff) {
    if (set_size < 0.0) throw DomainError("chernoff_alpha_bound requires set_size >= 0");
    if (alpha <= p_eff) return {1.0, true};
    return {std::exp(-set_size * kl_bernoulli(alpha, p_eff)), false};
}

double chazottes_bound(double t, double d_norm_sq, double dg_norm_sq) {
    if (t < 0.0) throw DomainError("chazottes_bound requires t >= 0");
    if (d_norm_sq <= 0.0 || dg_norm_sq <= 0.0)
        throw DomainError("chazottes_bound requires positive norms");
    return std::exp(-2.0 * t * t / (d_norm_sq * dg_norm_sq));
}

double lemma_tail(double c_coeff, double n, double eps_g, double gamma_corr) {
    if (c_coeff <= 0.0) throw DomainError("lemma_tail requires c_coeff > 0");
    if (n < 3.0) throw DomainError("lemma_tail requires n >= 3");
    if (!(gamma_corr >= 0.0 && gamma_corr < eps_g && eps_g <= 0.5))
        throw DomainError("lemma_tail requires 0 <= gamma_corr < eps_g <= 1/2");
    double ln_n = std::log(n);
    return std::exp(-c_coeff * std::pow(n, 2.0 * (eps_g - gamma_corr)) / (ln_n * ln_n));
}

ThresholdReport make_threshold_report(double r, double delta_a, double gamma_a, int d_g,
                                      double eps_g, double gamma_corr) {
    ThresholdReport rep;
    rep.r = r;
    rep.delta_a = delta_a;
    rep.gamma_a = gamma_a;
    rep.d_g = d_g;
    rep.eps_g = eps_g;
    rep.gamma_corr = gamma_corr;
    rep.c_graph_value = c_graph(d_g);
    rep.alpha = alpha_max(r, delta_a);
    rep.alpha_usable = alpha_is_usable(rep.alpha);
    rep.p_th = p_threshold(r, d_g);
    rep.p_th_general = rep.alpha_usable ? p_threshold_general(rep.alpha, rep.c_graph_value) : 0.0;
    rep.rate = rate_bound(r);
    rep.c_prime_coeff = c_prime(r, delta_a, gamma_a);
    rep.c1 = rep.c_prime_coeff * rep.c_graph_value / 100.0;
    rep.b4 = eps_g - gamma_corr;
    return rep;
}

std::string ThresholdReport::to_text() const {
    std::ostringstream os;
    os.precision(12);
    os << "threshold report\n";
    os << "  r           " << r << "\n";
    os << "  delta_A     " << delta_a << "\n";
    os << "  gamma_A     " << gamma_a << "\n";
    os << "  d_G         " << d_g << "\n";
    os << "  C_G         " << c_graph_value << "\n";
    os << "  alpha       " << alpha << (alpha_usable ? "" : "  (not usable)") << "\n";
    os << "  c_prime     " << c_prime_coeff << "\n";
    os << "  p_th        " << p_th << "\n";
    os << "  p_th_gen    " << p_th_general << "\n";
    os << "  rate_bound  " << rate << "\n";
    os << "  C_1         " << c1 << "\n";
    os << "  b_4         " << b4 << "\n";
    return os.str();
}

std::string ThresholdReport::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{"
       << "\"r\":" << r << ",\"delta_a\":" << delta_a << ",\"gamma_a\":" << gamma_a
       << ",\"d_g\":" << d_g << ",\"c_graph\":" << c_graph_value << ",\"alpha\":" << alpha
       << ",\"alpha_usable\":" << (alpha_usable ? "true" : "false")
       << ",\"c_prime\":" << c_prime_coeff << ",\"p_th\":" << p_th
       << ",\"p_th_general\":" << p_th_general << ",\"rate_bound\":" << rate
       << ",\"c1\":" << c1 << ",\"b4\":" << b4 << "}";
    return os.str();
}

}  // namespace qem
