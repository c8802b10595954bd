#include "qem/noise.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "qem/errors.hpp"

namespace qem {

namespace {

std::size_t reflect(long long i, std::size_t n) {
    const long long m = static_cast<long long>(n);
    while (i < 0 || i >= m) {
        if (i < 0) i = -i - 1;
        if (i >= m) i = 2 * m - 1 - i;
    }
    return static_cast<std::size_t>(i);
}

double phi_spread(const std::vector<double>& phi) {
    auto [lo, hi] = std::minmax_element(phi.begin(), phi.end());
    return *hi - *lo;
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

unsigned draw_categorical(const double* law, unsigned m, Rng& rng) {
    double u = rng.next_double();
    double acc = 0.0;
    for (unsigned a = 0; a + 1 < m; ++a) {
        acc += law[a];
        if (u < acc) return a;
    }
    return m - 1;
}

}  // namespace

void HiddenFieldSpec::validate() const {
    if (alphabet < 2 || alphabet > 16) throw ParameterError("field alphabet must be in [2,16]");
    if (init.size() != alphabet) throw ParameterError("init law has wrong length");
    if (kernel.size() != static_cast<std::size_t>(alphabet) * alphabet)
        throw ParameterError("kernel has wrong shape");
    double s = 0.0;
    for (double x : init) {
        if (!(x >= 0.0)) throw ParameterError("init law has a negative entry");
        s += x;
    }
    if (std::abs(s - 1.0) > 1e-12) throw ParameterError("init law does not sum to 1");
    for (unsigned a = 0; a < alphabet; ++a) {
        double rs = 0.0;
        for (unsigned b = 0; b < alphabet; ++b) {
            if (!(k(a, b) >= 0.0)) throw ParameterError("kernel has a negative entry");
            rs += k(a, b);
        }
        if (std::abs(rs - 1.0) > 1e-12) throw ParameterError("kernel row does not sum to 1");
    }
    if (temporal == Temporal::lazy && !(q_hold >= 0.0 && q_hold <= 1.0))
        throw ParameterError("q_hold must lie in [0,1]");
    if (stationary_declared) {
        for (unsigned b = 0; b < alphabet; ++b) {
            double nb = 0.0;
            for (unsigned a = 0; a < alphabet; ++a) nb += init[a] * k(a, b);
            if (std::abs(nb - init[b]) > 1e-10)
                throw ParameterError("declared stationary law is not kernel-invariant");
        }
    }
}

HiddenFieldSpec HiddenFieldSpec::two_state_symmetric(double flip_prob, Temporal temporal,
                                                     double q_hold) {
    if (!(flip_prob >= 0.0 && flip_prob <= 1.0))
        throw ParameterError("flip probability must lie in [0,1]");
    HiddenFieldSpec s;
    s.alphabet = 2;
    s.init = {0.5, 0.5};
    s.kernel = {1.0 - flip_prob, flip_prob, flip_prob, 1.0 - flip_prob};
    s.temporal = temporal;
    s.q_hold = q_hold;
    s.stationary_declared = true;
    return s;
}

double GFamily::c_n(std::size_t n) const {
    return c_coeff * std::pow(static_cast<double>(n), -0.5 - eps_g);
}

void GFamily::validate(unsigned alphabet) const {
    if (!(p_bar >= 0.0 && p_bar <= 1.0)) throw ParameterError("p_bar must lie in [0,1]");
    if (!(c_coeff > 0.0)) throw ParameterError("lipschitz coefficient must be positive");
    if (!(eps_g > 0.0 && eps_g <= 0.5)) throw ParameterError("eps_g must lie in (0, 1/2]");
    if (!(gamma_corr >= 0.0 && gamma_corr < eps_g))
        throw ParameterError("gamma_corr must lie in [0, eps_g)");
    if (form == Form::constant) return;
    if (phi.size() != alphabet) throw ParameterError("feature map has wrong length");
    for (double x : phi)
        if (!(x >= 0.0 && x <= 1.0)) throw ParameterError("feature values must lie in [0,1]");
    if (form == Form::global_mean) {
        if (weights.size() != 1) throw ParameterError("global-mean form takes one coefficient");
        return;
    }
    if (window.empty() || window.size() > 16) throw ParameterError("window size must be in [1,16]");
    if (window.size() != weights.size()) throw ParameterError("window/weights length mismatch");
    std::vector<int> w = window;
    std::sort(w.begin(), w.end());
    if (std::adjacent_find(w.begin(), w.end()) != w.end())
        throw ParameterError("window offsets must be distinct");
}

// Exact worst case over sites of the weight mass any single hidden coordinate
// can receive; reflection near the boundary can alias two offsets onto the
// same coordinate, so this is computed by direct scan rather than max|w_k|.
static double worst_aliased_weight(const GFamily& g, std::size_t n) {
    double worst = 0.0;
    std::map<std::size_t, double> mass;
    for (std::size_t i = 0; i < n; ++i) {
        mass.clear();
        for (std::size_t t = 0; t < g.window.size(); ++t)
            mass[reflect(static_cast<long long>(i) + g.window[t], n)] += std::abs(g.weights[t]);
        for (const auto& [j, w] : mass) worst = std::max(worst, w);
        // interior sites all look alike; once the window clears both edges the
        // scan can stop after mirroring to the right edge
        if (i > g.window.size() && i + 2 * g.window.size() < n) {
            i = n - 2 * g.window.size() - 1;
        }
    }
    return worst;
}

double GFamily::coordinate_sensitivity(std::size_t n) const {
    if (form == Form::constant) return 0.0;
    const double dphi = phi_spread(phi);
    if (form == Form::global_mean)
        return std::abs(weights[0]) * dphi / static_cast<double>(n);
    const double slope = form == Form::sigmoid_window ? 0.25 : 1.0;
    return worst_aliased_weight(*this, n) * dphi * slope;
}

double GFamily::dg_norm_sq(std::size_t n) const {
    if (form == Form::constant) return 0.0;
    const double dphi = phi_spread(phi);
    if (form == Form::global_mean) {
        const double s = std::abs(weights[0]) * dphi / static_cast<double>(n);
        return static_cast<double>(n) * s * s;
    }
    const double slope = form == Form::sigmoid_window ? 0.25 : 1.0;
    double worst = 0.0;
    std::map<std::size_t, double> mass;
    for (std::size_t i = 0; i < n; ++i) {
        mass.clear();
        for (std::size_t t = 0; t < window.size(); ++t)
            mass[reflect(static_cast<long long>(i) + window[t], n)] += std::abs(weights[t]);
        double sq = 0.0;
        for (const auto& [j, w] : mass) sq += (w * dphi * slope) * (w * dphi * slope);
        worst = std::max(worst, sq);
        if (i > window.size() && i + 2 * window.size() < n) i = n - 2 * window.size() - 1;
    }
    return worst;
}

GFamily GFamily::constant(double p_bar) {
    GFamily g;
    g.form = Form::constant;
    g.p_bar = p_bar;
    g.validate(2);
    return g;
}

static std::vector<double> default_phi(unsigned m) {
    std::vector<double> phi(m);
    for (unsigned a = 0; a < m; ++a) phi[a] = m > 1 ? static_cast<double>(a) / (m - 1) : 0.0;
    return phi;
}

static double marginal_feature_mean(const HiddenFieldSpec& field, const std::vector<double>& phi) {
    double mu = 0.0;
    for (unsigned a = 0; a < field.alphabet; ++a) mu += field.init[a] * phi[a];
    return mu;
}

GFamily GFamily::affine(const HiddenFieldSpec& field, double p_bar, std::vector<int> window,
                        std::vector<double> weights, double c_coeff, double eps_g,
                        double gamma_corr) {
    field.validate();
    GFamily g;
    g.form = Form::affine_window;
    g.p_bar = p_bar;
    g.window = std::move(window);
    g.weights = std::move(weights);
    g.phi = default_phi(field.alphabet);
    g.feature_mean = marginal_feature_mean(field, g.phi);
    g.c_coeff = c_coeff;
    g.eps_g = eps_g;
    g.gamma_corr = gamma_corr;
    g.validate(field.alphabet);
    return g;
}

GFamily GFamily::global_mean(const HiddenFieldSpec& field, double p_bar, double coefficient,
                             double c_coeff, double eps_g, double gamma_corr) {
    field.validate();
    GFamily g;
    g.form = Form::global_mean;
    g.p_bar = p_bar;
    g.weights = {coefficient};
    g.phi = default_phi(field.alphabet);
    g.feature_mean = marginal_feature_mean(field, g.phi);
    g.c_coeff = c_coeff;
    g.eps_g = eps_g;
    g.gamma_corr = gamma_corr;
    g.validate(field.alphabet);
    return g;
}

GFamily GFamily::sigmoid(const HiddenFieldSpec& field, double p_bar, std::vector<int> window,
                         std::vector<double> weights, double c_coeff, double eps_g,
                         double gamma_corr) {
    field.validate();
    if (!field.stationary_declared)
        throw ParameterError("sigmoid recentering needs a stationary field");
    if (!(p_bar > 0.0 && p_bar < 1.0))
        throw ParameterError("sigmoid form needs p_bar strictly inside (0,1)");
    GFamily g;
    g.form = Form::sigmoid_window;
    g.p_bar = p_bar;
    g.window = std::move(window);
    g.weights = std::move(weights);
    g.phi = default_phi(field.alphabet);
    g.feature_mean = marginal_feature_mean(field, g.phi);
    g.c_coeff = c_coeff;
    g.eps_g = eps_g;
    g.gamma_corr = gamma_corr;
    g.validate(field.alphabet);

    // Enumerate the joint law of the hidden states across the window span and
    // solve E[logistic(theta + sum_k w_k (phi - mu))] = p_bar by bisection.
    const int lo = *std::min_element(g.window.begin(), g.window.end());
    const int hi = *std::max_element(g.window.begin(), g.window.end());
    const unsigned span = static_cast<unsigned>(hi - lo + 1);
    const unsigned m = field.alphabet;
    double configs = std::pow(static_cast<double>(m), static_cast<double>(span));
    if (configs > 2e6)
        throw ResourceError("sigmoid recentering span too wide to enumerate", 0);
    const std::size_t total = static_cast<std::size_t>(configs);

    std::vector<std::pair<double, double>> atoms;  // (probability, linear part)
    atoms.reserve(total);
    std::vector<unsigned> x(span, 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        for (unsigned t = 0; t < span; ++t) {
            x[t] = static_cast<unsigned>(rem % m);
            rem /= m;
        }
        double pr = field.init[x[0]];
        for (unsigned t = 0; t + 1 < span; ++t) pr *= field.k(x[t], x[t + 1]);
        if (pr == 0.0) continue;
        double s = 0.0;
        for (std::size_t t = 0; t < g.window.size(); ++t)
            s += g.weights[t] * (g.phi[x[static_cast<unsigned>(g.window[t] - lo)]] - g.feature_mean);
        atoms.emplace_back(pr, s);
    }
    auto mean_at = [&](double theta) {
        double e = 0.0;
        for (const auto& [pr, s] : atoms) e += pr * logistic(theta + s);
        return e;
    };
    double a = -60.0, b = 60.0;
    if (mean_at(a) > p_bar || mean_at(b) < p_bar)
        throw ParameterError("sigmoid recentering has no solution in range");
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (a + b);
        (mean_at(mid) < p_bar ? a : b) = mid;
    }
    g.sigmoid_offset = 0.5 * (a + b);
    if (std::abs(mean_at(g.sigmoid_offset) - p_bar) > 1e-9)
        throw ParameterError("sigmoid recentering failed to converge");
    return g;
}

std::vector<std::uint8_t> sample_field(const HiddenFieldSpec& spec, std::size_t n, Rng& rng) {
    if (n == 0) throw ParameterError("field length must be positive");
    std::vector<std::uint8_t> field(n);
    field[0] = static_cast<std::uint8_t>(draw_categorical(spec.init.data(), spec.alphabet, rng));
    for (std::size_t i = 1; i < n; ++i)
        field[i] = static_cast<std::uint8_t>(
            draw_categorical(spec.kernel.data() + field[i - 1] * spec.alphabet, spec.alphabet, rng));
    return field;
}

void evolve_field(const HiddenFieldSpec& spec, std::vector<std::uint8_t>& field, Rng& rng) {
    if (spec.temporal == HiddenFieldSpec::Temporal::lazy && rng.next_double() < spec.q_hold) return;
    field = sample_field(spec, field.size(), rng);
}

std::vector<double> error_probabilities(const GFamily& g, const std::vector<std::uint8_t>& field) {
    const std::size_t n = field.size();
    if (n == 0) throw ParameterError("empty field");
    const double sens = g.coordinate_sensitivity(n);
    if (sens > g.c_n(n) + 1e-15)
        throw ParameterError("family violates its declared per-coordinate Lipschitz budget");

    std::vector<double> p(n, g.p_bar);
    switch (g.form) {
        case GFamily::Form::constant:
            break;
        case GFamily::Form::affine_window:
            for (std::size_t i = 0; i < n; ++i) {
                double s = g.p_bar;
                for (std::size_t t = 0; t < g.window.size(); ++t)
                    s += g.weights[t] *
                         (g.phi[field[reflect(static_cast<long long>(i) + g.window[t], n)]] -
                          g.feature_mean);
                p[i] = std::clamp(s, 0.0, 1.0);
            }
            break;
        case GFamily::Form::sigmoid_window:
            for (std::size_t i = 0; i < n; ++i) {
                double s = g.sigmoid_offset;
                for (std::size_t t = 0; t < g.window.size(); ++t)
                    s += g.weights[t] *
                         (g.phi[field[reflect(static_cast<long long>(i) + g.window[t], n)]] -
                          g.feature_mean);
                p[i] = logistic(s);
            }
            break;
        case GFamily::Form::global_mean: {
            double avg = 0.0;
            for (std::size_t i = 0; i < n; ++i) avg += g.phi[field[i]];
            avg /= static_cast<double>(n);
            const double v = std::clamp(g.p_bar + g.weights[0] * (avg - g.feature_mean), 0.0, 1.0);
            std::fill(p.begin(), p.end(), v);
            break;
        }
    }
    return p;
}

BitVector sample_errors(const std::vector<double>& p, Rng& rng) {
    BitVector e(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        if (rng.bernoulli(p[i])) e.set(i);
    return e;
}

bool a_j_event_check(const GFamily& g, const std::vector<std::uint8_t>& field) {
    const std::size_t n = field.size();
    if (n < 3) throw ParameterError("a_j check needs n >= 3");
    const std::vector<double> p = error_probabilities(g, field);
    const double cap = g.p_bar + 1.0 / std::log(static_cast<double>(n));
    return *std::max_element(p.begin(), p.end()) <= cap;
}

CorrelationReport coupling_matrix(const HiddenFieldSpec& spec, std::size_t n) {
    spec.validate();
    if (n < 2) throw ParameterError("coupling matrix needs n >= 2");
    if (n > 4096) throw ResourceError("coupling matrix capped at n = 4096", 0);
    const unsigned m = spec.alphabet;

    Eigen::MatrixXd P(m, m);
    for (unsigned a = 0; a < m; ++a)
        for (unsigned b = 0; b < m; ++b) P(a, b) = spec.k(a, b);

    // kernel powers and site marginals
    std::vector<Eigen::MatrixXd> pw(n);
    pw[0] = Eigen::MatrixXd::Identity(m, m);
    for (std::size_t t = 1; t < n; ++t) pw[t] = pw[t - 1] * P;
    std::vector<Eigen::VectorXd> mu(n);
    mu[0] = Eigen::VectorXd(m);
    for (unsigned a = 0; a < m; ++a) mu[0](a) = spec.init[a];
    for (std::size_t t = 1; t < n; ++t) mu[t] = P.transpose() * mu[t - 1];

    auto max_tv_rows = [m](const Eigen::MatrixXd& rows, const std::vector<bool>& live) {
        double best = 0.0;
        for (unsigned a = 0; a < m; ++a)
            for (unsigned b = a + 1; b < m; ++b) {
                if (!live[a] || !live[b]) continue;
                double tv = 0.5 * (rows.row(a) - rows.row(b)).cwiseAbs().sum();
                best = std::max(best, tv);
            }
        return best;
    };

    CorrelationReport rep;
    rep.n = n;
    rep.d = Eigen::MatrixXd::Identity(n, n);

    // forward influence depends only on the lag
    std::vector<bool> all_live(m, true);
    std::vector<double> fwd(n, 0.0);
    for (std::size_t lag = 1; lag < n; ++lag) fwd[lag] = max_tv_rows(pw[lag], all_live);

    const bool homogeneous = spec.stationary_declared;
    std::vector<double> bwd(n, 0.0);  // used in the homogeneous case
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (j > i) {
                rep.d(i, j) = fwd[j - i];
                continue;
            }
            const std::size_t lag = i - j;
            if (homogeneous && bwd[lag] > 0.0) {
                rep.d(i, j) = bwd[lag];
                continue;
            }
            // law of J_j given J_i = a, via Bayes on the forward kernel power
            Eigen::MatrixXd cond = Eigen::MatrixXd::Zero(m, m);
            std::vector<bool> live(m, false);
            for (unsigned a = 0; a < m; ++a) {
                if (mu[i](a) <= 0.0) continue;
                live[a] = true;
                for (unsigned h = 0; h < m; ++h) cond(a, h) = mu[j](h) * pw[lag](h, a) / mu[i](a);
            }
            const double tv = max_tv_rows(cond, live);
            rep.d(i, j) = tv;
            if (homogeneous) bwd[lag] = tv;
        }

    rep.v.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) rep.v[i] += rep.d(i, j);

    // operator norm of the upper-triangular part (unit diagonal kept)
    Eigen::MatrixXd u = rep.d.triangularView<Eigen::Upper>();
    Eigen::VectorXd x = Eigen::VectorXd::Ones(n).normalized();
    double sigma = 0.0;
    for (int it = 0; it < 300; ++it) {
        Eigen::VectorXd y = u * x;
        sigma = y.norm();
        x = u.transpose() * y;
        double nx = x.norm();
        if (nx == 0.0) break;
        x /= nx;
    }
    rep.d_norm = sigma;
    return rep;
}

CovReport empirical_cov(const HiddenFieldSpec& spec, const GFamily& g, std::size_t n,
                        std::size_t samples, std::size_t max_lag, std::uint64_t seed) {
    spec.validate();
    if (samples < 2) throw ParameterError("need at least 2 samples");
    if (max_lag >= n) throw ParameterError("max_lag must be below n");
    Rng rng(seed);

    std::vector<BitVector> draws;
    draws.reserve(samples);
    std::vector<double> site_mean(n, 0.0);
    double wsum = 0.0, wsq = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        auto field = sample_field(spec, n, rng);
        auto p = error_probabilities(g, field);
        BitVector e = sample_errors(p, rng);
        const double w = static_cast<double>(e.weight());
        wsum += w;
        wsq += w * w;
        for (std::size_t i : e.support()) site_mean[i] += 1.0;
        draws.push_back(std::move(e));
    }
    const double ns = static_cast<double>(samples);
    for (double& v : site_mean) v /= ns;

    CovReport rep;
    rep.n = n;
    rep.samples = samples;
    rep.mean_rate = wsum / (ns * static_cast<double>(n));
    rep.weight_var_over_n =
        (wsq / ns - (wsum / ns) * (wsum / ns)) * ns / (ns - 1.0) / static_cast<double>(n);

    rep.cov.assign(max_lag + 1, 0.0);
    rep.se.assign(max_lag + 1, 0.0);
    std::vector<double> z(samples);
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        const std::size_t pairs = n - lag;
        for (std::size_t s = 0; s < samples; ++s) {
            double acc = 0.0;
            const BitVector& e = draws[s];
            for (std::size_t i = 0; i < pairs; ++i)
                acc += (static_cast<double>(e.get(i)) - site_mean[i]) *
                       (static_cast<double>(e.get(i + lag)) - site_mean[i + lag]);
            z[s] = acc / static_cast<double>(pairs);
        }
        double mz = 0.0;
        for (double v : z) mz += v;
        mz /= ns;
        double var = 0.0;
        for (double v : z) var += (v - mz) * (v - mz);
        var /= (ns - 1.0);
        rep.cov[lag] = mz * ns / (ns - 1.0);
        rep.se[lag] = std::sqrt(var / ns);
    }
    return rep;
}

}  // namespace qem
