// Acceptance suite for the simulator. Each criterion prints exactly one
// PASS/FAIL line (plus indented evidence lines) and enforces its own runtime
// limit; the process exit status is the number of failed criteria.
//
// Usage: qem_acceptance --cli <path to qem_cli> --golden <golden CSV>
//        qem_acceptance --emit-golden-config <path>   (write the pinned
//        reproducibility config and exit; used to regenerate the fixture)

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <sys/wait.h>

#include "qem/adjacency.hpp"
#include "qem/code.hpp"
#include "qem/errors.hpp"
#include "qem/expander.hpp"
#include "qem/formulas.hpp"
#include "qem/gf2.hpp"
#include "qem/memory_sim.hpp"
#include "qem/noise.hpp"
#include "qem/rng.hpp"
#include "qem/ssf.hpp"

namespace fs = std::filesystem;
using namespace qem;

namespace {

// ---------------------------------------------------------------------------
// extended-precision reference implementations (criterion 1 oracle)

namespace oracle {

long double c_graph(int d) {
    const long double m = static_cast<long double>(d - 2);
    return logl(static_cast<long double>(d - 1) * powl(1.0L + 1.0L / m, m));
}

long double alpha_max(long double r, long double delta) {
    const long double x = r * (1.0L - 8.0L * delta) / 2.0L;
    return x / (x + 1.0L);
}

long double c_prime(long double r, long double delta, long double gamma) {
    const long double u = r * (1.0L - 8.0L * delta);
    return u / (4.0L + 2.0L * u) * gamma * r * r / sqrtl(1.0L + r * r);
}

long double p_threshold(long double r, int d) {
    return expl(-808.0L * (1.0L + 3.0L * r / 8.0L) * c_graph(d) / (300.0L * r));
}

long double rate_bound(long double r) {
    return (1.0L - r) * (1.0L - r) / (1.0L + r * r);
}

long double kl(long double a, long double b) {
    long double t = 0.0L;
    if (a > 0.0L) t += a * logl(a / b);
    if (a < 1.0L) t += (1.0L - a) * logl((1.0L - a) / (1.0L - b));
    return t;
}

long double chernoff(long double s, long double alpha, long double p) {
    return expl(-s * kl(alpha, p));
}

long double chazottes(long double t, long double d_sq, long double g_sq) {
    return expl(-2.0L * t * t / (d_sq * g_sq));
}

long double lemma_tail(long double c, long double n, long double eps, long double gam) {
    const long double ln = logl(n);
    return expl(-c * powl(n, 2.0L * (eps - gam)) / (ln * ln));
}

}  // namespace oracle

// ---------------------------------------------------------------------------
// harness

struct Outcome {
    bool pass = false;
    double seconds = 0;
    std::string detail;
};

template <class F>
Outcome run_checked(double limit_s, F&& body) {
    std::ostringstream log;
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        out.pass = body(log);
    } catch (const std::exception& e) {
        log << "    unhandled exception: " << e.what() << "\n";
        out.pass = false;
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (out.pass && limit_s > 0 && out.seconds >= limit_s) {
        log << "    runtime " << out.seconds << " s exceeded the " << limit_s << " s limit\n";
        out.pass = false;
    }
    out.detail = log.str();
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return {};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// criterion 1: nine closed-form functions against the long-double oracle

bool crit_formula_exactness(std::ostream& log) {
    constexpr double rel_tol = 1e-12;
    std::mt19937_64 gen(20260814);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto uni = [&](double lo, double hi) { return lo + (hi - lo) * u01(gen); };

    std::size_t checks = 0, bad = 0;
    auto expect = [&](const char* what, double got, long double want) {
        ++checks;
        if (fabsl(static_cast<long double>(got) - want) > rel_tol * fabsl(want)) {
            ++bad;
            if (bad <= 5)
                log << "    mismatch in " << what << ": got " << got << " want "
                    << static_cast<double>(want) << "\n";
        }
    };

    for (int it = 0; it < 100; ++it) {
        const int d = 3 + static_cast<int>(gen() % 48);  // 3..50
        const double r = uni(0.05, 1.0);
        const double delta = uni(0.0, 0.124);
        const double gamma = uni(0.01, 1.0);
        expect("c_graph", c_graph(d), oracle::c_graph(d));
        expect("alpha_max", alpha_max(r, delta), oracle::alpha_max(r, delta));
        expect("c_prime", c_prime(r, delta, gamma), oracle::c_prime(r, delta, gamma));
        expect("p_threshold", p_threshold(r, d), oracle::p_threshold(r, d));
        expect("rate_bound", rate_bound(r), oracle::rate_bound(r));

        // Divergence arguments are kept at least 0.1 apart: the divergence is
        // quadratic in a-b while the rounding error of its log terms is
        // linear, so no double-precision evaluation can hold a fixed relative
        // tolerance near the diagonal.
        const double lo = uni(0.05, 0.84);
        const double hi = lo + uni(0.1, 0.95 - lo);
        const bool swap = u01(gen) < 0.5;
        const double a = swap ? hi : lo, b = swap ? lo : hi;
        expect("kl_bernoulli", kl_bernoulli(a, b), oracle::kl(a, b));

        const double s = uni(1.0, 100.0);
        const auto ch = chernoff_alpha_bound(s, hi, lo);  // alpha > p_eff: informative branch
        expect("chernoff_alpha_bound", ch.value, oracle::chernoff(s, hi, lo));

        const double t = uni(0.01, 1.0);
        const double d_sq = uni(1.0, 30.0);
        const double g_sq = uni(0.01, 2.0);
        expect("chazottes_bound", chazottes_bound(t, d_sq, g_sq),
               oracle::chazottes(t, d_sq, g_sq));

        const double c = uni(0.1, 2.0);
        const double n = uni(10.0, 1e5);
        const double gam = uni(0.0, 0.2);
        const double eps = gam + uni(0.05, 0.3);
        expect("lemma_tail", lemma_tail(c, n, eps, gam), oracle::lemma_tail(c, n, eps, gam));
    }
    log << "    " << checks << " evaluations over 100 random points, tolerance " << rel_tol
        << " relative, " << bad << " mismatches\n";
    return bad == 0;
}

// ---------------------------------------------------------------------------
// criterion 2: specialized threshold equals the general form at delta = 1/32

bool crit_threshold_identity(std::ostream& log) {
    constexpr double rel_tol = 1e-12;
    std::size_t bad = 0;
    double worst = 0;
    for (int i = 1; i <= 10; ++i) {
        const double r = i / 10.0;
        for (int d : {3, 4, 5, 7, 10, 20, 40}) {
            const double lhs = p_threshold(r, d);
            const double rhs = p_threshold_general(alpha_max(r, 1.0 / 32.0), c_graph(d));
            const double rel = std::fabs(lhs - rhs) / rhs;
            worst = std::max(worst, rel);
            if (rel > rel_tol) {
                ++bad;
                log << "    r=" << r << " d_g=" << d << ": rel diff " << rel << "\n";
            }
        }
    }
    log << "    70 (r, d_g) pairs, worst relative difference " << worst << "\n";
    return bad == 0;
}

// ---------------------------------------------------------------------------
// criterion 3: threshold magnitude window reachable within observed degrees

bool crit_threshold_magnitude(std::ostream& log) {
    struct Pick {
        std::size_t n_bits;
        unsigned d_a, d_b;
    };
    const std::vector<Pick> picks = {{8, 3, 6}, {20, 3, 6}, {12, 4, 8}, {20, 5, 10}};
    unsigned d_min = 0, d_max = 0;
    for (const auto& pk : picks) {
        const auto code = build_code(pk.n_bits, pk.d_a, pk.d_b, 7, 1.0 / 32.0, 0.1);
        const auto graph = build_adjacency(code);
        log << "    built code n=" << code.n << " (degrees " << pk.d_a << "/" << pk.d_b
            << "): connectivity degree d_g=" << graph.max_degree << "\n";
        if (d_min == 0) d_min = graph.max_degree;
        d_min = std::min(d_min, graph.max_degree);
        d_max = std::max(d_max, graph.max_degree);
    }
    const double r = 0.5;
    const double alpha = alpha_max(r, 1.0 / 32.0);
    std::optional<int> lo, hi;
    for (int d = std::max(3u, d_min); d <= static_cast<int>(d_max); ++d) {
        const double p = p_threshold_general(alpha, c_graph(d));
        if (p >= 1e-16 && p <= 1e-15) {
            if (!lo) lo = d;
            hi = d;
        }
    }
    log << "    documented point r=" << r << ", alpha=" << alpha << "; observed degree range ["
        << d_min << ", " << d_max << "]\n";
    if (!lo) {
        log << "    no degree in the observed range lands in [1e-16, 1e-15]\n";
        return false;
    }
    log << "    p_th in [1e-16, 1e-15] for d_g in [" << *lo << ", " << *hi << "]"
        << " (p_th(" << *lo << ")=" << p_threshold_general(alpha, c_graph(*lo)) << ", p_th("
        << *hi << ")=" << p_threshold_general(alpha, c_graph(*hi)) << ")\n";
    return true;
}

// ---------------------------------------------------------------------------
// criterion 4: CSS validity and rate floor on random product builds

bool crit_css_validity(std::ostream& log) {
    std::mt19937_64 gen(404);
    std::vector<std::size_t> half_sizes, two_thirds_sizes;  // n <= 6000 in both pools
    for (std::size_t nb = 8; nb <= 68; nb += 2) half_sizes.push_back(nb);
    for (std::size_t nb = 9; nb <= 63; nb += 3) two_thirds_sizes.push_back(nb);

    std::size_t full_rank = 0, max_n = 0;
    bool ok = true;
    for (int it = 0; it < 50; ++it) {
        const bool half = it % 2 == 0;
        const unsigned d_a = half ? 3 : 4, d_b = 6;
        const auto& pool = half ? half_sizes : two_thirds_sizes;
        const std::size_t nb = pool[gen() % pool.size()];
        const auto g = sample_biregular(nb, d_a, d_b, gen());
        const auto h = tanner_matrix(g);
        const auto code = hypergraph_product(h);
        max_n = std::max(max_n, code.n);

        if (!gf2_product_with_transpose_is_zero(code.h_x, code.h_z)) {
            log << "    H_X H_Z^T != 0 at n_bits=" << nb << "\n";
            ok = false;
        }
        const double rate = static_cast<double>(code.k) / static_cast<double>(code.n);
        const double floor = rate_bound(static_cast<double>(d_a) / d_b);
        if (rate < floor - 1e-12) {
            log << "    rate " << rate << " below floor " << floor << " at n_bits=" << nb << "\n";
            ok = false;
        }
        const std::size_t rk = gf2_rank(h);
        const std::size_t want_k = (nb - rk) * (nb - rk)
                                 + (code.n_checks - rk) * (code.n_checks - rk);
        if (code.k != want_k) {
            log << "    k=" << code.k << " disagrees with rank identity " << want_k
                << " at n_bits=" << nb << "\n";
            ok = false;
        }
        if (rk == h.rows()) ++full_rank;  // rate floor is met with equality here
    }
    log << "    50 builds (largest n=" << max_n << "), " << full_rank
        << " full-rank seeds; orthogonality exact and rate floor held on all\n";
    return ok;
}

// ---------------------------------------------------------------------------
// criterion 5: exact cluster search against 2^n enumeration

bool crit_maxconn_oracle(std::ostream& log) {
    std::mt19937_64 gen(505);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double alphas[3] = {0.3, 0.5, 0.8};

    std::size_t cells = 0;
    bool ok = true;
    for (int it = 0; it < 200 && ok; ++it) {
        const std::uint32_t n = 4 + static_cast<std::uint32_t>(gen() % 15);  // 4..18
        const double mean_deg = 1.5 + 2.5 * u01(gen);
        const double pe = std::min(0.9, mean_deg / (n - 1));
        std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
        for (std::uint32_t u = 0; u < n; ++u)
            for (std::uint32_t v = u + 1; v < n; ++v)
                if (u01(gen) < pe) edges.push_back({u, v});
        const auto g = make_graph(n, edges);

        BitVector errs(n);
        std::uint32_t err_mask = 0;
        for (std::uint32_t i = 0; i < n; ++i)
            if (u01(gen) < 0.3) {
                errs.set(i);
                err_mask |= 1u << i;
            }

        std::vector<std::uint32_t> nbr(n, 0);
        for (std::uint32_t v = 0; v < n; ++v)
            for (std::uint32_t w : g.adj[v]) nbr[v] |= 1u << w;
        auto connected = [&](std::uint32_t mask) {
            std::uint32_t comp = mask & (~mask + 1u), prev = 0;
            while (comp != prev) {
                prev = comp;
                std::uint32_t acc = comp, rest = comp;
                while (rest) {
                    acc |= nbr[std::countr_zero(rest)];
                    rest &= rest - 1;
                }
                comp = acc & mask;
            }
            return comp == mask;
        };

        std::size_t brute[3] = {0, 0, 0};
        for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
            const auto size = static_cast<std::size_t>(std::popcount(mask));
            const auto err = static_cast<std::size_t>(std::popcount(mask & err_mask));
            bool wanted = false;
            // same float comparison the searcher applies
            for (int a = 0; a < 3; ++a)
                wanted |= size > brute[a] &&
                          static_cast<double>(err) >= alphas[a] * static_cast<double>(size);
            if (!wanted || !connected(mask)) continue;
            for (int a = 0; a < 3; ++a)
                if (size > brute[a] &&
                    static_cast<double>(err) >= alphas[a] * static_cast<double>(size))
                    brute[a] = size;
        }

        for (int a = 0; a < 3; ++a) {
            const auto exact = maxconn_exact(g, errs, alphas[a], n);
            const auto greedy = maxconn_greedy(g, errs, alphas[a], n);
            if (exact.value != brute[a]) {
                log << "    exact " << exact.value << " != brute " << brute[a] << " (n=" << n
                    << ", alpha=" << alphas[a] << ", graph " << it << ")\n";
                ok = false;
            }
            if (greedy.value > exact.value) {
                log << "    greedy " << greedy.value << " above exact " << exact.value
                    << " (n=" << n << ", alpha=" << alphas[a] << ")\n";
                ok = false;
            }
            ++cells;
        }
    }
    log << "    " << cells << " (graph, alpha) cells matched the 2^n enumeration;"
        << " greedy never above exact\n";
    return ok;
}

// ---------------------------------------------------------------------------
// criterion 6: connected-set counts under the degree growth bound

bool crit_connected_set_bound(std::ostream& log) {
    struct Fixture {
        std::string name;
        AdjacencyGraph g;
        std::size_t s_max;
    };
    std::vector<Fixture> fixtures;

    fixtures.push_back({"product of the 2-bit repetition check (n=5)",
                        build_adjacency(hypergraph_product(
                            SparseBitMatrix::from_rows(1, 2, {{0, 1}}))),
                        8});
    fixtures.push_back({"product of a (2,3)-biregular Tanner code (n=13)",
                        build_adjacency(hypergraph_product(
                            SparseBitMatrix::from_rows(2, 3, {{0, 1, 2}, {0, 1, 2}}))),
                        8});
    {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
        for (std::uint32_t i = 0; i < 1000; ++i) edges.push_back({i, (i + 1) % 1000});
        for (std::uint32_t i = 0; i < 500; ++i) edges.push_back({i, i + 500});
        fixtures.push_back({"ring plus perfect matching, 3-regular (n=1000)",
                            make_graph(1000, edges), 8});
    }
    {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
        for (std::uint32_t i = 0; i < 300; ++i) {
            edges.push_back({i, (i + 1) % 300});
            edges.push_back({i, (i + 7) % 300});
        }
        fixtures.push_back({"circulant offsets {1,7}, 4-regular (n=300)",
                            make_graph(300, edges), 8});
    }
    // Product-code graphs have degrees in the twenties; the count of
    // connected sets containing a vertex is then astronomically large at
    // s = 8 (the bound alone exceeds 10^14), so these two are enumerated up
    // to the largest feasible sizes.
    fixtures.push_back({"built product code n=80",
                        build_adjacency(build_code(8, 3, 6, 7, 1.0 / 32.0, 0.1)), 4});
    fixtures.push_back({"built product code n=500",
                        build_adjacency(build_code(20, 3, 6, 7, 1.0 / 32.0, 0.1)), 3});

    bool ok = true;
    for (const auto& f : fixtures) {
        const auto cg = f.g.c_g();
        if (!cg) {
            log << "    " << f.name << ": degree below 3, growth constant undefined\n";
            ok = false;
            continue;
        }
        std::uint64_t worst_count = 0;
        double worst_margin = 0;  // count / bound, should stay <= 1
        bool holds = true;
        for (std::uint32_t v = 0; v < f.g.n && holds; ++v) {
            for (std::size_t s = 1; s <= f.s_max; ++s) {
                const auto c = enumerate_connected_sets(f.g, v, s, 200000000ull);
                const double bound = std::exp(*cg * static_cast<double>(s));
                worst_count = std::max(worst_count, c.count);
                worst_margin = std::max(worst_margin, static_cast<double>(c.count) / bound);
                if (static_cast<double>(c.count) > bound) {
                    log << "    " << f.name << ": count " << c.count << " above bound " << bound
                        << " at v=" << v << " s=" << s << "\n";
                    holds = false;
                    ok = false;
                    break;
                }
            }
        }
        log << "    " << f.name << ": d_g=" << f.g.max_degree << ", s<=" << f.s_max
            << ", largest count " << worst_count << ", worst count/bound " << worst_margin
            << (holds ? "" : "  [VIOLATED]") << "\n";
    }
    return ok;
}

// ---------------------------------------------------------------------------
// criterion 7: decoder versus exhaustive lookup on two small products

// Re-derives every step of a decode trace from the public matrices.
bool trace_bookkeeping_ok(const QuantumExpanderCode& code,
                          const std::vector<std::vector<std::uint32_t>>& cols_of_qubit,
                          const BitVector& syndrome, const DecodeResult& res) {
    BitVector cur = syndrome;
    BitVector corr(code.n);
    std::size_t prev_w = cur.weight();
    const std::size_t initial_w = prev_w;
    for (const auto& step : res.trace) {
        if (step.subset_size == 0 ||
            step.subset_size != static_cast<std::size_t>(std::popcount(step.subset_mask)))
            return false;
        if (step.weight_drop < 1) return false;
        const auto& sup = code.h_x.row_support(step.generator);
        if (step.subset_mask >> sup.size()) return false;
        for (std::uint32_t t = 0; t < sup.size(); ++t)
            if ((step.subset_mask >> t) & 1u) {
                const std::uint32_t q = sup[t];
                corr.flip(q);
                for (std::uint32_t c : cols_of_qubit[q]) cur.flip(c);
            }
        if (cur.weight() != step.syndrome_weight_after) return false;
        if (static_cast<long long>(prev_w) - static_cast<long long>(step.syndrome_weight_after) !=
            step.weight_drop)
            return false;
        prev_w = step.syndrome_weight_after;
    }
    if (res.correction != corr) return false;
    if (res.final_weight != prev_w) return false;
    if (res.converged != (prev_w == 0)) return false;
    if (res.iterations() > initial_w) return false;
    return true;
}

template <class F>
void for_each_error_up_to_weight2(std::size_t n, F&& fn) {
    fn(BitVector(n));
    for (std::uint32_t i = 0; i < n; ++i) {
        BitVector e(n);
        e.set(i);
        fn(e);
    }
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j) {
            BitVector e(n);
            e.set(i);
            e.set(j);
            fn(e);
        }
}

bool crit_decoder_oracle(std::ostream& log) {
    struct Case {
        const char* name;
        QuantumExpanderCode code;
    };
    std::vector<Case> cases;
    cases.push_back({"five-qubit product",
                     hypergraph_product(SparseBitMatrix::from_rows(1, 2, {{0, 1}}))});
    cases.push_back({"hamming product",
                     hypergraph_product(SparseBitMatrix::from_rows(
                         3, 7, {{0, 2, 4, 6}, {1, 2, 5, 6}, {3, 4, 5, 6}}))});

    struct Row {
        const char* code;
        std::vector<std::uint32_t> error;
        std::size_t w_ssf, w_lookup;
        bool miscorrected;
    };
    std::vector<Row> disagreements;
    bool ok = true;

    for (const auto& cs : cases) {
        const SsfDecoder dec(cs.code);
        const Gf2Echelon stab(cs.code.h_x);
        const auto cols_of_qubit = cs.code.h_z.column_supports();

        // min-weight representative per syndrome, from the same ascending scan
        std::map<std::vector<std::uint64_t>, BitVector> lookup;
        for_each_error_up_to_weight2(cs.code.n, [&](const BitVector& e) {
            const auto syn = gf2_mul(cs.code.h_z, e);
            lookup.emplace(syn.words(), e);
        });

        std::size_t total = 0, converged = 0, books = 0, disagree = 0, miscorrect = 0;
        for_each_error_up_to_weight2(cs.code.n, [&](const BitVector& e) {
            ++total;
            const auto syn = gf2_mul(cs.code.h_z, e);
            const auto res = dec.decode(syn);
            converged += res.converged;
            books += trace_bookkeeping_ok(cs.code, cols_of_qubit, syn, res);
            if (!res.converged) return;
            const BitVector& ref = lookup.at(syn.words());
            const bool same_coset = stab.contains(res.correction ^ ref);
            const bool logical_residual = !stab.contains(res.correction ^ e);
            miscorrect += logical_residual;
            if (!same_coset) {
                ++disagree;
                if (disagreements.size() < 10)
                    disagreements.push_back({cs.name, e.support(), res.correction.weight(),
                                             ref.weight(), logical_residual});
            }
        });
        log << "    " << cs.name << ": " << total << " errors of weight <= 2, " << converged
            << " converged, bookkeeping exact on " << books << ", coset disagreements "
            << disagree << ", logical residuals " << miscorrect << "\n";
        if (converged != total || books != total) ok = false;
    }

    if (!disagreements.empty()) {
        log << "    coset disagreements (decoder coset != min-weight coset):\n";
        log << "      code                 error        |C_ssf|  |E_min|  logical\n";
        for (const auto& row : disagreements) {
            std::ostringstream sup;
            sup << "{";
            for (std::size_t i = 0; i < row.error.size(); ++i)
                sup << (i ? "," : "") << row.error[i];
            sup << "}";
            char line[128];
            std::snprintf(line, sizeof line, "      %-20s %-12s %-8zu %-8zu %s\n", row.code,
                          sup.str().c_str(), row.w_ssf, row.w_lookup,
                          row.miscorrected ? "yes" : "no");
            log << line;
        }
    }
    return ok;
}

// ---------------------------------------------------------------------------
// criterion 8: sampler calibration and coupling structure

bool crit_noise_calibration(std::ostream& log) {
    bool ok = true;
    const auto field = HiddenFieldSpec::two_state_symmetric(0.1);

    {
        const std::size_t n = 100, samples = 1500;  // 150000 site draws
        const double p_bar = 0.05;
        // weight keeps every p_i inside (0, 0.1): no clamping, so the
        // stationary mean is exactly p_bar
        const double w = 0.01;
        const auto fam = GFamily::affine(field, p_bar, {-1, 0, 1}, {w, w, w}, 1.0, 0.25, 0.0);
        Rng rng(808);
        std::vector<double> means;
        means.reserve(samples);
        for (std::size_t s = 0; s < samples; ++s) {
            const auto J = sample_field(field, n, rng);
            const auto p = error_probabilities(fam, J);
            const auto e = sample_errors(p, rng);
            means.push_back(static_cast<double>(e.weight()) / n);
        }
        double mean = 0;
        for (double m : means) mean += m;
        mean /= samples;
        double var = 0;
        for (double m : means) var += (m - mean) * (m - mean);
        var /= samples - 1;
        const double sigma = std::sqrt(var / samples);
        log << "    empirical rate " << mean << " vs p_bar " << p_bar << " ("
            << n * samples << " draws, |diff| = " << std::fabs(mean - p_bar) / sigma
            << " sigma, allowed 4)\n";
        if (std::fabs(mean - p_bar) > 4 * sigma) ok = false;
    }

    {
        const auto rep = coupling_matrix(field, 21);
        double worst = 0;
        for (int i = 0; i < 21; ++i)
            for (int j = 0; j < 21; ++j)
                worst = std::max(worst, std::fabs(rep.d(i, j) - std::pow(0.8, std::abs(i - j))));
        log << "    coupling matrix vs (1-2q)^|i-j|: worst |diff| " << worst
            << " (allowed 1e-10)\n";
        if (worst > 1e-10) ok = false;
        const double v_mid = rep.v[10];
        log << "    interior coupling-row sum V_11 = " << v_mid << " (expected 7.141)\n";
        if (std::fabs(v_mid - 7.141) > 1e-3) ok = false;
    }
    return ok;
}

// ---------------------------------------------------------------------------
// criterion 9: empirical tail never above the certified concentration bound

bool crit_concentration(std::ostream& log) {
    const auto field = HiddenFieldSpec::two_state_symmetric(0.1);
    bool ok = true;
    for (std::size_t n : {100u, 400u, 1600u}) {
        // weights pinned to a quarter of the declared Lipschitz budget c_n so
        // the audit inside error_probabilities stays satisfied at every n
        const double c_n = std::pow(static_cast<double>(n), -0.75);
        const double w = c_n / 4.0;
        const auto fam = GFamily::affine(field, 0.05, {-1, 0, 1}, {w, w, w}, 1.0, 0.25, 0.0);

        const auto rep = coupling_matrix(field, n);
        const double g_sq = fam.dg_norm_sq(n);
        const double t = 1.0 / std::log(static_cast<double>(n));
        const double bound = chazottes_bound(t, rep.d_norm_sq(), g_sq);
        const double exponent = -2.0 * t * t / (rep.d_norm_sq() * g_sq);

        const std::size_t samples = 10000;
        Rng rng(909 + n);
        std::uint64_t over = 0;
        double max_dev = -1;
        for (std::size_t s = 0; s < samples; ++s) {
            const auto J = sample_field(field, n, rng);
            const auto p = error_probabilities(fam, J);
            for (double pi : p) {
                const double dev = pi - 0.05;
                max_dev = std::max(max_dev, dev);
                over += dev >= t;
            }
        }
        const double tail = static_cast<double>(over) / (samples * n);
        log << "    n=" << n << ": t=1/ln n=" << t << ", max observed deviation " << max_dev
            << ", empirical tail " << tail << ", bound " << bound << " (= exp(" << exponent
            << "))\n";
        if (tail > bound) {
            log << "    empirical tail above the certified bound at n=" << n << "\n";
            ok = false;
        }
    }
    return ok;
}

// ---------------------------------------------------------------------------
// criterion 10: size ladder trends under i.i.d. noise

bool crit_memory_trends(std::ostream& log) {
    const auto field = HiddenFieldSpec::two_state_symmetric(0.1);
    const auto fam = GFamily::constant(1e-3);
    const unsigned workers =
        std::max(1u, std::min(8u, std::thread::hardware_concurrency()));

    struct RungStats {
        std::size_t n = 0;
        double exceed_freq = 0, fail_rate = 0, clean_eq_frac = 1;
        std::size_t clean = 0;
    };
    std::vector<RungStats> rungs;

    for (std::size_t n_bits : {8u, 20u, 52u}) {
        const auto code = build_code(n_bits, 3, 6, 7, 1.0 / 32.0, 0.1);
        const auto graph = build_adjacency(code);

        MemoryParams par;
        par.trials = 200;
        par.phases = 500;
        par.master_seed = 909;
        par.workers = workers;
        par.monitor_alpha = 0.5;
        par.monitor_threshold =
            c_prime(code.ratio(), code.delta_a, code.gamma_a) * std::sqrt(code.n);
        par.record_phases = true;

        const auto run = run_memory(code, graph, field, fam, par);

        RungStats st;
        st.n = code.n;
        std::size_t monitored = 0, exceed = 0, failures = 0;
        for (const auto& s : run.summaries) {
            monitored += s.monitored_phases;
            exceed += s.exceed_count;
            failures += s.failed;
        }
        std::size_t clean_eq = 0;
        for (const auto& r : run.records)
            if (r.monitored && !r.exceeded) {
                ++st.clean;
                clean_eq += r.eff_eq_new;
            }
        st.exceed_freq = monitored ? static_cast<double>(exceed) / monitored : 0.0;
        st.fail_rate = static_cast<double>(failures) / par.trials;
        st.clean_eq_frac = st.clean ? static_cast<double>(clean_eq) / st.clean : 1.0;
        log << "    n=" << st.n << ": threshold " << par.monitor_threshold << ", exceedance "
            << exceed << "/" << monitored << " = " << st.exceed_freq << ", failures "
            << failures << "/200, clean monitored phases " << st.clean
            << " with effective==new fraction " << st.clean_eq_frac << "\n";
        rungs.push_back(st);
    }

    bool a_ok = true, b_ok = true, c_ok = true;
    for (std::size_t i = 1; i < rungs.size(); ++i) {
        if (rungs[i].exceed_freq > rungs[i - 1].exceed_freq) a_ok = false;
        if (rungs[i].fail_rate > rungs[i - 1].fail_rate) b_ok = false;
    }
    for (const auto& st : rungs)
        if (st.clean_eq_frac < 0.99) c_ok = false;

    log << "    (a) exceedance frequency non-increasing in n: " << (a_ok ? "holds" : "VIOLATED")
        << "\n";
    if (!a_ok)
        log << "        at p_bar = 1e-3 every rung sits far above the code-family threshold\n"
               "        (~1e-13 at these degrees), where any nonempty effective error already\n"
               "        exceeds c'*sqrt(n) < 1; the per-phase exceedance rate is then\n"
               "        1-(1-p_bar)^n, which grows with n instead of shrinking\n";
    log << "    (b) logical failure rate non-increasing in n: " << (b_ok ? "holds" : "VIOLATED")
        << "\n";
    log << "    (c) effective==new on >= 99% of clean monitored phases: "
        << (c_ok ? "holds" : "VIOLATED") << "\n";
    return a_ok && b_ok && c_ok;
}

// ---------------------------------------------------------------------------
// criterion 11: byte-identical runs across repeats and worker counts

constexpr const char* kGoldenConfig = R"json({
  "code": {"n_bits": 8, "d_bits": 3, "d_checks": 6, "seed": 7, "delta_a": 0.03125, "gamma_a": 0.1},
  "field": {"flip_prob": 0.1, "temporal": "lazy", "q_hold": 0.25},
  "noise": {"family": "affine", "p_bar": 0.001, "window": [-1, 0, 1],
            "weights": [0.0004, 0.0008, 0.0004], "c_coeff": 40.0, "eps_g": 0.25, "gamma_corr": 0.0},
  "sim": {"trials": 12, "phases": 40, "seed": 2026, "workers": 1, "record_phases": true}
}
)json";

bool crit_reproducibility(std::ostream& log, const std::string& cli,
                          const std::string& golden) {
    if (cli.empty()) {
        log << "    --cli <path to the command-line binary> was not provided\n";
        return false;
    }
    const fs::path dir = fs::temp_directory_path() / "qem_acceptance";
    fs::create_directories(dir);
    const fs::path cfg = dir / "golden_config.json";
    std::ofstream(cfg) << kGoldenConfig;

    auto run = [&](const fs::path& out, unsigned workers) {
        std::ostringstream cmd;
        cmd << "'" << cli << "' simulate --config '" << cfg.string() << "' --out '"
            << out.string() << "' --workers " << workers << " > '" << out.string()
            << ".stdout' 2>&1";
        const int rc = std::system(cmd.str().c_str());
        return rc != -1 && WIFEXITED(rc) && WEXITSTATUS(rc) == 0;
    };

    const fs::path a1 = dir / "run_a1.csv", a2 = dir / "run_a2.csv", b8 = dir / "run_b8.csv";
    bool ok = true;
    for (const auto& [path, workers] :
         std::vector<std::pair<fs::path, unsigned>>{{a1, 1}, {a2, 1}, {b8, 8}}) {
        if (!run(path, workers)) {
            log << "    simulate run failed (workers=" << workers << ")\n";
            ok = false;
        }
    }
    if (!ok) return false;

    const std::string csv1 = slurp(a1), csv2 = slurp(a2), csv8 = slurp(b8);
    log << "    record CSV size " << csv1.size() << " bytes\n";
    if (csv1.empty()) {
        log << "    first run produced no output\n";
        return false;
    }
    if (csv1 != csv2) {
        log << "    repeated identical runs differ\n";
        ok = false;
    }
    if (csv1 != csv8) {
        log << "    worker counts 1 and 8 differ\n";
        ok = false;
    }
    if (slurp(a1.string() + ".manifest.json") != slurp(a2.string() + ".manifest.json")) {
        log << "    manifests of repeated identical runs differ\n";
        ok = false;
    }
    if (golden.empty()) {
        log << "    --golden <fixture CSV> was not provided\n";
        return false;
    }
    const std::string want = slurp(golden);
    if (want.empty()) {
        log << "    golden fixture missing or empty: " << golden << "\n";
        return false;
    }
    if (csv1 != want) {
        log << "    output differs from the committed golden fixture\n";
        ok = false;
    }
    if (ok)
        log << "    repeat runs, worker counts 1 and 8, and the committed fixture all"
               " byte-identical\n";
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli_path, golden_path;
    for (int i = 1; i + 1 < argc; ++i) {
        const std::string flag = argv[i];
        if (flag == "--cli") cli_path = argv[++i];
        else if (flag == "--golden") golden_path = argv[++i];
        else if (flag == "--emit-golden-config") {
            std::ofstream(argv[++i]) << kGoldenConfig;
            return 0;
        }
    }

    struct Row {
        int id;
        const char* name;
        double limit_s;  // <= 0: no stated limit
        std::function<bool(std::ostream&)> body;
    };
    const std::vector<Row> rows = {
        {1, "closed forms match the extended-precision oracle", 1, crit_formula_exactness},
        {2, "specialized threshold equals the general form", 1, crit_threshold_identity},
        {3, "threshold magnitude window within observed degrees", 0, crit_threshold_magnitude},
        {4, "product builds are CSS-valid and meet the rate floor", 120, crit_css_validity},
        {5, "cluster search matches 2^n brute force", 120, crit_maxconn_oracle},
        {6, "connected-set counts respect the growth bound", 300, crit_connected_set_bound},
        {7, "decoder bookkeeping and lookup comparison", 120, crit_decoder_oracle},
        {8, "noise sampler calibration and coupling matrix", 60, crit_noise_calibration},
        {9, "empirical tails under the concentration bound", 300, crit_concentration},
        {10, "memory trends across the size ladder", 1800, crit_memory_trends},
        {11, "byte-identical simulate runs", 0,
         [&](std::ostream& log) { return crit_reproducibility(log, cli_path, golden_path); }},
    };

    int failures = 0;
    for (const auto& row : rows) {
        const auto out = run_checked(row.limit_s, row.body);
        char line[160];
        if (row.limit_s > 0)
            std::snprintf(line, sizeof line, "criterion %2d  %-56s %s  (%.2f s, limit %.0f s)\n",
                          row.id, row.name, out.pass ? "PASS" : "FAIL", out.seconds,
                          row.limit_s);
        else
            std::snprintf(line, sizeof line, "criterion %2d  %-56s %s  (%.2f s)\n", row.id,
                          row.name, out.pass ? "PASS" : "FAIL", out.seconds);
        std::fputs(line, stdout);
        if (!out.detail.empty()) std::fputs(out.detail.c_str(), stdout);
        std::fflush(stdout);
        failures += !out.pass;
    }
    std::printf("%d of 11 criteria passed\n", 11 - static_cast<int>(failures));
    return failures == 0 ? 0 : 1;
}
