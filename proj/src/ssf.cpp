#include "qem/ssf.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "qem/errors.hpp"

namespace qem {

SsfDecoder::SsfDecoder(const SparseBitMatrix& generators, const SparseBitMatrix& checks) {
    if (generators.cols() != checks.cols())
        throw ShapeError("generator and check matrices act on different qubit counts");
    n_qubits_ = generators.cols();
    n_checks_ = checks.rows();

    gen_support_.resize(generators.rows());
    for (std::size_t g = 0; g < generators.rows(); ++g) {
        const auto& sup = generators.row_support(g);
        if (sup.size() > 20)
            throw ParameterError("generator support exceeds 20; subset scan would not terminate "
                                 "in reasonable time");
        gen_support_[g].assign(sup.begin(), sup.end());
    }

    checks_of_qubit_ = checks.column_supports();
    gens_of_qubit_.resize(n_qubits_);
    for (std::size_t g = 0; g < gen_support_.size(); ++g)
        for (std::uint32_t q : gen_support_[g])
            gens_of_qubit_[q].push_back(static_cast<std::uint32_t>(g));
    qubits_of_check_.resize(n_checks_);
    for (std::size_t c = 0; c < n_checks_; ++c) {
        const auto& sup = checks.row_support(c);
        qubits_of_check_[c].assign(sup.begin(), sup.end());
    }
}

DecodeResult SsfDecoder::decode(const BitVector& syndrome, std::size_t max_rounds) const {
    if (syndrome.size() != n_checks_) throw ShapeError("syndrome length mismatch");

    BitVector sigma = syndrome;
    std::size_t sweight = sigma.weight();
    if (max_rounds == 0) max_rounds = sweight;

    DecodeResult res;
    res.correction = BitVector(n_qubits_);

    // scratch: membership stamps for candidate dedup and local check indexing
    std::vector<std::uint32_t> gen_stamp(gen_support_.size(), 0);
    std::vector<std::uint32_t> check_stamp(n_checks_, 0);
    std::vector<std::uint32_t> check_local(n_checks_, 0);
    std::uint32_t epoch = 0;

    std::vector<std::uint32_t> candidates;
    std::vector<std::uint8_t> local_sigma, local_flip;
    std::vector<std::vector<std::uint32_t>> local_checks_of;  // per support position

    while (sigma.any() && res.trace.size() < max_rounds) {
        // only generators whose support meets a nonzero check can produce a
        // positive weight drop, so the scan is driven by the syndrome
        candidates.clear();
        ++epoch;
        for (std::uint32_t c : sigma.support())
            for (std::uint32_t q : qubits_of_check_[c])
                for (std::uint32_t g : gens_of_qubit_[q])
                    if (gen_stamp[g] != epoch) {
                        gen_stamp[g] = epoch;
                        candidates.push_back(g);
                    }
        if (candidates.empty()) break;
        std::sort(candidates.begin(), candidates.end());

        long long best_num = 0;       // best weight drop
        long long best_den = 1;       // its subset size
        std::size_t best_gen = 0;
        std::uint32_t best_mask = 0;
        bool have_best = false;

        for (std::uint32_t g : candidates) {
            const auto& sup = gen_support_[g];
            const unsigned w = static_cast<unsigned>(sup.size());

            // local view of every check this generator can toggle
            ++epoch;
            std::uint32_t n_local = 0;
            local_checks_of.assign(w, {});
            for (unsigned t = 0; t < w; ++t)
                for (std::uint32_t c : checks_of_qubit_[sup[t]]) {
                    if (check_stamp[c] != epoch) {
                        check_stamp[c] = epoch;
                        check_local[c] = n_local++;
                        if (local_sigma.size() < n_local) {
                            local_sigma.resize(n_local);
                            local_flip.resize(n_local);
                        }
                        local_sigma[n_local - 1] = sigma.get(c);
                        local_flip[n_local - 1] = 0;
                    }
                    local_checks_of[t].push_back(check_local[c]);
                }

            // Gray-code walk over nonempty subsets; each step toggles one
            // qubit, so the syndrome-weight drop updates in O(local degree).
            long long drop = 0;
            std::uint32_t gray = 0;
            const std::uint32_t total = (1u << w) - 1;
            for (std::uint32_t t = 1; t <= total; ++t) {
                const unsigned bit = static_cast<unsigned>(std::countr_zero(t));
                gray ^= 1u << bit;
                for (std::uint32_t lc : local_checks_of[bit]) {
                    local_flip[lc] ^= 1;
                    const bool now_flipped = local_flip[lc];
                    if (local_sigma[lc])
                        drop += now_flipped ? 1 : -1;
                    else
                        drop += now_flipped ? -1 : 1;
                }
                const long long den = std::popcount(gray);
                // maximize drop/den; cross-multiplied integer comparison keeps
                // the choice exact and platform-independent
                const long long lhs = drop * best_den;
                const long long rhs = best_num * den;
                bool better = lhs > rhs;
                if (!better && have_best && lhs == rhs) {
                    if (g < best_gen || (g == best_gen && gray < best_mask)) better = true;
                }
                if (better && drop > 0) {
                    best_num = drop;
                    best_den = den;
                    best_gen = g;
                    best_mask = gray;
                    have_best = true;
                }
            }
        }

        if (!have_best) break;  // no flip set lowers the syndrome weight

        // apply the winning subset
        const auto& sup = gen_support_[best_gen];
        for (unsigned t = 0; t < sup.size(); ++t) {
            if (!((best_mask >> t) & 1u)) continue;
            const std::uint32_t q = sup[t];
            res.correction.flip(q);
            for (std::uint32_t c : checks_of_qubit_[q]) {
                if (sigma.get(c)) { sigma.reset(c); --sweight; }
                else { sigma.set(c); ++sweight; }
            }
        }

        SsfStep step;
        step.generator = best_gen;
        step.subset_mask = best_mask;
        step.subset_size = static_cast<std::size_t>(std::popcount(best_mask));
        step.weight_drop = best_num;
        step.syndrome_weight_after = sweight;
        res.trace.push_back(step);
    }

    res.converged = !sigma.any();
    res.final_weight = sweight;
    return res;
}

std::string trace_csv(const DecodeResult& result) {
    std::ostringstream out;
    out << "round,generator,subset_mask,subset_size,weight_drop,syndrome_weight_after\n";
    for (std::size_t i = 0; i < result.trace.size(); ++i) {
        const SsfStep& s = result.trace[i];
        out << i << ',' << s.generator << ',' << s.subset_mask << ',' << s.subset_size << ','
            << s.weight_drop << ',' << s.syndrome_weight_after << '\n';
    }
    return out.str();
}

RadiusReport adversarial_radius(const QuantumExpanderCode& code, std::size_t max_weight,
                                std::uint64_t work_cap) {
    const std::size_t n = code.n;
    SsfDecoder dec(code);
    Gf2Echelon stabilizer(code.h_x);
    const auto checks_of_qubit = code.h_z.column_supports();

    RadiusReport rep;
    BitVector sigma(code.h_z.rows());
    BitVector err(n);

    std::vector<std::size_t> idx;
    for (std::size_t t = 1; t <= max_weight; ++t) {
        // C(n, t) patterns at this weight
        double count = 1.0;
        for (std::size_t i = 0; i < t; ++i)
            count *= static_cast<double>(n - i) / static_cast<double>(i + 1);
        if (static_cast<double>(rep.patterns_checked) + count > static_cast<double>(work_cap))
            throw ResourceError("adversarial radius scan exceeds work cap", rep.patterns_checked);

        idx.assign(t, 0);
        for (std::size_t i = 0; i < t; ++i) idx[i] = i;
        bool more = true;
        while (more) {
            err.clear();
            sigma.clear();
            for (std::size_t q : idx) {
                err.set(q);
                for (std::uint32_t c : checks_of_qubit[q]) sigma.flip(c);
            }
            ++rep.patterns_checked;
            DecodeResult r = dec.decode(sigma);
            bool ok = r.converged;
            if (ok) {
                BitVector residual = err ^ r.correction;
                ok = !residual.any() || stabilizer.contains(residual);
            }
            if (!ok) {
                rep.radius = t - 1;
                rep.failure_found = true;
                return rep;
            }
            // next combination
            more = false;
            for (std::size_t i = t; i-- > 0;) {
                if (idx[i] + (t - i) < n) {
                    ++idx[i];
                    for (std::size_t j = i + 1; j < t; ++j) idx[j] = idx[j - 1] + 1;
                    more = true;
                    break;
                }
            }
        }
        rep.radius = t;
    }
    return rep;
}

}  // namespace qem
