#include "qem/memory_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "qem/errors.hpp"
#include "qem/rng.hpp"

namespace qem {

SimSummary run_memory_trial(const QuantumExpanderCode& code, const AdjacencyGraph& graph,
                            const HiddenFieldSpec& field, const GFamily& g,
                            const SsfDecoder& decoder, const Gf2Echelon& stabilizer,
                            const MemoryParams& par, std::size_t trial,
                            std::vector<PhaseRecord>* records) {
    const std::size_t n = code.n;
    SimSummary sum;
    sum.trial = trial;
    sum.seed = derive_stream_seed(par.master_seed, trial);
    Rng rng(sum.seed);

    const auto z_of_qubit = code.h_z.column_supports();
    BitVector residual(n);
    BitVector sigma(code.h_z.rows());

    const bool constant_g = g.form == GFamily::Form::constant;
    std::vector<double> p(n, g.p_bar);
    std::vector<std::uint8_t> hidden;
    const double aj_cap = n >= 3 ? g.p_bar + 1.0 / std::log(static_cast<double>(n)) : 1.0;

    const bool monitor_on = par.monitor_threshold > 0.0;
    const std::size_t monitor_cap =
        monitor_on ? static_cast<std::size_t>(std::floor(par.monitor_threshold)) + 1 : 0;

    for (std::size_t t = 1; t <= par.phases; ++t) {
        if (!constant_g) {
            if (t == 1) hidden = sample_field(field, n, rng);
            else evolve_field(field, hidden, rng);
            p = error_probabilities(g, hidden);
        }

        PhaseRecord rec;
        rec.trial = trial;
        rec.phase = t;
        rec.a_j_ok = *std::max_element(p.begin(), p.end()) <= aj_cap;
        if (!rec.a_j_ok) ++sum.aj_violations;

        BitVector fresh = sample_errors(p, rng);
        rec.new_weight = fresh.weight();
        rec.eff_eq_new = !residual.any();
        if (rec.eff_eq_new) ++sum.eq_phases;

        residual ^= fresh;  // residual now holds the effective error
        for (std::uint32_t q : fresh.support())
            for (std::uint32_t c : z_of_qubit[q]) sigma.flip(c);
        rec.eff_weight = residual.weight();
        rec.syndrome_weight = sigma.weight();
        sum.max_eff_weight = std::max(sum.max_eff_weight, rec.eff_weight);

        // cluster monitor runs on what the decoder is about to face
        if (monitor_on && (n <= 500 || t % par.monitor_stride_large == 0)) {
            rec.monitored = true;
            ++sum.monitored_phases;
            MaxConnResult mc;
            try {
                mc = maxconn_exact(graph, residual, par.monitor_alpha, monitor_cap,
                                   par.monitor_node_budget);
            } catch (const ResourceError&) {
                mc = maxconn_greedy(graph, residual, par.monitor_alpha, monitor_cap);
                rec.maxconn_lower_bound = true;
            }
            rec.maxconn = mc.value;
            rec.exceeded = static_cast<double>(mc.value) > par.monitor_threshold;
            if (rec.exceeded) ++sum.exceed_count;
        }

        DecodeResult dr = decoder.decode(sigma);
        rec.rounds = dr.trace.size();
        residual ^= dr.correction;
        for (std::uint32_t q : dr.correction.support())
            for (std::uint32_t c : z_of_qubit[q]) sigma.flip(c);
        if (sigma.any() == dr.converged)
            throw std::logic_error("decoder syndrome bookkeeping out of sync");
        rec.residual_weight = residual.weight();

        if (!dr.converged) {
            rec.failed = true;
            sum.decoder_stuck = true;
        } else if (residual.any() && !stabilizer.contains(residual)) {
            rec.failed = true;
        }

        if (records) records->push_back(rec);
        sum.phases_run = t;
        if (rec.failed) {
            sum.failed = true;
            sum.failure_phase = t;
            break;
        }
    }
    return sum;
}

MemoryRun run_memory(const QuantumExpanderCode& code, const AdjacencyGraph& graph,
                     const HiddenFieldSpec& field, const GFamily& g, const MemoryParams& par) {
    field.validate();
    g.validate(field.alphabet);
    if (par.trials == 0) throw ParameterError("need at least one trial");
    if (par.phases == 0) throw ParameterError("need at least one phase");

    const SsfDecoder decoder(code);
    const Gf2Echelon stabilizer(code.h_x);

    MemoryRun run;
    run.summaries.resize(par.trials);
    std::vector<std::vector<PhaseRecord>> per_trial(par.trials);

    const unsigned workers =
        std::max(1u, std::min<unsigned>(par.workers, static_cast<unsigned>(par.trials)));

    auto work_one = [&](std::size_t trial) {
        run.summaries[trial] =
            run_memory_trial(code, graph, field, g, decoder, stabilizer, par, trial,
                             par.record_phases ? &per_trial[trial] : nullptr);
    };

    auto stopped = [&] { return par.stop && par.stop->load(); };

    if (workers == 1) {
        for (std::size_t trial = 0; trial < par.trials && !stopped(); ++trial) work_one(trial);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr first_error;
        std::mutex error_lock;
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    if (stopped()) return;
                    const std::size_t trial = next.fetch_add(1);
                    if (trial >= par.trials) return;
                    try {
                        work_one(trial);
                    } catch (...) {
                        std::lock_guard<std::mutex> hold(error_lock);
                        if (!first_error) first_error = std::current_exception();
                        return;
                    }
                }
            });
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    if (par.record_phases) {
        std::size_t total = 0;
        for (const auto& v : per_trial) total += v.size();
        run.records.reserve(total);
        for (auto& v : per_trial)
            run.records.insert(run.records.end(), v.begin(), v.end());
    }
    return run;
}

std::string phase_records_csv(const std::vector<PhaseRecord>& records) {
    std::ostringstream out;
    out << "trial,phase,new_weight,eff_weight,syndrome_weight,rounds,residual_weight,"
           "a_j_ok,eff_eq_new,maxconn,maxconn_lower_bound,exceeded,failed\n";
    for (const PhaseRecord& r : records) {
        out << r.trial << ',' << r.phase << ',' << r.new_weight << ',' << r.eff_weight << ','
            << r.syndrome_weight << ',' << r.rounds << ',' << r.residual_weight << ','
            << int(r.a_j_ok) << ',' << int(r.eff_eq_new) << ',';
        if (r.monitored)
            out << r.maxconn << ',' << int(r.maxconn_lower_bound) << ',' << int(r.exceeded);
        else
            out << ",,";
        out << ',' << int(r.failed) << '\n';
    }
    return out.str();
}

RetentionCurve retention_from_times(const std::vector<std::optional<std::size_t>>& failure_phase,
                                    std::size_t horizon) {
    const std::size_t trials = failure_phase.size();
    if (trials < 30) throw StatisticsError("retention estimate needs at least 30 trials");

    std::vector<std::size_t> times;
    for (const auto& f : failure_phase)
        if (f) {
            if (*f == 0 || *f > horizon)
                throw ParameterError("failure phase outside (0, horizon]");
            times.push_back(*f);
        }
    std::sort(times.begin(), times.end());

    RetentionCurve curve;
    curve.trials = trials;
    curve.failures = times.size();

    double s = 1.0, greenwood = 0.0;
    std::size_t at_risk = trials;
    std::size_t i = 0;
    while (i < times.size()) {
        const std::size_t t = times[i];
        std::size_t d = 0;
        while (i < times.size() && times[i] == t) { ++d; ++i; }
        s *= 1.0 - static_cast<double>(d) / static_cast<double>(at_risk);
        if (at_risk > d)
            greenwood += static_cast<double>(d) /
                         (static_cast<double>(at_risk) * static_cast<double>(at_risk - d));
        const double var = s > 0.0 ? s * s * greenwood : 0.0;
        const double half = 1.96 * std::sqrt(var);
        curve.time.push_back(t);
        curve.survival.push_back(s);
        curve.band_low.push_back(std::max(0.0, s - half));
        curve.band_high.push_back(std::min(1.0, s + half));
        if (!curve.median && s <= 0.5) curve.median = t;
        at_risk -= d;
    }
    return curve;
}

RetentionCurve retention_estimate(const std::vector<SimSummary>& summaries, std::size_t horizon) {
    std::vector<std::optional<std::size_t>> times;
    times.reserve(summaries.size());
    for (const SimSummary& s : summaries)
        times.push_back(s.failed ? std::optional<std::size_t>(s.failure_phase) : std::nullopt);
    return retention_from_times(times, horizon);
}

}  // namespace qem
