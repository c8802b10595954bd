#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qem/adjacency.hpp"
#include "qem/code.hpp"
#include "qem/gf2.hpp"
#include "qem/noise.hpp"
#include "qem/ssf.hpp"

namespace qem {

struct PhaseRecord {
    std::size_t trial = 0;
    std::size_t phase = 0;          // 1-based
    std::size_t new_weight = 0;     // fresh errors drawn this phase
    std::size_t eff_weight = 0;     // residual xor fresh, what the decoder sees
    std::size_t syndrome_weight = 0;
    std::size_t rounds = 0;         // decoder rounds spent
    std::size_t residual_weight = 0;
    bool a_j_ok = true;             // max_i p_i <= p_bar + 1/ln n held
    bool eff_eq_new = true;         // carried residual was empty
    bool monitored = false;         // cluster monitor ran this phase
    std::size_t maxconn = 0;        // cluster statistic (valid when monitored)
    bool maxconn_lower_bound = false;  // budget ran out; greedy fallback value
    bool exceeded = false;          // maxconn > monitor threshold
    bool failed = false;
};

struct SimSummary {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::size_t phases_run = 0;
    bool failed = false;
    std::size_t failure_phase = 0;  // valid when failed (1-based)
    bool decoder_stuck = false;     // failure was a non-converged decode
    std::size_t max_eff_weight = 0;
    std::size_t monitored_phases = 0;
    std::size_t exceed_count = 0;
    std::size_t aj_violations = 0;
    std::size_t eq_phases = 0;      // phases entered with empty residual
};

struct MemoryParams {
    std::size_t phases = 100;
    std::size_t trials = 100;
    std::uint64_t master_seed = 1;
    unsigned workers = 1;
    // cluster monitor
    double monitor_alpha = 0.5;
    double monitor_threshold = 0.0;     // e.g. c' * sqrt(n); 0 disables the monitor
    std::uint64_t monitor_node_budget = 200000;
    std::size_t monitor_stride_large = 10;  // monitor every k-th phase once n > 500
    bool record_phases = true;
    // when set, no new trial starts after the flag flips; finished trials keep
    // their results (phases_run == 0 marks a trial that never ran)
    const std::atomic<bool>* stop = nullptr;
};

struct MemoryRun {
    std::vector<SimSummary> summaries;   // indexed by trial
    std::vector<PhaseRecord> records;    // trial-major, phase order
};

// One trial: accumulate residual error, decode each phase, stop at the first
// logical failure (residual outside the generator rowspace at zero syndrome,
// or a decode that cannot clear the syndrome).
SimSummary run_memory_trial(const QuantumExpanderCode& code, const AdjacencyGraph& graph,
                            const HiddenFieldSpec& field, const GFamily& g,
                            const SsfDecoder& decoder, const Gf2Echelon& stabilizer,
                            const MemoryParams& par, std::size_t trial,
                            std::vector<PhaseRecord>* records);

// Multi-trial driver. Trials are seeded independently of scheduling
// (seed = derive_stream_seed(master_seed, trial)), so results are identical
// for any worker count; records come back sorted by (trial, phase).
MemoryRun run_memory(const QuantumExpanderCode& code, const AdjacencyGraph& graph,
                     const HiddenFieldSpec& field, const GFamily& g, const MemoryParams& par);

std::string phase_records_csv(const std::vector<PhaseRecord>& records);

// Kaplan-Meier survival over failure phases, censored at the horizon.
struct RetentionCurve {
    std::vector<std::size_t> time;       // distinct failure phases, ascending
    std::vector<double> survival;        // S(t) just after each failure time
    std::vector<double> band_low, band_high;  // 95% Greenwood band, clamped to [0,1]
    std::optional<std::size_t> median;   // first t with S(t) <= 1/2, if reached
    std::size_t trials = 0, failures = 0;
};

// Throws StatisticsError below 30 trials.
RetentionCurve retention_estimate(const std::vector<SimSummary>& summaries, std::size_t horizon);

// Convenience for synthetic failure-time data (used by estimator checks).
RetentionCurve retention_from_times(const std::vector<std::optional<std::size_t>>& failure_phase,
                                    std::size_t horizon);

}  // namespace qem
