#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qem/code.hpp"
#include "qem/gf2.hpp"

namespace qem {

// One greedy move: flipping the qubit subset encoded by subset_mask (bit t of
// the mask selects the t-th entry of the generator's ascending support).
struct SsfStep {
    std::size_t generator = 0;
    std::uint32_t subset_mask = 0;
    std::size_t subset_size = 0;
    long long weight_drop = 0;
    std::size_t syndrome_weight_after = 0;
};

struct DecodeResult {
    BitVector correction;
    bool converged = false;
    std::size_t final_weight = 0;
    std::vector<SsfStep> trace;
    std::size_t iterations() const { return trace.size(); }
};

// Small-set-flip decoder. Each round scans every generator whose support
// touches the current syndrome, evaluates all nonempty subsets of its support
// and applies the subset with the best (weight drop / subset size) ratio.
// Ties go to the smaller generator index, then the smaller subset mask, so
// decoding is a pure function of the syndrome.
class SsfDecoder {
  public:
    SsfDecoder(const SparseBitMatrix& generators, const SparseBitMatrix& checks);
    explicit SsfDecoder(const QuantumExpanderCode& code) : SsfDecoder(code.h_x, code.h_z) {}

    // max_rounds = 0 means the provable cap (initial syndrome weight).
    DecodeResult decode(const BitVector& syndrome, std::size_t max_rounds = 0) const;

    std::size_t n_qubits() const { return n_qubits_; }
    std::size_t n_checks() const { return n_checks_; }

  private:
    std::size_t n_qubits_ = 0, n_checks_ = 0;
    std::vector<std::vector<std::uint32_t>> gen_support_;     // qubits per generator
    std::vector<std::vector<std::uint32_t>> checks_of_qubit_; // syndrome bits each qubit toggles
    std::vector<std::vector<std::uint32_t>> gens_of_qubit_;
    std::vector<std::vector<std::uint32_t>> qubits_of_check_;
};

std::string trace_csv(const DecodeResult& result);

struct RadiusReport {
    std::size_t radius = 0;          // all error patterns up to this weight decode correctly
    bool failure_found = false;      // a failing pattern of weight radius+1 exists
    std::size_t patterns_checked = 0;
};

// Exhaustive scan of error patterns by ascending weight. Throws ResourceError
// (with the partial pattern count) if the enumeration would exceed work_cap.
RadiusReport adversarial_radius(const QuantumExpanderCode& code, std::size_t max_weight,
                                std::uint64_t work_cap = 2000000);

}  // namespace qem
