#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qem {

// Shape mismatches between operands (matrix/vector dimensions, lengths).
struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid user-supplied parameters (degrees, probabilities, ranges).
struct ParameterError : std::runtime_error {
    explicit ParameterError(const std::string& msg) : std::runtime_error(msg) {}
};

// Mathematical domain violations (e.g. degree too small for a formula).
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Random construction ran out of retry budget.
struct SamplingError : std::runtime_error {
    explicit SamplingError(const std::string& msg) : std::runtime_error(msg) {}
};

// A combinatorial search hit its work cap. partial_count carries whatever
// lower bound the search had established when it gave up.
struct ResourceError : std::runtime_error {
    explicit ResourceError(const std::string& msg, std::uint64_t partial = 0)
        : std::runtime_error(msg), partial_count(partial) {}
    std::uint64_t partial_count;
};

// Not enough data for an estimator.
struct StatisticsError : std::runtime_error {
    explicit StatisticsError(const std::string& msg) : std::runtime_error(msg) {}
};

// Unreadable or malformed input file.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace qem
