#pragma once

#include <stdexcept>

namespace rogd {

// Exhaustive certification refused: input exceeds the configured size cap.
struct SizeLimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A regular agent cannot execute the update law (e.g. fewer than 2F+1 neighbors).
struct ProtocolViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// More adversarial values survived a filter than the F-local model permits.
struct AdversaryBudgetViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite value where a finite one is required.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad run configuration (file, key, or derived constant out of range).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The communication-model assumption check failed for this run.
struct AssumptionFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Objective has no unique minimizer (zero curvature mass).
struct DegenerateObjective : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rogd
