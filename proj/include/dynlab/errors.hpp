#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dynlab {

struct InvalidProblemError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidScheduleError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidStartError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidGridError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UnsupportedScheduleError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UnsupportedCompositionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InsufficientDataError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Raised by check_equivalence when (spec_t, spec_s) is not a theorem-image
// pair; `field` names the first offending parameter.
struct InvalidPairingError : std::invalid_argument {
    InvalidPairingError(std::string field_, const std::string& what_)
        : std::invalid_argument(what_), field(std::move(field_)) {}
    std::string field;
};

// State norm crossed the divergence threshold (or went non-finite) during
// integration; `step_index` is the first bad grid index.
struct DivergenceError : std::runtime_error {
    DivergenceError(std::size_t step_index_, const std::string& what_)
        : std::runtime_error(what_), step_index(step_index_) {}
    std::size_t step_index;
};

struct EnsembleFailureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace dynlab
