#pragma once

#include <stdexcept>

namespace mrls {

// Vector/matrix length mismatch.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A caller-supplied value violates an operation's precondition.
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A closed-form predictor was evaluated outside its valid parameter range.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct NotFoundError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The inverse-correlation matrix lost positive definiteness.
struct NumericalBreakdown : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace mrls
