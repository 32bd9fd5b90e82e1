#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lossav {

// argument / config problems (CLI exit code 1)
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DomainError : ArgumentError {
    using ArgumentError::ArgumentError;
};
struct DataError : ArgumentError {
    using ArgumentError::ArgumentError;
};

// model / solver problems (CLI exit code 2)
struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StationarityError : ModelError {
    using ModelError::ModelError;
};
struct NumericalError : ModelError {
    using ModelError::ModelError;
};
struct PricingError : ModelError {
    using ModelError::ModelError;
};
struct BracketError : ModelError {
    using ModelError::ModelError;
};
struct ConvergenceError : ModelError {
    ConvergenceError(const std::string& msg, std::vector<double> history)
        : ModelError(msg), residual_history(std::move(history)) {}
    std::vector<double> residual_history;
};

}  // namespace lossav
