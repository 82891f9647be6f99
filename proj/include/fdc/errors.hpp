#pragma once

#include <stdexcept>
#include <string>

namespace fdc {

// Caller broke a documented precondition (dimension mismatch, bad config
// value, parameter outside its documented range). Maps to exit code 2.
struct ContractError : std::runtime_error {
    explicit ContractError(const std::string& what) : std::runtime_error(what) {}
};

// A numeric routine could not produce a trustworthy result (quadrature
// budget exhausted, divergent integral requested, root not bracketed).
// Maps to exit code 1.
struct EvalError : std::runtime_error {
    explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

// The requested construction has no solution under its constraints
// (e.g. no admissible inner radius for the given slack). Maps to exit 3.
struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fdc
