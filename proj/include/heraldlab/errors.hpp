#pragma once

#include <stdexcept>
#include <string>

namespace heraldlab {

// Error taxonomy mirrors the CLI exit codes: validation -> 2,
// infeasible domain -> 3, numerical accuracy -> 4.

// Malformed or out-of-contract input (bad parameters, wrong sizes).
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Size/order guard violations; a flavor of validation.
class SizeError : public ValidationError {
public:
    explicit SizeError(const std::string& msg) : ValidationError(msg) {}
};

// Well-formed input outside the mathematically realizable domain.
class InfeasibleError : public std::domain_error {
public:
    explicit InfeasibleError(const std::string& msg) : std::domain_error(msg) {}
};

// A numerical routine could not reach its accuracy contract.
class AccuracyError : public std::runtime_error {
public:
    explicit AccuracyError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace heraldlab
