#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracsens {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Argument inside the domain but outside the supported evaluation range.
class RangeError : public std::range_error {
public:
    using std::range_error::range_error;
};

class SyntaxError : public std::runtime_error {
public:
    SyntaxError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class UnknownIdentifier : public SyntaxError {
public:
    using SyntaxError::SyntaxError;
};

// Numerical failure inside a solver (non-convergence, non-finite iterate).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed user input: configs, schedules, meshes.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace fracsens
