#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cosmo {

// Input data is wrong (unparseable file, unknown column, empty result).
// The CLI maps this family to exit code 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public DataError {
public:
    ParseError(const std::string& what, long line)
        : DataError(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    long line() const noexcept { return line_; }

private:
    long line_;
};

class SchemaError : public DataError {
public:
    using DataError::DataError;
};

// A requested configuration cannot be satisfied (contradictory conditions,
// invalid hyper-parameters). Carries the individual reasons.
class ValidationError : public DataError {
public:
    ValidationError(const std::string& what, std::vector<std::string> details = {})
        : DataError(what), details_(std::move(details)) {}
    const std::vector<std::string>& details() const noexcept { return details_; }

private:
    std::vector<std::string> details_;
};

// Checkpoint and universe disagree.
class FingerprintMismatch : public DataError {
public:
    using DataError::DataError;
};

class CheckpointError : public DataError {
public:
    using DataError::DataError;
};

// Numerical failure at run time (non-finite activations, diverged loss).
class RuntimeFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace cosmo
