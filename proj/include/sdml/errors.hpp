#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdml {

/// Base of every error thrown by the library. The harness maps the three
/// subclasses onto process exit codes (config 2, data 3, numeric 4).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

/// Cholesky pivot fell below the singularity threshold; the caller should
/// raise its regularization.
class SingularMatrixError : public NumericError {
public:
    using NumericError::NumericError;
};

/// The kNN graph built for geodesic distances has more than one component.
/// `kept` is the largest component, `dropped` everything else (both sorted).
class DisconnectedGraphError : public NumericError {
public:
    DisconnectedGraphError(std::vector<std::size_t> kept, std::vector<std::size_t> dropped)
        : NumericError("neighborhood graph is disconnected: " + std::to_string(dropped.size()) +
                       " sample(s) outside the largest component"),
          kept_(std::move(kept)),
          dropped_(std::move(dropped)) {}

    const std::vector<std::size_t>& kept() const noexcept { return kept_; }
    const std::vector<std::size_t>& dropped() const noexcept { return dropped_; }

private:
    std::vector<std::size_t> kept_;
    std::vector<std::size_t> dropped_;
};

}  // namespace sdml
