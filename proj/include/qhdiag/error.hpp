#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qhd {

/// Input or argument rejected by a precondition check.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a quantity needs a stable potential (all squared frequencies
/// non-negative, or strictly positive for a normalizable ground state).
class UnstablePotential : public std::runtime_error {
public:
    UnstablePotential(const std::string& what, std::vector<double> offending)
        : std::runtime_error(what), offending_(std::move(offending)) {}

    const std::vector<double>& offending() const noexcept { return offending_; }

private:
    std::vector<double> offending_;
};

/// An iterative solver ran out of budget without meeting its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double last_residual)
        : std::runtime_error(what), last_residual_(last_residual) {}

    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

}  // namespace qhd
