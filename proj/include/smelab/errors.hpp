#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sme {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mismatched grids, too few samples, empty inputs.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// A field value outside the domain of the equation (e.g. u <= 0 where 1/u is needed).
class DomainError : public Error {
public:
    DomainError(const std::string& what, long node = -1) : Error(what), node_(node) {}
    long node() const noexcept { return node_; }

private:
    long node_;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// ODE integration could not proceed.
class IntegrationError : public Error {
public:
    using Error::Error;
};

/// Linear or nonlinear solver failure. Carries the residual history.
class SolverError : public Error {
public:
    SolverError(const std::string& what, std::vector<double> history = {})
        : Error(what), history_(std::move(history)) {}
    const std::vector<double>& history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

/// Malformed user input (config files, domain specs, CSV).
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace sme
