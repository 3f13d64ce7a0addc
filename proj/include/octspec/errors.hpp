#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace octspec {

/// Root of the library's exception hierarchy. The CLI maps `ValidationError`
/// to exit code 2 and `NumericalError` to exit code 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: coefficients violating their invariants, malformed files,
/// arguments outside an operation's domain.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Spectral parameter outside the region where an operation is defined
/// (e.g. quasimomentum requested outside the band).
class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Model parameters incompatible with the requested construction
/// (vacuum band too low, interval too narrow, ...).
class ParameterError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A component spectrum lacks the structure the assembler relies on.
class StructureError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A query interval intersects essential spectrum.
class OverlapError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Requested truncation is too large for the available solvers.
class SizeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// The requested interval is too short for any certified design.
class InfeasibleError : public ParameterError {
public:
    InfeasibleError(const std::string& what, double minimal_length)
        : ParameterError(what), minimal_length_(minimal_length) {}

    double minimal_length() const noexcept { return minimal_length_; }

private:
    double minimal_length_;
};

/// Root finding, eigen-solving or Newton iteration did not reach tolerance.
class NumericalError : public Error {
public:
    using Error::Error;
};

class SolverError : public NumericalError {
public:
    SolverError(const std::string& what, double best_residual)
        : NumericalError(format(what, best_residual)),
          best_residual_(best_residual) {}

    double best_residual() const noexcept { return best_residual_; }

private:
    static std::string format(const std::string& what, double r) {
        std::ostringstream os;
        os << what << " (best residual " << r << ")";
        return os.str();
    }

    double best_residual_;
};

/// Evaluation hit a pole of the Weyl function.
class PoleError : public NumericalError {
public:
    PoleError(const std::string& what, double location, double residue)
        : NumericalError(what), location_(location), residue_(residue) {}

    double location() const noexcept { return location_; }
    double residue() const noexcept { return residue_; }

private:
    double location_;
    double residue_;
};

/// The vacuum level is not yet in the asymptotic regime where each gap holds
/// at most one isolated sign change of the Wronskian.
class ThresholdError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace octspec
