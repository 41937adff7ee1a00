#pragma once

#include <stdexcept>
#include <string>

namespace odc {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Closed loop (or a candidate matrix) is not stable where stability is required.
class InstabilityError : public Error {
public:
    InstabilityError(const std::string& msg, double spectral_abscissa)
        : Error(msg + " (spectral abscissa = " + std::to_string(spectral_abscissa) + ")"),
          spectral_abscissa_(spectral_abscissa) {}

    double spectral_abscissa() const { return spectral_abscissa_; }

private:
    double spectral_abscissa_;
};

// A numerical routine failed to produce a trustworthy answer.
class SolverFailure : public Error {
public:
    explicit SolverFailure(const std::string& msg) : Error(msg) {}
};

// Caller violated a documented precondition.
class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& msg) : Error(msg) {}
};

// Input shape/structure outside the supported forms.
class UnsupportedStructureError : public Error {
public:
    explicit UnsupportedStructureError(const std::string& msg) : Error(msg) {}
};

// The requested certificate cannot exist for this input.
class NotACounterexampleError : public Error {
public:
    explicit NotACounterexampleError(const std::string& msg) : Error(msg) {}
};

// Malformed experiment configuration.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace odc
