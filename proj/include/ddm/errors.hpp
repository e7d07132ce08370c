#pragma once

#include <stdexcept>
#include <string>

namespace ddm {

/// Invalid configuration or precondition violation. CLI exit code 1.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Iterative solver did not converge. Carries the final residual. CLI exit code 2.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& msg, double residual, int iterations)
        : std::runtime_error(msg), final_residual(residual), iterations(iterations) {}

    double final_residual = 0.0;
    int iterations = 0;
    int step_index = -1; // set when the failure happened inside a time loop
};

/// NaN/Inf encountered in a numerical kernel. CLI exit code 2.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Filesystem / stream failure. CLI exit code 3.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace ddm
