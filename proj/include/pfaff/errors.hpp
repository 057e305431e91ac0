#ifndef PFAFF_ERRORS_HPP
#define PFAFF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pfaff {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Mismatched or unsupported dimensions (odd-dimensional canonical ops, etc.).
struct DimensionError : Error {
    using Error::Error;
};

/// State left the valid region D (negative concentration, boundary probe, ...).
struct DomainError : Error {
    explicit DomainError(const std::string& msg, int component = -1)
        : Error(msg), component(component) {}
    int component;  // offending coordinate, -1 if not attributable
};

/// Newton iteration failed to reach tolerance.
struct ConvergenceError : Error {
    explicit ConvergenceError(const std::string& msg, double residual)
        : Error(msg), residual(residual) {}
    double residual;
};

/// |grad H| at or below tolerance where the Quispel-Capel formula needs it nonzero.
struct DegenerateGradientError : Error {
    using Error::Error;
};

/// Casimir not affine in the coordinate chosen for elimination.
struct UnsupportedReductionError : Error {
    using Error::Error;
};

/// Reaction-network DSL syntax error, with 1-based location.
struct ParseError : Error {
    ParseError(const std::string& msg, int line, int column)
        : Error(msg + " (line " + std::to_string(line) + ", column " +
                std::to_string(column) + ")"),
          line(line), column(column) {}
    int line;
    int column;
};

/// Bad or inconsistent configuration (unknown system, parameter out of range, ...).
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace pfaff

#endif
