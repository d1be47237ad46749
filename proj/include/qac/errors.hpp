#pragma once

#include <stdexcept>
#include <string>

namespace qac {

/// Model or operation inputs violate a documented precondition.
struct InvalidSpec : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Numeric input outside the contract of a low-level routine (e.g. asymmetric
/// matrix passed to the symmetric eigensolver).
struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Text input could not be parsed. Clause-list errors carry the 1-based line
/// and column of the offending token; config errors use line = 0.
struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(const std::string& msg, int line_, int column_)
        : std::runtime_error(line_ > 0 ? "parse error at line " + std::to_string(line_) +
                                             ", column " + std::to_string(column_) +
                                             ": " + msg
                                       : "parse error: " + msg),
          line(line_),
          column(column_) {}
};

/// Random instance generation exhausted its attempt budget.
struct GenerationFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Ground state degenerate beyond tolerance where a unique one is required.
struct DegenerateGround : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DivisionByZero : std::domain_error {
    using std::domain_error::domain_error;
};

/// Time integration produced NaN/Inf or lost normalization; carries the last
/// time at which the state was still valid.
struct IntegrationError : std::runtime_error {
    double last_valid_time;
    IntegrationError(const std::string& msg, double t)
        : std::runtime_error(msg + " (last valid t = " + std::to_string(t) + ")"),
          last_valid_time(t) {}
};

}  // namespace qac
