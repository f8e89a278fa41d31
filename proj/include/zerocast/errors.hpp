#pragma once

#include <stdexcept>
#include <string>

namespace zerocast {

/**
 * @brief Error taxonomy shared by the library and the command line tool.
 *
 * Every failure mode maps to one of these types so callers can translate
 * them into exit codes without string matching.
 */
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file: wrong header, unparseable cell, bad JSON.
class SchemaError : public Error {
public:
    using Error::Error;
};

// Syntactically valid value outside its domain (negative demand, NaN).
class DomainError : public Error {
public:
    using Error::Error;
};

// Structurally broken series: duplicate or missing time index.
class IntegrityError : public Error {
public:
    using Error::Error;
};

// Inconsistent run configuration (horizon vs. length, bad split).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Tensor or graph dimension mismatch.
class ShapeError : public Error {
public:
    using Error::Error;
};

// A numeric routine failed to converge or left its supported range.
class NumericsError : public Error {
public:
    using Error::Error;
};

// Non-finite loss or gradient during optimisation.
class TrainingDiagnosticError : public Error {
public:
    using Error::Error;
};

// Unusable regression design (rank deficient, empty).
class DesignError : public Error {
public:
    using Error::Error;
};

// Aggregation over zero usable records.
class EmptyAggregateError : public Error {
public:
    using Error::Error;
};

} // namespace zerocast
