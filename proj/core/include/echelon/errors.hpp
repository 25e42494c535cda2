#pragma once

#include <stdexcept>
#include <string>

namespace echelon {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

/// A moment fit that needs variance > mean was asked for variance <= mean.
class VarianceNotAboveMean : public Error {
public:
    explicit VarianceNotAboveMean(const std::string& msg) : Error(msg) {}
};

/// A two-moment fit left its numerically safe parameter range.
class NumericalInstability : public Error {
public:
    explicit NumericalInstability(const std::string& msg) : Error(msg) {}
};

/// Numeric integration could not resolve the required tail mass.
class QuadratureFailure : public Error {
public:
    explicit QuadratureFailure(const std::string& msg) : Error(msg) {}
};

/// The KKSL estimator only applies for non-negative central reorder points.
class NegativeReorderPoint : public Error {
public:
    explicit NegativeReorderPoint(const std::string& msg) : Error(msg) {}
};

/// A fill-rate target cannot be reached within the search bracket cap.
class TargetUnreachable : public Error {
public:
    explicit TargetUnreachable(const std::string& msg) : Error(msg) {}
};

/// Unrecognized wait-time method tag.
class UnknownMethod : public Error {
public:
    explicit UnknownMethod(const std::string& msg) : Error(msg) {}
};

/// Invalid simulation or network configuration.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Historical demand trace is shorter than the simulation horizon.
class TraceExhausted : public Error {
public:
    explicit TraceExhausted(const std::string& msg) : Error(msg) {}
};

/// Scenario/grid input does not match the expected schema.
class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& msg) : Error(msg) {}
};

/// Computed and simulated result sets do not share the same keys.
class KeyMismatch : public Error {
public:
    explicit KeyMismatch(const std::string& msg) : Error(msg) {}
};

} // namespace echelon
