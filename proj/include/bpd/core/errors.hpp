#pragma once

#include <stdexcept>
#include <string>

namespace bpd {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A value is outside the range where the operation is defined (e.g. p <= 2).
class OutOfRangeError : public Error {
public:
    using Error::Error;
};

class PoleEvaluationError : public Error {
public:
    using Error::Error;
};

/// A rational function has a pole on (or too close to) the filled cells of a region.
class PoleOnSetError : public Error {
public:
    using Error::Error;
};

class DivergentIntegralError : public Error {
public:
    using Error::Error;
};

class TransplantHypothesisError : public Error {
public:
    using Error::Error;
};

class NumericalConsistencyError : public Error {
public:
    using Error::Error;
};

class ConditioningError : public Error {
public:
    ConditioningError(const std::string& what, double estimate)
        : Error(what), estimate_(estimate) {}
    double estimate() const noexcept { return estimate_; }

private:
    double estimate_;
};

class SingularPointError : public Error {
public:
    using Error::Error;
};

class NodeEvaluationError : public Error {
public:
    using Error::Error;
};

class UnsupportedRegionError : public Error {
public:
    using Error::Error;
};

/// Malformed text in one of the RGN1 / WGT1 / FUN1 / DEN1 / rational formats.
class FormatError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace bpd
