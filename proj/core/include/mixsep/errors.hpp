#pragma once

#include <stdexcept>

namespace mixsep {

/// Base class for all mixsep errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid distribution or structurally broken input (bad weights, nonpositive scales, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Input too short for the requested operation.
class SizeError : public Error {
public:
    using Error::Error;
};

/// Sample carries no information for the requested fit (e.g. zero variance).
class DegenerateDataError : public Error {
public:
    using Error::Error;
};

/// Data falls outside the numerical support of the model (likelihood underflow).
class NumericalSupportError : public Error {
public:
    using Error::Error;
};

/// A numerical routine failed to converge to the requested tolerance.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Parameter outside its documented domain.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Calibration segment unusable (e.g. constant rest values).
class CalibrationError : public Error {
public:
    using Error::Error;
};

/// File system failure (missing input, unwritable output).
class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed file content; message names the offending line.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Inconsistent or incomplete run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace mixsep
