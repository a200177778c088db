#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cadence {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument is outside its admissible range (window length, order, gamma, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Shapes or dimensions of inputs do not agree.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// Input data is unusable (non-uniform sampling, bad values, empty overlap).
class DataError : public Error {
public:
    using Error::Error;
};

class ParseError : public DataError {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : DataError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A model or label set violates a declared invariant.
class ValidationError : public DataError {
public:
    using DataError::DataError;
};

class EmptyOverlapError : public DataError {
public:
    using DataError::DataError;
};

/// Bad configuration key or value.
class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace cadence
