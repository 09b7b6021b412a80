#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace resvol {

// Broad failure classes; the CLI maps them onto exit codes 2/3/4.
enum class ErrorKind { Config, Input, Pipeline };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what);
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class InputError : public Error {
public:
    explicit InputError(const std::string& what) : Error(ErrorKind::Input, what) {}
};

// Malformed text input. line() is 1-based, 0 when not attributable to a line.
class ParseError : public InputError {
public:
    ParseError(std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class PipelineError : public Error {
public:
    explicit PipelineError(const std::string& what) : Error(ErrorKind::Pipeline, what) {}
};

// Constant data where a spread is required (histogram, scaler, SD of observations).
class DegenerateError : public PipelineError {
public:
    using PipelineError::PipelineError;
};

// An index that the scene's sensor cannot support (e.g. AWEInsh without SWIR).
class UnsupportedIndexError : public PipelineError {
public:
    using PipelineError::PipelineError;
};

// Curve lookups outside the tabulated range or on a non-invertible plateau.
class LookupError : public PipelineError {
public:
    using PipelineError::PipelineError;
};

}  // namespace resvol
