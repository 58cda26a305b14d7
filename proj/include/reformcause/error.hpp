#pragma once

#include <stdexcept>
#include <string>

namespace reformcause {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input that could not be decoded (bad JSON, bad file).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Bad configuration (feature space, synth config, CLI options).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A class is too rare to split into the requested number of folds.
class StratificationError : public Error {
public:
    using Error::Error;
};

/// The synthetic generator could not honor a sampled outcome.
class GenerationError : public Error {
public:
    using Error::Error;
};

} // namespace reformcause
