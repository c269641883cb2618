#pragma once

#include <stdexcept>
#include <string>

namespace viseme {

/// Base of every error raised by the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text or binary data.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Meshes that should share topology do not.
class TopologyError : public Error {
public:
    using Error::Error;
};

/// Vector lengths or counts disagree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration or inputs that cannot be used together.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Non-finite values, behind-camera points, or other numeric breakdowns.
class NumericError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace viseme
