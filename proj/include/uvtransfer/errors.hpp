#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uvt {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (OBJ, correspondence JSON). Carries a 1-based line
/// number when one is known, 0 otherwise.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Structurally valid input that breaks an invariant (index out of range,
/// duplicate key, bad parameter).
class ValidationError : public Error {
public:
    using Error::Error;
};

class DegenerateTriangleError : public Error {
public:
    DegenerateTriangleError() : Error("degenerate triangle") {}
};

/// Image or map dimensions that do not line up.
class ShapeMismatchError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Cache file is not an SMAP file of a supported version, or is truncated.
class CacheFormatError : public Error {
public:
    using Error::Error;
};

/// Cache file checksum does not match its content.
class CacheChecksumError : public Error {
public:
    using Error::Error;
};

/// Cache file is intact but was built from different inputs.
class StaleCacheError : public Error {
public:
    using Error::Error;
};

}  // namespace uvt
