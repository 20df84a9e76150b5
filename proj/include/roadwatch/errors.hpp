#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace roadwatch {

// Base for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input that could not be parsed at all (bad JSON, bad number).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t byte_offset)
        : Error(what + " (byte " + std::to_string(byte_offset) + ")"), byte_offset_(byte_offset) {}
    explicit ParseError(const std::string& what) : Error(what), byte_offset_(0) {}

    std::size_t byte_offset() const { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

// Input parsed as JSON but does not have the expected structure.
class FormatError : public Error {
public:
    using Error::Error;
};

// Invariant violation while reading a frame/observation stream.
class StreamError : public Error {
public:
    StreamError(const std::string& what, std::uint64_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::uint64_t line() const { return line_; }

private:
    std::uint64_t line_;
};

// Frames or observations presented out of the required order.
class OrderingError : public Error {
public:
    using Error::Error;
};

// Invalid configuration value.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Domain precondition violated (bad geometry, undefined velocity, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

}  // namespace roadwatch
