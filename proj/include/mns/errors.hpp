#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mns {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

class SelfLoopRejected : public Error {
public:
    using Error::Error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

class TooFewLayers : public Error {
public:
    using Error::Error;
};

class TooFewNodes : public Error {
public:
    using Error::Error;
};

class EmptySet : public Error {
public:
    using Error::Error;
};

class ShapeMismatch : public Error {
public:
    using Error::Error;
};

class ZeroDenominator : public Error {
public:
    using Error::Error;
};

/// Parse failure in a text input; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& what_arg, std::size_t line)
        : Error(what_arg + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class EmptyFile : public Error {
public:
    using Error::Error;
};

class EmptyAfterFilter : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ManifestMismatch : public Error {
public:
    using Error::Error;
};

class DegenerateHoldout : public Error {
public:
    using Error::Error;
};

}  // namespace mns
