#pragma once

#include <stdexcept>
#include <string>

namespace lprx {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A model, matrix, point or configuration failed a structural check.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// An exhaustive enumeration would exceed the configured cap.
class CapExceededError : public Error {
public:
    using Error::Error;
};

/// The solver hit a status that the polytopes built here can never produce.
class ConstructionError : public Error {
public:
    using Error::Error;
};

/// Text input (JSON, alist, dump, point file) could not be parsed.
class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace lprx
