#pragma once

#include <stdexcept>
#include <string>

namespace shiftscope {

/// Base class for every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on the shape of the input was violated (bad window,
/// window too short for the requested model, mismatched histograms, ...).
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// The input is well formed but carries no information for the requested
/// quantity (empty timeline, zero mean rate, empty sample).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// A record or configuration document could not be parsed.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Raised by SourceClient implementations when the upstream source fails.
class SourceError : public Error {
public:
    using Error::Error;
};

} // namespace shiftscope
