#pragma once

#include <stdexcept>
#include <string>

namespace tdacpd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Window size does not fit the series (w < 2 or w > T).
class InvalidWindow : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

/// The requested operation is not defined for this kind of input.
class Unsupported : public Error {
public:
    using Error::Error;
};

/// A model could not be estimated from the data.
class FitError : public Error {
public:
    using Error::Error;
};

/// Malformed text input (CSV, config, sweep files).
class ParseError : public Error {
public:
    using Error::Error;
};

/// A simulation scenario is internally inconsistent.
class InvalidSpec : public Error {
public:
    using Error::Error;
};

} // namespace tdacpd
