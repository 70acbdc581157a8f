// errors.hpp -- exception types shared across the toolkit.
#pragma once

#include <stdexcept>
#include <string>

namespace more {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument: bad dimensions, out-of-range parameters, violated preconditions.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Input is outside the mathematical domain of the operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A linear system could not be factorized, even after jitter escalation.
class SingularSystemError : public Error {
public:
    using Error::Error;
};

/// An expert's total responsibility mass collapsed below the weight floor.
class EmptyExpertError : public Error {
public:
    using Error::Error;
};

/// Data is degenerate or insufficient for the requested computation.
class DataError : public Error {
public:
    using Error::Error;
};

/// A file does not conform to its expected format.
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace more
