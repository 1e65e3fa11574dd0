#pragma once

#include <stdexcept>
#include <string>

namespace qlab {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed arguments or documents: bad indices, bad labels, bad files.
class InputError : public Error {
public:
    using Error::Error;
};

/// Request exceeds a documented size limit (dense conversion, unitary build).
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Operation invoked on a circuit in the wrong mode (e.g. exact run of a
/// measured circuit).
class ModeError : public Error {
public:
    using Error::Error;
};

} // namespace qlab
