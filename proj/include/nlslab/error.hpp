#pragma once

#include <stdexcept>
#include <string>

namespace nlslab {

/// Base for every recoverable failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid model, solution or grid parameters.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A numerical precondition (decay, finiteness, convergence) does not hold.
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace nlslab
