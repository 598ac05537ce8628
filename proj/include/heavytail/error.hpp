#pragma once

#include <stdexcept>
#include <string>

namespace heavytail {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input data cannot be used: missing file, bad header, too many bad rows.
class DataError : public Error {
public:
    using Error::Error;
};

// An argument lies outside the support or domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

// A moment requested from a law whose moment does not exist.
class InfiniteMomentError : public DomainError {
public:
    using DomainError::DomainError;
};

// An estimator failed: too little data, non-convergence, infeasible start.
class EstimationError : public Error {
public:
    using Error::Error;
};

} // namespace heavytail
