#pragma once

#include <stdexcept>
#include <string>

namespace hbie {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the domain of a special function.
class DomainError : public Error {
public:
    using Error::Error;
};

// A scaled recurrence left the representable range.
class OverflowError : public Error {
public:
    using Error::Error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

// Source and target points coincide where the kernel is singular.
class CoincidenceError : public Error {
public:
    using Error::Error;
};

class UnsupportedSpace : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

} // namespace hbie
