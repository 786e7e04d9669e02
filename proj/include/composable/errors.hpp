#pragma once

#include <stdexcept>
#include <string>

namespace composable {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Wavelength plan cannot be built (odd or non-positive channel count).
class InvalidPlan : public Error {
public:
    using Error::Error;
};

/// A component is asked to carry more load than its capacity.
class CapacityViolation : public Error {
public:
    using Error::Error;
};

/// Instance exceeds the brute-force enumeration guard.
class SizeError : public Error {
public:
    using Error::Error;
};

/// Malformed or out-of-range input file. `field()` names the offending key.
class ParseError : public Error {
public:
    ParseError(std::string field, const std::string& what)
        : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

} // namespace composable
