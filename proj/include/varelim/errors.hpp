#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace varelim {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed BCSP or trace text. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// An exhaustive oracle was asked to search a space beyond its guard.
class SizeGuardError : public Error {
public:
    using Error::Error;
};

/// Solution reconstruction could not extend an assignment, or the trace does
/// not belong to the instance.
class ReconstructionError : public Error {
public:
    using Error::Error;
};

} // namespace varelim
