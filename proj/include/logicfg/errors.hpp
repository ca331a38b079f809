#pragma once

#include <stdexcept>
#include <string>

namespace logicfg {

// Base class for all diagnostics thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed fact or triple input. Carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(int line, const std::string& msg)
        : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// Incomplete or contradictory composites in a triple document.
class KgError : public Error {
public:
    using Error::Error;
};

// Raised when the rule closure cannot be computed (bad production plan,
// reserved symbols in the input).
class DeriveError : public Error {
public:
    using Error::Error;
};

} // namespace logicfg
