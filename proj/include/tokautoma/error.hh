#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tokautoma {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed textual input (dictionary, regex, token stream, JSON document).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column = 0)
        : Error(what), line_(line), column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// A symbol or token outside the alphabet in use. Position is 0-based.
class AlphabetError : public Error {
public:
    AlphabetError(const std::string& what, std::size_t position)
        : Error(what), position_(position) {}

    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// An internal invariant of a construction did not hold.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

/// A configured exploration cap was hit before the answer was known.
class LimitExceeded : public Error {
public:
    using Error::Error;
};

} // namespace tokautoma
