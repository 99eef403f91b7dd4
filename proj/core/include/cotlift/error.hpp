#pragma once

#include <stdexcept>
#include <string>

namespace cotlift {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class UnboundVariableError : public Error {
public:
    explicit UnboundVariableError(const std::string& name)
        : Error("unbound variable: " + name), name_(name) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

class DomainError : public Error {
public:
    using Error::Error;
};

// Parse errors carry 1-based line/column of the offending token.
class ParseError : public Error {
public:
    ParseError(int line, int column, const std::string& message)
        : Error("parse error at " + std::to_string(line) + ":" + std::to_string(column) +
                ": " + message),
          line_(line),
          column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

// Raised when a stated hypothesis of a construction is violated; the CLI maps
// these to exit code 2 (refusal) rather than 1 (failure).
class HypothesisError : public Error {
public:
    using Error::Error;
};

}  // namespace cotlift
