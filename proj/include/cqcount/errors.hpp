#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cqcount {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed query text. Positions are 1-based.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t col, const std::string& msg)
        : Error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
          line(line), col(col) {}

    std::size_t line;
    std::size_t col;
};

// Bad input data: missing files, ragged CSV rows, arity mismatches,
// divisibility violations, malformed graphs.
class InputError : public Error {
public:
    using Error::Error;
};

// A structural precondition does not hold (maps to CLI exit code 3).
class StructureError : public Error {
public:
    using Error::Error;
};

class NotAcyclicError : public StructureError {
public:
    using StructureError::StructureError;
};

class EngineInapplicableError : public StructureError {
public:
    using StructureError::StructureError;
};

class TargetFreeConnexError : public StructureError {
public:
    using StructureError::StructureError;
};

class HasQuantifiedVarsError : public StructureError {
public:
    using StructureError::StructureError;
};

// Quantified-variable elimination ran out of applicable rules while
// quantified variables remain. Unreachable on free-connex inputs; reaching
// it there is a defect, and the verification suites treat it as one.
class StuckNotFreeConnexError : public Error {
public:
    using Error::Error;
};

// An internal invariant failed (e.g. a free path with a chord).
class InternalError : public Error {
public:
    using Error::Error;
};

} // namespace cqcount
