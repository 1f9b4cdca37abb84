#pragma once

#include <stdexcept>
#include <string>

namespace polybound {

// Malformed input files or values (instance JSON, proof text, rationals).
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// A precondition of an operation does not hold for the given input
// (non-simple instance passed to a simple-only engine, oracle size cap, ...).
struct PreconditionError : std::runtime_error {
    explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

// An internal invariant was breached; indicates a bug upstream, never bad input.
struct InternalError : std::logic_error {
    explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace polybound
