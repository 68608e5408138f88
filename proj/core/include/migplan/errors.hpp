#pragma once

#include <stdexcept>
#include <string>

namespace migplan {

/// Malformed input document (bad JSON, missing fields, unknown keys).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structurally well-formed input that violates a domain invariant
/// (duplicate ids, negative capacity, dangling endpoint, bad precondition).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A solver could not produce a result (infeasible committed plan,
/// non-terminating scenario, internal failure).
class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Instance exceeds a hard size cap of the exact oracle.
class SizeBoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace migplan
