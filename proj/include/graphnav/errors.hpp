#pragma once

#include <stdexcept>
#include <string>

namespace graphnav {

/// Malformed data model: dangling ids, empty map, shape mismatch on load.
class StructureError : public std::runtime_error {
 public:
  explicit StructureError(const std::string& msg) : std::runtime_error(msg) {}
};

/// File could not be parsed; message carries field/record context.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Requested plan does not exist (unreachable goal, empty path).
class PlanningError : public std::runtime_error {
 public:
  explicit PlanningError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Query outside the defined domain (out-of-bounds position, empty dataset).
class QueryError : public std::runtime_error {
 public:
  explicit QueryError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Caller violated a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace graphnav
