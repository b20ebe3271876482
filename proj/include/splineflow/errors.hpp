#pragma once

#include <stdexcept>
#include <string>

namespace splineflow {

// Input data has the wrong dimensions (ragged flow, mismatched operands,
// trajectory length not representable as groups in strict mode).
class ShapeError : public std::runtime_error {
public:
  explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

// A file could not be decoded; carries the 1-based line number when known.
class ParseError : public std::runtime_error {
public:
  explicit ParseError(const std::string& what, long line = -1)
      : std::runtime_error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  long line() const { return line_; }

private:
  long line_;
};

// A multi-part input (e.g. a coefficient set) is missing pieces.
class IncompleteInputError : public std::runtime_error {
public:
  explicit IncompleteInputError(const std::string& what) : std::runtime_error(what) {}
};

// Strict partitioning requires p to divide M.
class DivisibilityError : public std::runtime_error {
public:
  explicit DivisibilityError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace splineflow
