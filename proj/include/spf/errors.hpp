#pragma once

#include <stdexcept>
#include <string>

namespace spf {

// Input exceeds a configured size cap (2^n lattice, n! permutations, ...).
class SizeLimitError : public std::runtime_error {
 public:
  explicit SizeLimitError(const std::string& what) : std::runtime_error(what) {}
};

// A mathematical invariant that should hold for every reachable state was
// observed to fail (e.g. a feasible interval with lower > upper). Always a bug.
class InvariantViolationError : public std::logic_error {
 public:
  explicit InvariantViolationError(const std::string& what)
      : std::logic_error(what) {}
};

// Internal bookkeeping is inconsistent (e.g. a memo entry that must exist is
// missing). Always a bug.
class InternalConsistencyError : public std::logic_error {
 public:
  explicit InternalConsistencyError(const std::string& what)
      : std::logic_error(what) {}
};

}  // namespace spf
