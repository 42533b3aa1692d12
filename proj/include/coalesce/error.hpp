#pragma once

#include <stdexcept>
#include <string>

namespace coalesce {

// Bad arguments from a caller (CLI exit code 2).
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

// Parameters outside the domain where a formula is defined (CLI exit code 2).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Exhaustive enumeration asked to do more than it can.
class CapacityError : public std::length_error {
 public:
  explicit CapacityError(const std::string& what) : std::length_error(what) {}
};

}  // namespace coalesce
