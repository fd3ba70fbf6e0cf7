#pragma once

#include <stdexcept>
#include <string>

namespace isowalk {

// Bad input: unknown family, inconsistent parameters, malformed walk.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Enumeration cap or memory budget exceeded.
class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// A c-function factor vanished at the requested character.
class SingularError : public std::domain_error {
 public:
  explicit SingularError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace isowalk
