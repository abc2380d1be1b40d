#pragma once

#include <stdexcept>
#include <string>

namespace scantrack {

/// Thrown when an argument violates a documented precondition.
class InvalidInputError : public std::invalid_argument {
 public:
  explicit InvalidInputError(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when an object cannot be registered from its first observation.
class RegistrationError : public std::runtime_error {
 public:
  explicit RegistrationError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when surface extraction finds no zero crossing.
class EmptyMeshError : public std::runtime_error {
 public:
  explicit EmptyMeshError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace scantrack
