#pragma once

#include <stdexcept>
#include <string>

namespace cspgeo {

/// Inputs violate an operation's preconditions.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// An explicit work or memory budget would be exceeded.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// A numeric routine failed to converge.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// The requested quantity is not defined for this input (e.g. distances with one cluster).
class UndefinedResultError : public std::domain_error {
 public:
  explicit UndefinedResultError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace cspgeo
