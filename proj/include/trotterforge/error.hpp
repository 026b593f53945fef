#pragma once

#include <stdexcept>
#include <string>

namespace trotterforge {

/// Parameter or input rejected before any computation starts.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A problem exceeds the dense backend's size cap.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// A checked mathematical inequality did not hold.
class AssertionFailure : public std::runtime_error {
 public:
  explicit AssertionFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Every sample of a convergence fit sits below the roundoff floor.
class DegenerateFitError : public std::runtime_error {
 public:
  explicit DegenerateFitError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace trotterforge
