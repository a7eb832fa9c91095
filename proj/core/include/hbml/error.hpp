#pragma once

#include <stdexcept>
#include <string>

namespace hbml {

/// Bad input: malformed data, inconsistent options, violated preconditions.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// File could not be opened, read, or written, or would be clobbered.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical routine failed (non-SPD matrix, NaN log density, ...).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hbml
