#pragma once

#include <stdexcept>
#include <string>

namespace kdml {

// Invalid user configuration: hyperparameters, flags, config files.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed or inconsistent input data (files, shapes, labels).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical breakdown: non-finite objective, singular systems, failed line search.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kdml
