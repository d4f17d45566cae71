#pragma once

#include <stdexcept>
#include <string>

namespace tanimoto {

/// Invalid or inconsistent input data (bad entries, shape mismatches,
/// malformed files). Maps to CLI exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical procedure failed (factorization breakdown, degenerate
/// smooth denominator). Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tanimoto
