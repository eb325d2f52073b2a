#pragma once

#include <stdexcept>
#include <string>

namespace csqpt {

// Bad inputs: malformed files, out-of-range parameters, schema violations.
// CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical contract was broken mid-computation (trace drift, likelihood
// decrease, truncation overflow, ...). CLI maps this to exit code 2.
class NumericalContractError : public std::runtime_error {
 public:
  explicit NumericalContractError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace csqpt
