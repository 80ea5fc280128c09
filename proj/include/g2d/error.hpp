#pragma once

#include <stdexcept>
#include <string>

namespace g2d {

// An instance exceeds a configured size or enumeration budget. Operations
// refuse up front instead of silently truncating.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative kernel hit its iteration cap. Carries the best residual seen.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Malformed text input (matrix, set system, certificate bundle).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace g2d
