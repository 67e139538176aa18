// Error types shared by every module.
#pragma once

#include <stdexcept>
#include <string>

namespace wiener {

/// Argument outside the documented domain of an operation.
class DomainError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to reach its target (degenerate formula,
/// bracket that never straddles, ...).
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Quadrature did not reach its tolerance at maximum refinement.
class QuadratureError : public NumericalError {
  public:
    QuadratureError(const std::string &what, double achieved_error)
        : NumericalError(what + " (achieved error estimate " +
                         std::to_string(achieved_error) + ")"),
          achieved_error_(achieved_error) {}

    double achieved_error() const noexcept { return achieved_error_; }

  private:
    double achieved_error_;
};

} // namespace wiener
