#pragma once

#include <stdexcept>
#include <string>

namespace jgreedy {

/// Argument outside the domain of a function (|x| > 1, theta outside (0, pi), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Intermediate value left the representable range of double.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// A user-supplied integrand returned NaN or infinity.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameter combination (alpha, beta, p, mesh, grids).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Mesh refinement exhausted without meeting the tolerance.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double previous, double last)
      : std::runtime_error(what + " (last two estimates: " + std::to_string(previous) +
                           ", " + std::to_string(last) + ")"),
        previous_(previous),
        last_(last) {}

  double previous() const noexcept { return previous_; }
  double last() const noexcept { return last_; }

 private:
  double previous_;
  double last_;
};

}  // namespace jgreedy
