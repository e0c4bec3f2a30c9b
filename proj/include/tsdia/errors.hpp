#pragma once

#include <stdexcept>
#include <string>

namespace tsdia {

/// Argument outside the mathematical domain of an operation (x <= 0 for q_log, lambda < 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure failed to meet its tolerance: quadrature, factorization,
/// per-step Volterra solve, Laplace inversion.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration. `path()` names the offending key ("kernel.q").
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::invalid_argument(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace tsdia
