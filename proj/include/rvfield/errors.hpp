#pragma once

#include <stdexcept>
#include <string>

namespace rvf {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// xi_bar lies outside the null-shell set for the chosen ell.
struct OutsideShellError : DomainError {
  using DomainError::DomainError;
};

struct DegenerateDirectionError : DomainError {
  using DomainError::DomainError;
};

struct EmptyFieldError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when N or L are requested for modes without analytic d(amp)/d(xi).
struct UnsupportedFieldError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& field, const std::string& msg, int line = 0)
      : std::runtime_error(format(field, msg, line)), field(field), line(line) {}

  std::string field;
  int line;

 private:
  static std::string format(const std::string& field, const std::string& msg, int line) {
    std::string s = "config";
    if (line > 0) s += ":" + std::to_string(line);
    if (!field.empty()) s += ": " + field;
    return s + ": " + msg;
  }
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rvf
