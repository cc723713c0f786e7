#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace psa {

// Argument outside the physical domain (c outside [0,1], u <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Internal invariant broken during a run. Maps to CLI exit status 2.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FieldError {
  std::string field;
  std::string message;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<FieldError> errors);
  ConfigError(std::string field, std::string message)
      : ConfigError(std::vector<FieldError>{{std::move(field), std::move(message)}}) {}
  const std::vector<FieldError>& errors() const { return errors_; }

 private:
  std::vector<FieldError> errors_;
};

class CflError : public std::runtime_error {
 public:
  CflError(const std::string& what, double suggested_dx)
      : std::runtime_error(what), suggested_dx_(suggested_dx) {}
  double suggested_dx() const { return suggested_dx_; }

 private:
  double suggested_dx_;
};

}  // namespace psa
