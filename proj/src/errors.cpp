#include "psa/errors.hpp"

namespace psa {

namespace {

std::string join(const std::vector<FieldError>& errors) {
  std::string out = "invalid configuration";
  for (const auto& e : errors) out += "\n  " + e.field + ": " + e.message;
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<FieldError> errors)
    : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

}  // namespace psa
