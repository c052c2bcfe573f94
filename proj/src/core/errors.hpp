#ifndef PANELSELECT_CORE_ERRORS_HPP
#define PANELSELECT_CORE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace panelselect {

// Error categories. The C API maps each category to a status code, and
// status codes map to process exit classes (config/validation vs numeric).
enum class ErrorCode {
  io,
  schema,
  parse,
  integrity,
  validation,
  config,
  contract,
  parameter,
  domain,
  numeric,
  singular,
  not_identified,
  no_convergence,
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

  // true for data/config problems, false for numerical failures
  bool is_config_class() const {
    switch (code_) {
      case ErrorCode::io:
      case ErrorCode::schema:
      case ErrorCode::parse:
      case ErrorCode::integrity:
      case ErrorCode::validation:
      case ErrorCode::config:
      case ErrorCode::contract:
      case ErrorCode::parameter:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorCode code_;
};

}  // namespace panelselect

#endif
