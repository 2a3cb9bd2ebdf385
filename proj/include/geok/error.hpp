#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geok {

enum class Errc {
  invalid_argument,
  non_convergence,
  asymmetric_row,
  not_positive_definite,
  invalid_point,
  kind_mismatch,
  unsupported,
  parse_error,
  metric_violation,
  ambiguous_lift,
  class_changed,
  ode_failure,
  point_off_loop,
  out_of_memory,
};

std::string_view to_string(Errc code) noexcept;

/// Single exception type for the library; `code()` tells callers (and the CLI
/// exit-code mapping) which contract was broken.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Numeric failures map to CLI exit code 2; everything else is a usage error.
inline bool is_numeric_failure(Errc code) noexcept {
  switch (code) {
    case Errc::non_convergence:
    case Errc::not_positive_definite:
    case Errc::class_changed:
    case Errc::ode_failure:
    case Errc::out_of_memory:
    case Errc::ambiguous_lift:
      return true;
    default:
      return false;
  }
}

}  // namespace geok
