#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace atdf {

enum class Errc {
  InvalidArgument,
  InvalidTimestep,
  WindowTooShort,
  NonPositiveSteadyState,
  AmbiguousResponse,
  DegenerateOvershoot,
  DegeneratePhase,
  NoRealRoots,
  DegenerateDenominator,
  NoValidDesign,
  ParseError,
  ValidationError,
};

std::string_view to_string(Errc code) noexcept;

// Every failure raised by the library carries one of the codes above so
// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

  // Validation-type errors are the caller's fault; everything else is a
  // runtime failure of the identification/design chain.
  [[nodiscard]] bool is_validation() const noexcept {
    return code_ == Errc::InvalidArgument || code_ == Errc::InvalidTimestep ||
           code_ == Errc::ParseError || code_ == Errc::ValidationError;
  }

 private:
  Errc code_;
};

}  // namespace atdf
