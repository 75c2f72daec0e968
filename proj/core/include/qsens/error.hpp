#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qsens {

enum class Errc {
  NotHermitian,
  NotPSD,
  NoConvergence,
  DimensionMismatch,
  InvalidState,
  EpsilonOutOfRange,
  ROutOfRange,
  InvalidLevel,
  NotEntangled,
  DegenerateGrid,
  SingularDesign,
  InvalidArgument,
};

std::string_view to_string(Errc code) noexcept;

// Numeric failures are problems with the computation or the physics of the
// input; everything else is a usage or parameter error.
constexpr bool is_numeric_failure(Errc code) noexcept {
  switch (code) {
    case Errc::NotHermitian:
    case Errc::NotPSD:
    case Errc::NoConvergence:
    case Errc::NotEntangled:
    case Errc::SingularDesign:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace qsens
