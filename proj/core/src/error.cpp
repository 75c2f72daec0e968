#include "qsens/error.hpp"

namespace qsens {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::NotHermitian: return "NotHermitian";
    case Errc::NotPSD: return "NotPSD";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidState: return "InvalidState";
    case Errc::EpsilonOutOfRange: return "EpsilonOutOfRange";
    case Errc::ROutOfRange: return "ROutOfRange";
    case Errc::InvalidLevel: return "InvalidLevel";
    case Errc::NotEntangled: return "NotEntangled";
    case Errc::DegenerateGrid: return "DegenerateGrid";
    case Errc::SingularDesign: return "SingularDesign";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace qsens
