#include "bubblelens/error.hpp"

namespace bubblelens {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::Io: return "Io";
    case Errc::Usage: return "Usage";
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::NonPositivePrice: return "NonPositivePrice";
    case Errc::EmptySeries: return "EmptySeries";
    case Errc::DuplicateDate: return "DuplicateDate";
    case Errc::WindowOutOfRange: return "WindowOutOfRange";
    case Errc::WindowTooShort: return "WindowTooShort";
    case Errc::InvalidGrid: return "InvalidGrid";
    case Errc::InvalidScanConfig: return "InvalidScanConfig";
    case Errc::InvalidTc: return "InvalidTc";
    case Errc::InvalidQ: return "InvalidQ";
    case Errc::InvalidModelParams: return "InvalidModelParams";
    case Errc::InvalidPlantedParams: return "InvalidPlantedParams";
    case Errc::TimeAtOrPastCritical: return "TimeAtOrPastCritical";
    case Errc::InvalidNonlinearParams: return "InvalidNonlinearParams";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::AllGridPointsDegenerate: return "AllGridPointsDegenerate";
    case Errc::DegenerateDof: return "DegenerateDof";
    case Errc::TooFewCandidates: return "TooFewCandidates";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::ScanEmpty: return "ScanEmpty";
    case Errc::DegenerateTrend: return "DegenerateTrend";
    case Errc::ZeroVarianceResiduals: return "ZeroVarianceResiduals";
    case Errc::InsufficientRange: return "InsufficientRange";
  }
  return "Unknown";
}

bool is_input_error(Errc code) noexcept {
  return static_cast<int>(code) <= static_cast<int>(Errc::InvalidPlantedParams);
}

}  // namespace bubblelens
