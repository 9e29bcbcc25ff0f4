#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bubblelens {

enum class Errc {
  // input / usage
  Io,
  Usage,
  MalformedRow,
  NonPositivePrice,
  EmptySeries,
  DuplicateDate,
  WindowOutOfRange,
  WindowTooShort,
  InvalidGrid,
  InvalidScanConfig,
  InvalidTc,
  InvalidQ,
  InvalidModelParams,
  InvalidPlantedParams,
  // computational
  TimeAtOrPastCritical,
  InvalidNonlinearParams,
  RankDeficient,
  AllGridPointsDegenerate,
  DegenerateDof,
  TooFewCandidates,
  ZeroVariance,
  ScanEmpty,
  DegenerateTrend,
  ZeroVarianceResiduals,
  InsufficientRange,
};

std::string_view errc_name(Errc code) noexcept;

/// True for errors caused by bad input or arguments (CLI exit code 2).
bool is_input_error(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, long row = -1)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code), row_(row) {}

  Errc code() const noexcept { return code_; }
  /// 1-based line number in the source file, or -1 when not applicable.
  long row() const noexcept { return row_; }

 private:
  Errc code_;
  long row_;
};

}  // namespace bubblelens
