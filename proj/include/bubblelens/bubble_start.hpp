#pragma once

#include "bubblelens/fit.hpp"
#include "bubblelens/timeseries.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bubblelens {

struct ScanConfig {
  Index t2 = 0;  ///< fixed window end, index into the series
  Index t1_earliest = 0;
  Index t1_latest = 0;
  Index t1_step = 5;
  GridSpec grid;
  int k = 7;  ///< free parameters: tc, beta, omega, A, B, C1, C2

  void validate(Index series_length) const;
};

struct ScanCandidate {
  Index t1 = 0;
  Index window_size = 0;  ///< t2 - t1, in trading days
  double chi2_np = 0.0;
  double chi2_lambda = 0.0;
  FitResult fit;
};

struct ScanFailure {
  Index t1 = 0;
  std::string reason;
};

struct ScanResult {
  Index t2 = 0;
  std::vector<ScanCandidate> candidates;  ///< ordered by t1
  std::vector<ScanFailure> failures;
  double lambda = 0.0;
  Index t1_star = 0;
  Date t1_star_date{};
};

/// Residual sum of squares of `fit` over its window, divided by N - k.
double chi2_np(const PriceSeries& series, const FitResult& fit, int k);

/// lambda from the least-squares line chi2_np = a + b * window_size.
/// Input pairs are (window_size, chi2_np).
double estimate_lambda(const std::vector<std::pair<double, double>>& points);

/// Index of the minimum of chi2_lambda (earliest t1 on ties).
std::size_t argmin_chi2_lambda(const std::vector<ScanCandidate>& candidates);

/// Fills chi2_lambda = chi2_np - lambda * window_size and selects t1*.
void apply_lagrange_penalty(ScanResult& result, double lambda);

ScanResult scan_bubble_start(const PriceSeries& series, const ScanConfig& config, int threads = 1);

struct SweepEntry {
  Index shift = 0;
  Index t2 = 0;
  std::optional<ScanResult> scan;
  std::string error;  ///< set when the shifted scan failed
};

struct SweepResult {
  std::vector<SweepEntry> entries;
  /// max - min of t1* over successful shifts, in trading days.
  Index t1_star_spread = 0;
};

inline const std::vector<Index> kDefaultShifts{15, 30, 45, 60};

SweepResult robustness_sweep(const PriceSeries& series, const ScanConfig& config,
                             const std::vector<Index>& shifts = kDefaultShifts, int threads = 1);

}  // namespace bubblelens
