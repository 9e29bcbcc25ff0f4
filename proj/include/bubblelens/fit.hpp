#pragma once

#include "bubblelens/lppls.hpp"
#include "bubblelens/timeseries.hpp"

#include <vector>

namespace bubblelens {

/// Search grid over the nonlinear parameters. tc is given as offsets from the
/// last observation of the fitted window.
struct GridSpec {
  double tc_offset_min = 10.0;
  double tc_offset_max = 200.0;
  double tc_step = 2.0;
  double beta_min = 0.1;
  double beta_max = 1.0;
  int beta_count = 30;
  double omega_min = 6.0;
  double omega_max = 13.0;
  int omega_count = 20;
  /// Nelder-Mead polish of (tc, beta, omega) inside the winning grid cell.
  bool refine = false;

  void validate() const;
  std::vector<double> tc_values(double t_last) const;
  std::vector<double> beta_values() const;
  std::vector<double> omega_values() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Uniform grid value k of count points on [lo, hi].
double uniform_grid_value(double lo, double hi, int count, int k);

struct BoundaryFlags {
  bool tc = false;
  bool beta = false;
  bool omega = false;

  friend bool operator==(const BoundaryFlags&, const BoundaryFlags&) = default;
};

struct FitResult {
  LpplsParams params;  ///< tc in window-local trading days
  Window window;       ///< indices into the parent series
  double rmse = 0.0;
  Index n_obs = 0;
  BoundaryFlags boundary;
  Index degenerate_points = 0;  ///< grid points skipped as rank deficient
  GridSpec grid;

  friend bool operator==(const FitResult&, const FitResult&) = default;
};

/// Two-step calibration over the whole of `local` (t = 0 at its first row):
/// every grid triplet is profiled by OLS for (A, B, C1, C2), the lowest RMSE
/// wins, ties going to the smallest tc, then beta, then omega.
FitResult fit_series(const PriceSeries& local, const GridSpec& grid = {}, int threads = 1);

/// fit_series on slice(series, window); the result records `window`.
FitResult fit_window(const PriceSeries& series, const Window& window, const GridSpec& grid = {},
                     int threads = 1);

/// Fitted log-prices over the window the result was computed on.
Eigen::VectorXd fitted_values(const FitResult& fit);

}  // namespace bubblelens
