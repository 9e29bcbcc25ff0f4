#pragma once

#include "bubblelens/error.hpp"
#include "bubblelens/parallel.hpp"
#include "bubblelens/timeseries.hpp"

#include <Eigen/Core>

#include <cmath>

namespace bubblelens {

struct TrendParams {
  double A = 0.0;
  double B = 0.0;
  double beta = 0.0;
  double tc = 0.0;
};

/// Power-law detrended log-prices indexed by log-time x = ln(tc - t).
struct Residuals {
  Eigen::VectorXd x;  ///< decreasing in t
  Eigen::VectorXd r;
  TrendParams trend;
};

struct DetrendOptions {
  double beta_min = 0.05;
  double beta_max = 0.95;
  int beta_count = 50;
  /// Gauss-Newton polish of beta after the grid, clamped to [beta_min, beta_max].
  bool polish = true;
};

/// Fits A + B (tc - t)^beta with tc held fixed and subtracts it. `local` uses
/// window-local time (t = 0 at its first row).
Residuals detrend_power_law(const PriceSeries& local, double tc, const DetrendOptions& options = {});

/// n log-spaced points on [lo, hi].
Eigen::VectorXd log_spaced(double lo, double hi, Index n);

/// 1000 log-spaced angular log-frequencies on [0.2, 20].
Eigen::VectorXd default_omega_grid();

struct PeriodogramResult {
  Eigen::VectorXd omegas;
  Eigen::VectorXd power;
  double peak_omega = 0.0;
  double peak_power = 0.0;
};

/// Lomb periodogram of r sampled at x, with the phase offset
/// tan(2 w tau) = sum sin(2 w x) / sum cos(2 w x) making the estimate
/// invariant to shifts of x. With `normalize`, r is first mean-centred and
/// scaled to unit (population) variance.
template <typename DerivedX, typename DerivedR>
PeriodogramResult lomb_periodogram(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedR>& r,
                                   const Eigen::VectorXd& omegas, bool normalize = true, int threads = 1) {
  const Index n = x.size();
  if (n != r.size()) throw Error(Errc::Usage, "x and r differ in length");
  if (n < 10) throw Error(Errc::InsufficientRange, "need at least 10 residual points");
  if (omegas.size() == 0) throw Error(Errc::Usage, "empty frequency grid");
  for (Index i = 0; i < omegas.size(); ++i)
    if (!(omegas[i] > 0.0) || (i > 0 && !(omegas[i] > omegas[i - 1])))
      throw Error(Errc::Usage, "frequency grid must be positive and strictly increasing");

  const Eigen::ArrayXd xs = x.template cast<double>().array();
  Eigen::ArrayXd rs = r.template cast<double>().array();
  const double mean = rs.mean();
  const double sd = std::sqrt((rs - mean).square().mean());
  if (!(sd > 0.0) || (rs - mean).abs().maxCoeff() == 0.0)
    throw Error(Errc::ZeroVarianceResiduals, "residuals have zero variance");
  if (normalize) rs = (rs - mean) / sd;

  PeriodogramResult out;
  out.omegas = omegas;
  out.power.resize(omegas.size());
  parallel_for(omegas.size(), threads, [&](std::ptrdiff_t k) {
    const double w = omegas[k];
    const double tau = std::atan2((2.0 * w * xs).sin().sum(), (2.0 * w * xs).cos().sum()) / (2.0 * w);
    const Eigen::ArrayXd arg = w * (xs - tau);
    const Eigen::ArrayXd c = arg.cos();
    const Eigen::ArrayXd s = arg.sin();
    const double cc = c.square().sum();
    const double ss = s.square().sum();
    const double rc = (rs * c).sum();
    const double rsn = (rs * s).sum();
    double p = 0.0;
    if (cc > 0.0) p += rc * rc / cc;
    if (ss > 0.0) p += rsn * rsn / ss;
    out.power[k] = 0.5 * p;
  });
  Index arg = 0;
  out.peak_power = out.power.maxCoeff(&arg);
  out.peak_omega = omegas[arg];
  return out;
}

inline PeriodogramResult lomb_periodogram(const Residuals& residuals, const Eigen::VectorXd& omegas,
                                          bool normalize = true, int threads = 1) {
  return lomb_periodogram(residuals.x, residuals.r, omegas, normalize, threads);
}

struct HqDerivative {
  double H = 0.0;
  double q = 0.0;
  Eigen::VectorXd t;               ///< trading days since the window start
  Eigen::VectorXd log_tc_minus_t;  ///< ln(tc - t)
  Eigen::VectorXd value;           ///< D at each t
};

/// (log p(t) - log p(qt)) / ((1 - q) t)^H for t = 1..N-1, with log p(qt)
/// linearly interpolated between trading days.
HqDerivative hq_derivative(const PriceSeries& local, double tc, double H, double q);

}  // namespace bubblelens
