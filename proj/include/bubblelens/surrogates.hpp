#pragma once

#include "bubblelens/diagnostics.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

namespace bubblelens {

enum class NullModel { WhiteGaussian, Ar1, Fgn, LevyStable };

std::string_view null_model_name(NullModel model) noexcept;
/// Accepts the canonical names and the short forms white, ar1, fgn, levy.
NullModel parse_null_model(std::string_view name);

using Rng = std::mt19937_64;

/// Independent generator for surrogate `stream` under a run seed.
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

Eigen::VectorXd white_gaussian_noise(Index n, Rng& rng);
/// Stationary AR(1) with unit marginal variance.
Eigen::VectorXd ar1_noise(Index n, double phi, Rng& rng);
/// Unit-variance autocovariance of fractional Gaussian noise at `lag`.
double fgn_autocovariance(Index lag, double hurst);
/// Exact fractional Gaussian noise (unit variance) by circulant embedding.
Eigen::VectorXd fgn_noise(Index n, double hurst, Rng& rng);
/// Standard symmetric alpha-stable variate (Chambers-Mallows-Stuck).
double levy_stable_draw(double alpha, Rng& rng);
Eigen::VectorXd levy_stable_noise(Index n, double alpha, Rng& rng);

double lag1_autocorrelation(const Eigen::VectorXd& x);
/// Type-7 (linear interpolation) interquartile range.
double interquartile_range(const Eigen::VectorXd& x);

struct SurrogateConfig {
  NullModel model = NullModel::WhiteGaussian;
  int n_surrogates = 100;
  std::uint64_t seed = 42;
  /// AR(1) coefficient; estimated from the calibration series when unset.
  std::optional<double> ar1_phi;
  double hurst = 0.7;
  double alpha = 1.7;

  void validate() const;
};

/// One surrogate realisation matched to the calibration series: variance for
/// the Gaussian models, plus lag-1 autocorrelation for AR(1), and
/// interquartile range for the stable model.
Eigen::VectorXd gen_surrogate(const SurrogateConfig& config, Index length, const Eigen::VectorXd& calibration,
                              std::uint64_t index = 0);
inline Eigen::VectorXd gen_surrogate(const SurrogateConfig& config, Index length, const Residuals& calibration,
                                     std::uint64_t index = 0) {
  return gen_surrogate(config, length, calibration.r, index);
}

struct SignificanceResult {
  NullModel model = NullModel::WhiteGaussian;
  double observed_peak_power = 0.0;
  std::vector<double> surrogate_peak_powers;
  double p_value = 1.0;
  std::optional<double> ar1_phi;  ///< coefficient actually used, AR(1) only
};

/// Fraction of surrogate peaks at or above the observed peak.
double empirical_p_value(double observed, const std::vector<double>& surrogate_peaks);

SignificanceResult significance_test(const Residuals& residuals, const Eigen::VectorXd& omegas,
                                     const SurrogateConfig& config, int threads = 1);

}  // namespace bubblelens
