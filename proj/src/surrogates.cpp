#include "bubblelens/surrogates.hpp"

#include "bubblelens/parallel.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace bubblelens {

std::string_view null_model_name(NullModel model) noexcept {
  switch (model) {
    case NullModel::WhiteGaussian: return "white_gaussian";
    case NullModel::Ar1: return "ar1";
    case NullModel::Fgn: return "fgn";
    case NullModel::LevyStable: return "levy_stable";
  }
  return "unknown";
}

NullModel parse_null_model(std::string_view name) {
  if (name == "white" || name == "white_gaussian") return NullModel::WhiteGaussian;
  if (name == "ar1") return NullModel::Ar1;
  if (name == "fgn") return NullModel::Fgn;
  if (name == "levy" || name == "levy_stable") return NullModel::LevyStable;
  throw Error(Errc::Usage, "unknown null model '" + std::string(name) + "'");
}

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(stream),
                    std::uint32_t(stream >> 32), 0x6c707073u};
  return Rng(seq);
}

Eigen::VectorXd white_gaussian_noise(Index n, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd out(n);
  for (Index i = 0; i < n; ++i) out[i] = normal(rng);
  return out;
}

Eigen::VectorXd ar1_noise(Index n, double phi, Rng& rng) {
  if (!(std::abs(phi) < 1.0)) throw Error(Errc::InvalidModelParams, "AR(1) needs |phi| < 1");
  std::normal_distribution<double> normal;
  Eigen::VectorXd out(n);
  if (n == 0) return out;
  const double innovation_sd = std::sqrt(1.0 - phi * phi);
  out[0] = normal(rng);
  for (Index i = 1; i < n; ++i) out[i] = phi * out[i - 1] + innovation_sd * normal(rng);
  return out;
}

double fgn_autocovariance(Index lag, double hurst) {
  const double k = std::abs(double(lag));
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(k + 1.0, h2) - 2.0 * std::pow(k, h2) + std::pow(std::abs(k - 1.0), h2));
}

Eigen::VectorXd fgn_noise(Index n, double hurst, Rng& rng) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw Error(Errc::InvalidModelParams, "fGn needs 0 < H < 1");
  Eigen::VectorXd out(n);
  if (n == 0) return out;
  if (n == 1) {
    out[0] = std::normal_distribution<double>()(rng);
    return out;
  }
  // Circulant of size 2n whose first row is gamma(0..n), gamma(n-1..1).
  const Index m = 2 * n;
  std::vector<std::complex<double>> row(static_cast<std::size_t>(m)), eig;
  for (Index j = 0; j < m; ++j) row[std::size_t(j)] = fgn_autocovariance(std::min(j, m - j), hurst);
  Eigen::FFT<double> fft;
  fft.fwd(eig, row);

  std::normal_distribution<double> normal;
  std::vector<std::complex<double>> weighted(static_cast<std::size_t>(m)), field;
  for (Index k = 0; k < m; ++k) {
    double lambda = eig[std::size_t(k)].real();
    if (lambda < 0.0) {
      if (lambda < -1e-8) throw Error(Errc::InvalidModelParams, "circulant embedding is not non-negative definite");
      lambda = 0.0;
    }
    const double a = normal(rng);
    const double b = normal(rng);
    weighted[std::size_t(k)] = std::sqrt(lambda / double(m)) * std::complex<double>(a, b);
  }
  fft.fwd(field, weighted);
  for (Index i = 0; i < n; ++i) out[i] = field[std::size_t(i)].real();
  return out;
}

double levy_stable_draw(double alpha, Rng& rng) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw Error(Errc::InvalidModelParams, "stable law needs 0 < alpha <= 2");
  std::uniform_real_distribution<double> uniform(-0.5 * std::numbers::pi, 0.5 * std::numbers::pi);
  std::exponential_distribution<double> exponential(1.0);
  double v = uniform(rng);
  while (v == -0.5 * std::numbers::pi) v = uniform(rng);
  const double w = exponential(rng);
  return std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
         std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
}

Eigen::VectorXd levy_stable_noise(Index n, double alpha, Rng& rng) {
  Eigen::VectorXd out(n);
  for (Index i = 0; i < n; ++i) out[i] = levy_stable_draw(alpha, rng);
  return out;
}

double lag1_autocorrelation(const Eigen::VectorXd& x) {
  const Index n = x.size();
  if (n < 2) return 0.0;
  const Eigen::ArrayXd c = x.array() - x.mean();
  const double denom = c.square().sum();
  if (!(denom > 0.0)) return 0.0;
  return (c.head(n - 1) * c.tail(n - 1)).sum() / denom;
}

double interquartile_range(const Eigen::VectorXd& x) {
  if (x.size() == 0) return 0.0;
  std::vector<double> v(x.data(), x.data() + x.size());
  std::sort(v.begin(), v.end());
  const auto quantile = [&](double p) {
    const double h = (double(v.size()) - 1.0) * p;
    const auto lo = std::size_t(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - double(lo)) * (v[hi] - v[lo]);
  };
  return quantile(0.75) - quantile(0.25);
}

void SurrogateConfig::validate() const {
  if (n_surrogates < 1) throw Error(Errc::InvalidModelParams, "n_surrogates must be >= 1");
  if (ar1_phi && !(std::abs(*ar1_phi) < 1.0)) throw Error(Errc::InvalidModelParams, "AR(1) needs |phi| < 1");
  if (!(hurst > 0.0 && hurst < 1.0)) throw Error(Errc::InvalidModelParams, "fGn needs 0 < H < 1");
  if (!(alpha > 0.0 && alpha <= 2.0)) throw Error(Errc::InvalidModelParams, "stable law needs 0 < alpha <= 2");
}

Eigen::VectorXd gen_surrogate(const SurrogateConfig& config, Index length, const Eigen::VectorXd& calibration,
                              std::uint64_t index) {
  config.validate();
  if (length < 10) throw Error(Errc::InvalidModelParams, "surrogate length must be >= 10");
  if (calibration.size() < 2) throw Error(Errc::InvalidModelParams, "calibration series too short");
  Rng rng = make_stream(config.seed, index);
  const double sd = std::sqrt((calibration.array() - calibration.mean()).square().mean());
  switch (config.model) {
    case NullModel::WhiteGaussian:
      return sd * white_gaussian_noise(length, rng);
    case NullModel::Ar1: {
      const double phi = config.ar1_phi.value_or(lag1_autocorrelation(calibration));
      return sd * ar1_noise(length, phi, rng);
    }
    case NullModel::Fgn:
      return sd * fgn_noise(length, config.hurst, rng);
    case NullModel::LevyStable: {
      Eigen::VectorXd draws = levy_stable_noise(length, config.alpha, rng);
      const double iqr = interquartile_range(draws);
      return iqr > 0.0 ? Eigen::VectorXd(draws * (interquartile_range(calibration) / iqr)) : draws;
    }
  }
  throw Error(Errc::InvalidModelParams, "unknown null model");
}

double empirical_p_value(double observed, const std::vector<double>& surrogate_peaks) {
  if (surrogate_peaks.empty()) throw Error(Errc::InvalidModelParams, "no surrogate peaks");
  const auto hits = std::count_if(surrogate_peaks.begin(), surrogate_peaks.end(),
                                  [&](double p) { return p >= observed; });
  return double(hits) / double(surrogate_peaks.size());
}

SignificanceResult significance_test(const Residuals& residuals, const Eigen::VectorXd& omegas,
                                     const SurrogateConfig& config, int threads) {
  config.validate();
  SignificanceResult out;
  out.model = config.model;
  out.observed_peak_power = lomb_periodogram(residuals, omegas).peak_power;

  SurrogateConfig effective = config;
  if (config.model == NullModel::Ar1) {
    effective.ar1_phi = config.ar1_phi.value_or(lag1_autocorrelation(residuals.r));
    out.ar1_phi = effective.ar1_phi;
  }
  out.surrogate_peak_powers.resize(std::size_t(config.n_surrogates));
  parallel_for(config.n_surrogates, threads, [&](std::ptrdiff_t j) {
    const Eigen::VectorXd s = gen_surrogate(effective, residuals.r.size(), residuals.r, std::uint64_t(j));
    out.surrogate_peak_powers[std::size_t(j)] = lomb_periodogram(residuals.x, s, omegas).peak_power;
  });
  out.p_value = empirical_p_value(out.observed_peak_power, out.surrogate_peak_powers);
  return out;
}

}  // namespace bubblelens
