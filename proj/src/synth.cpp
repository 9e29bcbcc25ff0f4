#include "bubblelens/synth.hpp"

#include <cmath>

namespace bubblelens {

void SynthSpec::validate() const {
  const auto& p = params;
  const bool ok = length >= 2 && p.beta > 0.0 && p.beta <= 1.0 && p.omega > 0.0 && std::isfinite(p.tc) &&
                  p.tc > double(length - 1) && std::isfinite(p.A) && std::isfinite(p.B) && std::isfinite(p.C1) &&
                  std::isfinite(p.C2) && noise_sd >= 0.0 && pre_bubble_length >= 0 && pre_bubble_vol >= 0.0;
  if (!ok)
    throw Error(Errc::InvalidPlantedParams,
                "need 0 < beta <= 1, omega > 0, tc beyond the last bubble day, non-negative noise");
  if (noise_sd > 0.0) {
    const bool noise_ok = (noise_model != NullModel::Ar1 || std::abs(ar1_phi) < 1.0) &&
                          (noise_model != NullModel::Fgn || (hurst > 0.0 && hurst < 1.0)) &&
                          (noise_model != NullModel::LevyStable || (alpha > 0.0 && alpha <= 2.0));
    if (!noise_ok) throw Error(Errc::InvalidPlantedParams, "invalid noise model parameters");
  }
}

PriceSeries synthesize(const SynthSpec& spec) {
  spec.validate();
  const Index total = spec.pre_bubble_length + spec.length;

  Eigen::VectorXd bubble = lppls_eval(spec.params, Eigen::VectorXd::LinSpaced(spec.length, 0.0, double(spec.length - 1)));
  if (spec.noise_sd > 0.0) {
    Rng rng = make_stream(spec.seed, 0);
    Eigen::VectorXd noise;
    switch (spec.noise_model) {
      case NullModel::WhiteGaussian: noise = white_gaussian_noise(spec.length, rng); break;
      case NullModel::Ar1: noise = ar1_noise(spec.length, spec.ar1_phi, rng); break;
      case NullModel::Fgn: noise = fgn_noise(spec.length, spec.hurst, rng); break;
      case NullModel::LevyStable: noise = levy_stable_noise(spec.length, spec.alpha, rng); break;
    }
    bubble += spec.noise_sd * noise;
  }

  Eigen::VectorXd log_prices(total);
  log_prices.tail(spec.length) = bubble;
  if (spec.pre_bubble_length > 0) {
    // Walk backwards from the bubble's first value so the two segments join.
    Rng rng = make_stream(spec.seed, 1);
    const Eigen::VectorXd steps = white_gaussian_noise(spec.pre_bubble_length, rng);
    double level = bubble[0];
    for (Index i = spec.pre_bubble_length - 1; i >= 0; --i) {
      level -= spec.pre_bubble_vol * steps[i];
      log_prices[i] = level;
    }
  }

  std::vector<Date> dates;
  dates.reserve(std::size_t(total));
  Date d = spec.start_date;
  while (dates.size() < std::size_t(total)) {
    const unsigned wd = std::chrono::weekday{d}.c_encoding();
    if (wd != 0 && wd != 6) dates.push_back(d);
    d += std::chrono::days{1};
  }
  return PriceSeries::from_observations(std::move(dates), log_prices.array().exp().matrix());
}

}  // namespace bubblelens
