#pragma once

#include "bubblelens/lppls.hpp"
#include "bubblelens/surrogates.hpp"
#include "bubblelens/timeseries.hpp"

#include <cstdint>

namespace bubblelens {

/// Synthetic price series: an optional random-walk segment followed by an
/// LPPLS bubble whose log-price is lppls_eval + noise. Bubble time is local:
/// t = 0 at the first bubble observation.
struct SynthSpec {
  LpplsParams params{240.0, 0.3, 8.0, 16.0, -0.6, 0.01, 0.005};
  Index length = 200;
  double noise_sd = 0.0;
  NullModel noise_model = NullModel::WhiteGaussian;
  double ar1_phi = 0.5;
  double hurst = 0.7;
  double alpha = 1.7;
  Index pre_bubble_length = 0;
  double pre_bubble_vol = 0.01;  ///< daily log-return sd of the random walk
  Date start_date = Date{std::chrono::year{2019} / 1 / 1};
  std::uint64_t seed = 42;

  void validate() const;
};

PriceSeries synthesize(const SynthSpec& spec);

}  // namespace bubblelens
