#pragma once

#include "bubblelens/timeseries.hpp"

#include <Eigen/Core>

#include <vector>

namespace testing_support {

// Consecutive weekdays starting at 2021-01-04 (a Monday).
inline std::vector<bubblelens::Date> weekdays(bubblelens::Index n) {
  std::vector<bubblelens::Date> out;
  bubblelens::Date d = bubblelens::parse_date("2021-01-04");
  while (bubblelens::Index(out.size()) < n) {
    const unsigned wd = std::chrono::weekday{d}.c_encoding();
    if (wd != 0 && wd != 6) out.push_back(d);
    d += std::chrono::days{1};
  }
  return out;
}

inline bubblelens::PriceSeries series_from_log(const Eigen::VectorXd& log_prices) {
  return bubblelens::PriceSeries::from_observations(weekdays(log_prices.size()), log_prices.array().exp().matrix());
}

}  // namespace testing_support
