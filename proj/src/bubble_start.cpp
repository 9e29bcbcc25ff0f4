#include "bubblelens/bubble_start.hpp"

#include "bubblelens/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace bubblelens {

void ScanConfig::validate(Index series_length) const {
  if (!(t1_earliest >= 0 && t1_earliest < t1_latest && t1_latest < t2 && t2 < series_length))
    throw Error(Errc::InvalidScanConfig, "need 0 <= t1_earliest < t1_latest < t2 < series length");
  if (t1_step < 1 || k < 1) throw Error(Errc::InvalidScanConfig, "t1_step and k must be positive");
  if (t2 - t1_latest + 1 < kMinWindowLength)
    throw Error(Errc::InvalidScanConfig, "shortest window [t1_latest, t2] has fewer than " +
                                             std::to_string(kMinWindowLength) + " observations");
  grid.validate();
}

double chi2_np(const PriceSeries& series, const FitResult& fit, int k) {
  const Index n = fit.window.length();
  if (n <= k) throw Error(Errc::DegenerateDof, "N = " + std::to_string(n) + " <= k = " + std::to_string(k));
  const Eigen::VectorXd observed = slice(series, fit.window).log_prices();
  const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(n, 0.0, double(n - 1));
  return (observed - lppls_eval(fit.params, t)).squaredNorm() / double(n - k);
}

double estimate_lambda(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw Error(Errc::TooFewCandidates, "need at least 3 candidates");
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : points) {
    mx += x;
    my += y;
  }
  mx /= double(points.size());
  my /= double(points.size());
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (!(sxx > 0.0)) throw Error(Errc::ZeroVariance, "all window sizes are equal");
  return sxy / sxx;
}

std::size_t argmin_chi2_lambda(const std::vector<ScanCandidate>& candidates) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const bool lower = candidates[i].chi2_lambda < candidates[best].chi2_lambda;
    const bool tie_earlier =
        candidates[i].chi2_lambda == candidates[best].chi2_lambda && candidates[i].t1 < candidates[best].t1;
    if (lower || tie_earlier) best = i;
  }
  return best;
}

void apply_lagrange_penalty(ScanResult& result, double lambda) {
  if (result.candidates.empty()) throw Error(Errc::ScanEmpty, "no candidates");
  result.lambda = lambda;
  for (auto& c : result.candidates) c.chi2_lambda = c.chi2_np - lambda * double(c.window_size);
  result.t1_star = result.candidates[argmin_chi2_lambda(result.candidates)].t1;
}

ScanResult scan_bubble_start(const PriceSeries& series, const ScanConfig& config, int threads) {
  config.validate(series.size());

  std::vector<Index> starts;
  for (Index t1 = config.t1_earliest; t1 <= config.t1_latest; t1 += config.t1_step) starts.push_back(t1);

  std::vector<std::optional<ScanCandidate>> slots(starts.size());
  std::vector<std::string> reasons(starts.size());
  parallel_for(std::ptrdiff_t(starts.size()), threads, [&](std::ptrdiff_t i) {
    const Index t1 = starts[std::size_t(i)];
    try {
      ScanCandidate c;
      c.t1 = t1;
      c.window_size = config.t2 - t1;
      c.fit = fit_window(series, {t1, config.t2}, config.grid, 1);
      c.chi2_np = chi2_np(series, c.fit, config.k);
      slots[std::size_t(i)] = std::move(c);
    } catch (const Error& e) {
      reasons[std::size_t(i)] = e.what();
    }
  });

  ScanResult result;
  result.t2 = config.t2;
  std::vector<std::pair<double, double>> points;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    if (slots[i]) {
      points.emplace_back(double(slots[i]->window_size), slots[i]->chi2_np);
      result.candidates.push_back(std::move(*slots[i]));
    } else {
      result.failures.push_back({starts[i], reasons[i]});
    }
  }
  if (result.candidates.empty()) throw Error(Errc::ScanEmpty, "every candidate window failed to fit");
  apply_lagrange_penalty(result, estimate_lambda(points));
  result.t1_star_date = series.dates()[std::size_t(result.t1_star)];
  return result;
}

SweepResult robustness_sweep(const PriceSeries& series, const ScanConfig& config,
                             const std::vector<Index>& shifts, int threads) {
  SweepResult sweep;
  Index lo = 0, hi = 0;
  bool any = false;
  for (const Index shift : shifts) {
    SweepEntry entry;
    entry.shift = shift;
    entry.t2 = config.t2 - shift;
    try {
      ScanConfig shifted = config;
      shifted.t2 = entry.t2;
      entry.scan = scan_bubble_start(series, shifted, threads);
      const Index star = entry.scan->t1_star;
      lo = any ? std::min(lo, star) : star;
      hi = any ? std::max(hi, star) : star;
      any = true;
    } catch (const Error& e) {
      entry.error = e.what();
    }
    sweep.entries.push_back(std::move(entry));
  }
  sweep.t1_star_spread = any ? hi - lo : 0;
  return sweep;
}

}  // namespace bubblelens
