#include "bubblelens/bubble_start.hpp"
#include "bubblelens/synth.hpp"

#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"

#include <random>

using namespace bubblelens;

namespace {

GridSpec quick_grid() {
  GridSpec g;
  g.tc_offset_max = 60;
  g.tc_step = 5;
  g.beta_count = 6;
  g.omega_count = 6;
  return g;
}

PriceSeries rw_bubble(std::uint64_t seed) {
  SynthSpec s;
  s.params = {300.0, 0.5, 9.0, 0.0, -0.3, 0.01, 0.005};
  s.length = 250;
  s.pre_bubble_length = 300;
  s.pre_bubble_vol = 0.02;
  s.noise_sd = 0.01;
  s.seed = seed;
  return synthesize(s);
}

ScanResult fake_scan(const std::vector<double>& chi2, Index t2 = 500, Index step = 5) {
  ScanResult r;
  r.t2 = t2;
  for (std::size_t i = 0; i < chi2.size(); ++i) {
    ScanCandidate c;
    c.t1 = Index(i) * step;
    c.window_size = t2 - c.t1;
    c.chi2_np = chi2[i];
    r.candidates.push_back(c);
  }
  return r;
}

}  // namespace

TEST_CASE("chi2_np of an exact fit is zero") {
  const LpplsParams p{120.0, 0.5, 8.0, 3.0, -0.2, 0.01, 0.0};
  SynthSpec s;
  s.params = p;
  s.length = 100;
  const auto series = synthesize(s);
  FitResult fit;
  fit.params = p;
  fit.window = {0, 99};
  CHECK(chi2_np(series, fit, 7) <= 1e-28);
}

TEST_CASE("chi2_np arithmetic") {
  const auto series = testing_support::series_from_log(Eigen::VectorXd::Constant(107, 2.1));
  FitResult fit;
  fit.params = {200.0, 0.5, 8.0, 2.0, 0.0, 0.0, 0.0};
  fit.window = {0, 106};
  CHECK(chi2_np(series, fit, 7) == doctest::Approx(0.0107).epsilon(1e-12));
  try {
    chi2_np(series, fit, 107);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DegenerateDof);
  }
}

TEST_CASE("chi2_np matches residuals recomputed from the model") {
  SynthSpec s;
  s.length = 150;
  s.noise_sd = 0.01;
  const auto series = synthesize(s);
  const auto fit = fit_window(series, {10, 149}, quick_grid());
  double rss = 0.0;
  for (Index i = 10; i <= 149; ++i) {
    const double r = series.log_prices()[i] - lppls_eval(fit.params, double(i - 10));
    rss += r * r;
  }
  CHECK(chi2_np(series, fit, 7) == doctest::Approx(rss / 133.0).epsilon(1e-10));
}

TEST_CASE("lambda is the regression slope against window size") {
  CHECK(estimate_lambda({{100, 0.05}, {200, 0.03}, {300, 0.01}}) == doctest::Approx(-0.0002).epsilon(1e-12));
  CHECK(estimate_lambda({{100, 0.02}, {150, 0.02}, {300, 0.02}}) == 0.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 40; ++i) pts.emplace_back(30.0 + 5.0 * i, 1e-4 * u(rng) + 1e-6 * i);
    CHECK(std::abs(estimate_lambda(pts) - oracle::regression_slope(pts)) <= 1e-12);
  }
}

TEST_CASE("lambda needs three distinct window sizes") {
  try {
    estimate_lambda({{100, 0.1}, {200, 0.2}});
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::TooFewCandidates);
  }
  try {
    estimate_lambda({{100, 0.1}, {100, 0.2}, {100, 0.3}});
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ZeroVariance);
  }
}

TEST_CASE("penalty arithmetic and argmin rules") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> chi2(40);
  for (auto& c : chi2) c = 1e-4 + 1e-4 * u(rng);

  auto scan = fake_scan(chi2);
  apply_lagrange_penalty(scan, 0.0);
  const auto raw_min = std::min_element(chi2.begin(), chi2.end()) - chi2.begin();
  CHECK(scan.t1_star == Index(raw_min) * 5);

  apply_lagrange_penalty(scan, 3e-7);
  for (const auto& c : scan.candidates) CHECK(c.chi2_lambda == c.chi2_np - 3e-7 * double(scan.t2 - c.t1));

  Index previous = std::numeric_limits<Index>::max();
  for (double lambda : {-1e-6, -1e-7, 0.0, 1e-7, 3e-7, 1e-6, 1e-5}) {
    apply_lagrange_penalty(scan, lambda);
    CHECK(scan.t1_star <= previous);
    previous = scan.t1_star;
  }

  auto shifted = fake_scan(chi2);
  for (auto& c : shifted.candidates) c.chi2_np += 0.5;
  apply_lagrange_penalty(scan, 2e-7);
  apply_lagrange_penalty(shifted, 2e-7);
  CHECK(shifted.t1_star == scan.t1_star);

  auto ties = fake_scan({0.3, 0.1, 0.2, 0.1});
  apply_lagrange_penalty(ties, 0.0);
  CHECK(ties.t1_star == 5);
}

TEST_CASE("scan configuration is validated") {
  const auto series = rw_bubble(0);
  ScanConfig c;
  c.t2 = 549;
  c.t1_earliest = 400;
  c.t1_latest = 300;
  CHECK_THROWS_AS(scan_bubble_start(series, c), Error);
  c.t1_earliest = 200;
  c.t1_latest = 530;
  CHECK_THROWS_AS(scan_bubble_start(series, c), Error);
  c.t1_latest = 400;
  c.t2 = 550;
  CHECK_THROWS_AS(scan_bubble_start(series, c), Error);
}

TEST_CASE("scan is ordered, deterministic and consistent with its sweep") {
  const auto series = rw_bubble(2);
  ScanConfig c;
  c.t2 = 549;
  c.t1_earliest = 240;
  c.t1_latest = 360;
  c.t1_step = 10;
  c.grid = quick_grid();
  const auto a = scan_bubble_start(series, c, 1);
  const auto b = scan_bubble_start(series, c, 4);
  REQUIRE(a.candidates.size() == 13);
  CHECK(a.failures.empty());
  for (std::size_t i = 0; i < a.candidates.size(); ++i) {
    CHECK(a.candidates[i].t1 == 240 + 10 * Index(i));
    CHECK(a.candidates[i].window_size == 549 - a.candidates[i].t1);
    CHECK(a.candidates[i].chi2_np == b.candidates[i].chi2_np);
    CHECK(a.candidates[i].fit == b.candidates[i].fit);
  }
  CHECK(a.lambda == b.lambda);
  CHECK(a.t1_star == b.t1_star);
  CHECK(a.t1_star_date == series.dates()[std::size_t(a.t1_star)]);
  CHECK(a.candidates[argmin_chi2_lambda(a.candidates)].t1 == a.t1_star);

  const auto sweep = robustness_sweep(series, c, {0}, 2);
  REQUIRE(sweep.entries.size() == 1);
  REQUIRE(sweep.entries[0].scan);
  CHECK(sweep.entries[0].scan->t1_star == a.t1_star);
  CHECK(sweep.entries[0].scan->lambda == a.lambda);
  CHECK(sweep.t1_star_spread == 0);
}

TEST_CASE("sweep records failing shifts and keeps going") {
  const auto series = rw_bubble(1);
  ScanConfig c;
  c.t2 = 549;
  c.t1_earliest = 300;
  c.t1_latest = 480;
  c.t1_step = 30;
  c.grid = quick_grid();
  const auto sweep = robustness_sweep(series, c, {0, 60}, 1);
  REQUIRE(sweep.entries.size() == 2);
  CHECK(sweep.entries[0].scan.has_value());
  CHECK_FALSE(sweep.entries[1].scan.has_value());
  CHECK_FALSE(sweep.entries[1].error.empty());
}
