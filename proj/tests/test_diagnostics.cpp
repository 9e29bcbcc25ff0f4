#include "bubblelens/diagnostics.hpp"
#include "bubblelens/lppls.hpp"

#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"

#include <functional>
#include <numbers>
#include <random>

using namespace bubblelens;

namespace {

PriceSeries from_model(const LpplsParams& p, Index n) {
  return testing_support::series_from_log(lppls_eval(p, Eigen::VectorXd::LinSpaced(n, 0.0, double(n - 1))));
}

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::Usage;
}

}  // namespace

TEST_CASE("pure power law detrends to zero") {
  const auto s = from_model({240.0, 0.3, 8.0, 16.0, -0.6, 0.0, 0.0}, 200);
  const auto res = detrend_power_law(s, 240.0);
  CHECK(res.r.cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(res.trend.beta == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(res.trend.tc == 240.0);
  for (Index i = 1; i < res.x.size(); ++i) CHECK(res.x[i] < res.x[i - 1]);
  CHECK(res.x[0] == std::log(240.0));
}

TEST_CASE("full model detrending matches an independent least-squares oracle") {
  const LpplsParams p{240.0, 0.3, 8.0, 16.0, -0.6, 0.01, 0.005};
  const auto s = from_model(p, 200);
  const auto res = detrend_power_law(s, 240.0);
  const auto t = to_vec(s.time_axis());
  const auto y = to_vec(s.log_prices());
  const auto ref = oracle::power_law_golden(t, y, 240.0, 0.05, 0.95);
  for (Index i = 0; i < res.r.size(); ++i) {
    const double expected = y[std::size_t(i)] - ref.A - ref.B * std::pow(240.0 - t[std::size_t(i)], ref.beta);
    CHECK(std::abs(res.r[i] - expected) <= 1e-6);
  }
  // what remains is the log-periodic term
  Eigen::VectorXd osc(200);
  for (Index i = 0; i < 200; ++i) {
    const double dt = 240.0 - double(i);
    osc[i] = std::pow(dt, 0.3) * (0.01 * std::cos(8.0 * std::log(dt)) + 0.005 * std::sin(8.0 * std::log(dt)));
  }
  const Eigen::ArrayXd a = res.r.array() - res.r.mean(), b = osc.array() - osc.mean();
  // part of the oscillation projects onto the trend columns, so the match is close but not exact
  CHECK((a * b).sum() / std::sqrt(a.square().sum() * b.square().sum()) > 0.95);
}

TEST_CASE("detrending a constant series") {
  const auto s = testing_support::series_from_log(Eigen::VectorXd::Constant(60, 4.5));
  const auto res = detrend_power_law(s, 100.0);
  CHECK(std::abs(res.trend.B) <= 1e-10);
  CHECK(res.r.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("residuals are orthogonal to the trend columns") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 0.01);
  Eigen::VectorXd lp = lppls_eval(LpplsParams{260.0, 0.45, 9.0, 3.0, -0.4, 0.02, 0.01},
                                  Eigen::VectorXd::LinSpaced(220, 0.0, 219.0));
  for (Index i = 0; i < lp.size(); ++i) lp[i] += n(rng);
  const auto res = detrend_power_law(testing_support::series_from_log(lp), 260.0);
  const Eigen::ArrayXd f = (res.trend.beta * res.x.array()).exp();
  CHECK(std::abs(res.r.sum()) <= 1e-9);
  CHECK(std::abs((res.r.array() * f).sum()) <= 1e-9);
}

TEST_CASE("detrending contract errors") {
  const auto s = from_model({240.0, 0.3, 8.0, 16.0, -0.6, 0.0, 0.0}, 200);
  CHECK(code_of([&] { detrend_power_law(s, 199.0); }) == Errc::InvalidTc);
  CHECK(code_of([&] { detrend_power_law(slice(s, {0, 20}), 240.0); }) == Errc::WindowTooShort);
}

TEST_CASE("frequency grid") {
  const auto g = default_omega_grid();
  REQUIRE(g.size() == 1000);
  CHECK(g[0] == 0.2);
  CHECK(g[999] == 20.0);
  CHECK(g[1] / g[0] == doctest::Approx(g[999] / g[998]).epsilon(1e-12));
}

TEST_CASE("lomb matches direct summation") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::VectorXd x(80), r(80);
  for (Index i = 0; i < 80; ++i) {
    x[i] = std::log(150.0 - double(i));
    r[i] = 0.3 * std::cos(7.0 * x[i] + 0.4) + 0.1 * n(rng);
  }
  const Eigen::VectorXd omegas = log_spaced(0.5, 15.0, 60);
  const auto raw = lomb_periodogram(x, r, omegas, false);
  const Eigen::ArrayXd z = (r.array() - r.mean()) / std::sqrt((r.array() - r.mean()).square().mean());
  const auto norm = lomb_periodogram(x, r, omegas, true);
  const auto xv = to_vec(x), rv = to_vec(r);
  const std::vector<double> zv(z.data(), z.data() + z.size());
  for (Index k = 0; k < omegas.size(); ++k) {
    CHECK(raw.power[k] == doctest::Approx(oracle::lomb_power(xv, rv, omegas[k])).epsilon(1e-10));
    CHECK(norm.power[k] == doctest::Approx(oracle::lomb_power(xv, zv, omegas[k])).epsilon(1e-10));
    CHECK(norm.power[k] >= 0.0);
  }
  CHECK(norm.peak_power == norm.power.maxCoeff());
}

TEST_CASE("planted log-periodic cosine is located") {
  Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(500, 0.0, 499.0);
  const Eigen::VectorXd x = (505.0 - t.array()).log().matrix();
  const Eigen::VectorXd r = (5.0 * x.array()).cos().matrix();
  const auto g = default_omega_grid();
  const auto p = lomb_periodogram(x, r, g);
  Index k = 0;
  while (g[k] < 5.0) ++k;
  CHECK(std::abs(p.peak_omega - 5.0) <= g[k] - g[k - 1]);
}

TEST_CASE("lomb is shift invariant and scales quadratically") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::VectorXd x(120), r(120);
  for (Index i = 0; i < 120; ++i) {
    x[i] = std::log(300.0 - 2.0 * double(i));
    r[i] = n(rng);
  }
  const auto g = default_omega_grid();
  const auto base = lomb_periodogram(x, r, g);
  for (double shift : {-3.0, 0.7, 25.0}) {
    const Eigen::VectorXd xs = (x.array() + shift).matrix();
    CHECK((lomb_periodogram(xs, r, g).power - base.power).cwiseAbs().maxCoeff() <= 1e-9);
  }
  const auto raw = lomb_periodogram(x, r, g, false);
  const auto scaled_raw = lomb_periodogram(x, Eigen::VectorXd(3.0 * r), g, false);
  CHECK((scaled_raw.power - 9.0 * raw.power).cwiseAbs().maxCoeff() <= 1e-9 * raw.power.maxCoeff());
  const auto scaled_norm = lomb_periodogram(x, Eigen::VectorXd(3.0 * r), g, true);
  CHECK((scaled_norm.power - base.power).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(lomb_periodogram(x, r, g, true, 4).power == base.power);
}

TEST_CASE("lomb contract errors") {
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(20, 5.0, 3.0);
  CHECK(code_of([&] { lomb_periodogram(x, Eigen::VectorXd::Zero(20), default_omega_grid()); }) ==
        Errc::ZeroVarianceResiduals);
  CHECK(code_of([&] { lomb_periodogram(x.head(9), Eigen::VectorXd::Ones(9), default_omega_grid()); }) ==
        Errc::InsufficientRange);
  CHECK_THROWS_AS(lomb_periodogram(x, Eigen::VectorXd::LinSpaced(20, 0, 1), Eigen::Vector2d(2.0, 1.0)), Error);
}

TEST_CASE("hq derivative closed forms") {
  const Index n = 101;
  const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(n, 0.0, double(n - 1));

  const auto linear = hq_derivative(testing_support::series_from_log(t), 200.0, 1.0, 0.5);
  CHECK(linear.value.size() == n - 1);
  CHECK((linear.value.array() - 1.0).abs().maxCoeff() <= 1e-12);
  CHECK(linear.t[0] == 1.0);
  CHECK(linear.log_tc_minus_t[0] == std::log(199.0));

  const double H = 0.5, q = 0.5;
  const Eigen::VectorXd power = t.array().pow(H).matrix();
  const auto hq = hq_derivative(testing_support::series_from_log(power), 200.0, H, q);
  const double expected = (1.0 - std::pow(q, H)) / std::pow(1.0 - q, H);
  for (Index i = 0; i < hq.value.size(); ++i) {
    if (std::fmod(hq.t[i], 2.0) == 0.0) CHECK(std::abs(hq.value[i] - expected) <= 1e-9);
  }

  const auto flat = hq_derivative(testing_support::series_from_log(Eigen::VectorXd::Constant(50, 2.0)), 80.0, 0.5, 0.7);
  CHECK(flat.value.isZero(0.0));
}

TEST_CASE("hq derivative of a log-periodic series oscillates at the planted frequency") {
  const LpplsParams p{260.0, 0.5, 8.0, 2.0, -0.05, 0.02, 0.0};
  const auto s = from_model(p, 240);
  const auto hq = hq_derivative(s, 260.0, 0.5, 0.9);
  const Index skip = 40;  // small t is dominated by the 1/t^H factor
  const Eigen::VectorXd x = hq.log_tc_minus_t.tail(hq.value.size() - skip);
  const Eigen::VectorXd d = hq.value.tail(hq.value.size() - skip);
  const auto g = log_spaced(2.0, 20.0, 400);
  // D mixes ln(tc - t) and ln(tc - qt), so only agreement within half the spectral resolution is expected
  const double half_resolution = std::numbers::pi / (x.maxCoeff() - x.minCoeff());
  CHECK(std::abs(lomb_periodogram(x, d, g).peak_omega - 8.0) <= half_resolution);
}

TEST_CASE("hq contract errors") {
  const auto s = testing_support::series_from_log(Eigen::VectorXd::LinSpaced(40, 0.0, 1.0));
  CHECK(code_of([&] { hq_derivative(s, 80.0, 0.5, 1.0); }) == Errc::InvalidQ);
  CHECK(code_of([&] { hq_derivative(s, 80.0, 0.5, 0.0); }) == Errc::InvalidQ);
  CHECK(code_of([&] { hq_derivative(s, 39.0, 0.5, 0.5); }) == Errc::InvalidTc);
}
