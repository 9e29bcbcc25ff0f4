#include "bubblelens/fit.hpp"
#include "bubblelens/synth.hpp"

#include "doctest.h"
#include "helpers.hpp"

using namespace bubblelens;

namespace {

GridSpec small_grid() {
  GridSpec g;
  g.tc_offset_min = 10;
  g.tc_offset_max = 80;
  g.tc_step = 2;
  g.beta_min = 0.25;
  g.beta_max = 1.0;
  g.beta_count = 4;
  g.omega_min = 6;
  g.omega_max = 13;
  g.omega_count = 8;
  return g;
}

PriceSeries planted(const LpplsParams& p, Index n, double noise, std::uint64_t seed) {
  SynthSpec s;
  s.params = p;
  s.length = n;
  s.noise_sd = noise;
  s.seed = seed;
  return synthesize(s);
}

}  // namespace

TEST_CASE("grid values are uniform and hit both ends") {
  const GridSpec g;
  const auto betas = g.beta_values();
  REQUIRE(betas.size() == 30);
  CHECK(betas.front() == 0.1);
  CHECK(betas.back() == 1.0);
  const auto omegas = g.omega_values();
  REQUIRE(omegas.size() == 20);
  CHECK(omegas.back() == 13.0);
  const auto tcs = g.tc_values(199.0);
  REQUIRE(tcs.size() == 96);
  CHECK(tcs.front() == 209.0);
  CHECK(tcs.back() == 399.0);
}

TEST_CASE("invalid grids are rejected") {
  GridSpec g;
  g.beta_max = 1.5;
  CHECK_THROWS_AS(g.validate(), Error);
  g = {};
  g.tc_offset_min = 0;
  CHECK_THROWS_AS(g.validate(), Error);
  g = {};
  g.omega_count = 0;
  CHECK_THROWS_AS(g.validate(), Error);
}

TEST_CASE("noiseless on-grid plant is recovered exactly") {
  const GridSpec g;
  const double beta = g.beta_values()[7], omega = g.omega_values()[5];
  const LpplsParams truth{249.0, beta, omega, 16.0, -0.6, 0.01, 0.005};
  const auto s = planted(truth, 200, 0.0, 1);
  const auto fit = fit_window(s, {0, 199}, g);
  CHECK(fit.params.tc == 249.0);
  CHECK(fit.params.beta == beta);
  CHECK(fit.params.omega == omega);
  CHECK(fit.params.A == doctest::Approx(16.0).epsilon(1e-9));
  CHECK(fit.params.B == doctest::Approx(-0.6).epsilon(1e-9));
  CHECK(fit.params.C1 == doctest::Approx(0.01).epsilon(1e-7));
  CHECK(fit.params.C2 == doctest::Approx(0.005).epsilon(1e-7));
  CHECK(fit.rmse <= 1e-10);
  CHECK(fit.n_obs == 200);
  CHECK(fit.boundary == BoundaryFlags{});
}

TEST_CASE("boundary flags mark edge winners") {
  const GridSpec g = small_grid();
  const LpplsParams truth{199.0 + 10.0, 1.0, 6.0, 1.0, -0.01, 0.001, 0.0};
  const auto fit = fit_series(planted(truth, 200, 0.0, 1), g);
  CHECK(fit.params.tc == 209.0);
  CHECK(fit.boundary.tc);
  CHECK(fit.boundary.beta);
  CHECK(fit.boundary.omega);
}

TEST_CASE("fits are identical for any thread count") {
  const LpplsParams truth{240.0, 0.3, 8.0, 16.0, -0.6, 0.01, 0.005};
  const auto s = planted(truth, 200, 0.01, 3);
  const auto one = fit_series(s, small_grid(), 1);
  CHECK(fit_series(s, small_grid(), 3) == one);
  CHECK(fit_series(s, small_grid(), 8) == one);
}

TEST_CASE("tc stays beyond the grid lower bound") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto s = planted({240.0, 0.3, 8.0, 16.0, -0.6, 0.01, 0.005}, 150, 0.02, seed);
    const auto fit = fit_series(s, small_grid());
    CHECK(fit.params.tc >= 149.0 + 10.0);
    CHECK(fit.rmse >= 0.0);
  }
}

TEST_CASE("a finer superset grid never has a worse optimum") {
  const auto s = planted({230.0, 0.45, 8.7, 5.0, -0.3, 0.02, -0.01}, 180, 0.01, 9);
  GridSpec coarse = small_grid();
  GridSpec fine = coarse;
  fine.beta_count = 7;
  fine.omega_count = 15;
  fine.tc_step = 1;
  const auto a = fit_series(s, coarse);
  const auto b = fit_series(s, fine);
  CHECK(b.rmse <= a.rmse * (1.0 + 1e-12));
}

TEST_CASE("refinement never worsens the grid optimum") {
  const auto s = planted({240.0, 0.3, 8.0, 16.0, -0.6, 0.01, 0.005}, 200, 0.01, 4);
  GridSpec g = small_grid();
  const auto grid_fit = fit_series(s, g);
  g.refine = true;
  const auto refined = fit_series(s, g);
  CHECK(refined.rmse <= grid_fit.rmse);
  CHECK(std::abs(refined.params.tc - grid_fit.params.tc) <= g.tc_step);
}

TEST_CASE("fitted values reproduce the reported rmse") {
  const auto s = planted({240.0, 0.3, 8.0, 16.0, -0.6, 0.01, 0.005}, 200, 0.01, 2);
  const auto fit = fit_window(s, {20, 199}, small_grid());
  const Eigen::VectorXd r = slice(s, fit.window).log_prices() - fitted_values(fit);
  CHECK(std::sqrt(r.squaredNorm() / double(r.size())) == doctest::Approx(fit.rmse).epsilon(1e-9));
  CHECK(fit.window == Window{20, 199});
}

TEST_CASE("short windows and degenerate grids fail") {
  const auto s = planted({240.0, 0.3, 8.0, 16.0, -0.6, 0.01, 0.005}, 200, 0.0, 2);
  try {
    fit_window(s, {0, 28}, small_grid());
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::WindowTooShort);
  }
  GridSpec flat = small_grid();
  flat.beta_min = flat.beta_max = 1e-13;
  flat.beta_count = 1;
  try {
    fit_series(s, flat);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::AllGridPointsDegenerate);
  }
}
