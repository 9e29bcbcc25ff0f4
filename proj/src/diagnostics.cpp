#include "bubblelens/diagnostics.hpp"

#include "bubblelens/lppls.hpp"

#include <Eigen/Dense>

#include <limits>

namespace bubblelens {

namespace {

struct TrendFit {
  double A;
  double B;
  double rss;
};

TrendFit trend_ols(const Eigen::ArrayXd& log_dt, const Eigen::VectorXd& y, double beta) {
  Eigen::Matrix<double, Eigen::Dynamic, 2> X(y.size(), 2);
  X.col(0).setOnes();
  X.col(1) = (beta * log_dt).exp().matrix();
  const auto sol = ols_solve(X, y);
  return {sol.coef[0], sol.coef[1], sol.rss};
}

}  // namespace

Residuals detrend_power_law(const PriceSeries& local, double tc, const DetrendOptions& options) {
  const Index n = local.size();
  if (n < kMinWindowLength)
    throw Error(Errc::WindowTooShort, std::to_string(n) + " observations, need " + std::to_string(kMinWindowLength));
  if (!std::isfinite(tc) || !(tc > double(n - 1))) throw Error(Errc::InvalidTc, "tc must exceed the last time index");
  if (!(options.beta_min > 0.0 && options.beta_max >= options.beta_min && options.beta_count >= 1))
    throw Error(Errc::InvalidGrid, "bad detrending beta grid");

  const Eigen::ArrayXd t = local.time_axis().array();
  const Eigen::VectorXd& y = local.log_prices();
  const Eigen::ArrayXd log_dt = (tc - t).log();

  double best_beta = 0.0;
  TrendFit best{0.0, 0.0, std::numeric_limits<double>::infinity()};
  for (int k = 0; k < options.beta_count; ++k) {
    const double beta = options.beta_count == 1
                            ? options.beta_min
                            : options.beta_min + (options.beta_max - options.beta_min) * k / (options.beta_count - 1);
    try {
      const TrendFit fit = trend_ols(log_dt, y, beta);
      if (fit.rss < best.rss) {
        best = fit;
        best_beta = beta;
      }
    } catch (const Error& e) {
      if (e.code() != Errc::RankDeficient) throw;
    }
  }
  if (!std::isfinite(best.rss)) throw Error(Errc::DegenerateTrend, "power-law trend is rank deficient for every beta");

  if (options.polish) {
    // Gauss-Newton on (A, B, beta); accepts a step only when the RSS drops.
    double A = best.A, B = best.B, beta = best_beta, rss = best.rss;
    for (int iter = 0; iter < 60; ++iter) {
      const Eigen::ArrayXd f = (beta * log_dt).exp();
      const Eigen::VectorXd resid = y - (A + B * f).matrix();
      Eigen::Matrix<double, Eigen::Dynamic, 3> J(n, 3);
      J.col(0).setOnes();
      J.col(1) = f.matrix();
      J.col(2) = (B * f * log_dt).matrix();
      Eigen::Vector3d step;
      try {
        step = ols_solve(J, resid).coef;
      } catch (const Error&) {
        break;
      }
      bool improved = false;
      for (double scale = 1.0; scale > 1e-6; scale *= 0.5) {
        const double nb = std::clamp(beta + scale * step[2], options.beta_min, options.beta_max);
        const double na = A + scale * step[0];
        const double nbb = B + scale * step[1];
        const double nrss = (y - (na + nbb * (nb * log_dt).exp()).matrix()).squaredNorm();
        if (nrss < rss) {
          A = na;
          B = nbb;
          beta = nb;
          rss = nrss;
          improved = true;
          break;
        }
      }
      if (!improved || std::abs(step[2]) < 1e-15) break;
    }
    try {
      best = trend_ols(log_dt, y, beta);
      best_beta = beta;
    } catch (const Error&) {
    }
  }

  Residuals out;
  out.x = log_dt.matrix();
  out.r = y - (best.A + best.B * (best_beta * log_dt).exp()).matrix();
  out.trend = {best.A, best.B, best_beta, tc};
  return out;
}

Eigen::VectorXd log_spaced(double lo, double hi, Index n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw Error(Errc::Usage, "log_spaced needs 0 < lo < hi and n >= 2");
  Eigen::VectorXd out = Eigen::VectorXd::LinSpaced(n, std::log(lo), std::log(hi)).array().exp().matrix();
  out[0] = lo;
  out[n - 1] = hi;
  return out;
}

Eigen::VectorXd default_omega_grid() { return log_spaced(0.2, 20.0, 1000); }

HqDerivative hq_derivative(const PriceSeries& local, double tc, double H, double q) {
  if (!(q > 0.0 && q < 1.0)) throw Error(Errc::InvalidQ, "q must lie in (0, 1)");
  if (!std::isfinite(H)) throw Error(Errc::Usage, "H must be finite");
  const Index n = local.size();
  if (n < 2) throw Error(Errc::InsufficientRange, "need at least two observations");
  if (!std::isfinite(tc) || !(tc > double(n - 1))) throw Error(Errc::InvalidTc, "tc must exceed the last time index");

  const Eigen::VectorXd& lp = local.log_prices();
  HqDerivative out;
  out.H = H;
  out.q = q;
  out.t.resize(n - 1);
  out.log_tc_minus_t.resize(n - 1);
  out.value.resize(n - 1);
  for (Index i = 1; i < n; ++i) {
    const double t = double(i);
    const double qt = q * t;
    const auto lo = Index(std::floor(qt));
    const double frac = qt - double(lo);
    const double lp_qt = frac == 0.0 ? lp[lo] : lp[lo] + frac * (lp[lo + 1] - lp[lo]);
    out.t[i - 1] = t;
    out.log_tc_minus_t[i - 1] = std::log(tc - t);
    out.value[i - 1] = (lp[i] - lp_qt) / std::pow((1.0 - q) * t, H);
  }
  return out;
}

}  // namespace bubblelens
