#include "bubblelens/fit.hpp"

#include "bubblelens/parallel.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace bubblelens {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Minimum LDLT pivot of the unit-diagonal Gram matrix before a grid point is
// treated as rank deficient (about 1e7 in the condition number of X).
constexpr double kGramPivotTolerance = 1e-14;

struct Best {
  double rss = kInf;
  int tc = -1;
  int beta = -1;
  int omega = -1;
  Index degenerate = 0;
};

// Profiles every (beta, omega) pair for one tc. All grid sums come from one
// product of per-beta columns [f, f^2, f*y] with per-omega columns
// [cos, sin, cos^2, cos*sin], evaluated in log(tc - t).
Best scan_tc(const Eigen::ArrayXd& t, const Eigen::ArrayXd& yc, double yy, double tc,
             const std::vector<double>& betas, const std::vector<double>& omegas) {
  const Index n = t.size();
  const Index nb = Index(betas.size());
  const Index nw = Index(omegas.size());
  const Eigen::ArrayXd log_dt = (tc - t).log();

  Eigen::MatrixXd trig(n, 4 * nw);
  for (Index w = 0; w < nw; ++w) {
    const Eigen::ArrayXd arg = omegas[std::size_t(w)] * log_dt;
    const Eigen::ArrayXd c = arg.cos();
    const Eigen::ArrayXd s = arg.sin();
    trig.col(4 * w) = c.matrix();
    trig.col(4 * w + 1) = s.matrix();
    trig.col(4 * w + 2) = (c * c).matrix();
    trig.col(4 * w + 3) = (c * s).matrix();
  }
  Eigen::MatrixXd powers(n, 3 * nb);
  Eigen::ArrayXd sum_f(nb), sum_ff(nb), sum_fy(nb);
  for (Index b = 0; b < nb; ++b) {
    const Eigen::ArrayXd f = (betas[std::size_t(b)] * log_dt).exp();
    powers.col(3 * b) = f.matrix();
    powers.col(3 * b + 1) = (f * f).matrix();
    powers.col(3 * b + 2) = (f * yc).matrix();
    sum_f[b] = f.sum();
    sum_ff[b] = (f * f).sum();
    sum_fy[b] = (f * yc).sum();
  }
  const Eigen::MatrixXd cross = powers.transpose() * trig;

  Best best;
  Eigen::Matrix4d gram;
  Eigen::Vector4d rhs;
  for (Index b = 0; b < nb; ++b) {
    for (Index w = 0; w < nw; ++w) {
      const auto m = [&](int row, int col) { return cross(3 * b + row, 4 * w + col); };
      gram(0, 0) = double(n);
      gram(0, 1) = sum_f[b];
      gram(0, 2) = m(0, 0);
      gram(0, 3) = m(0, 1);
      gram(1, 1) = sum_ff[b];
      gram(1, 2) = m(1, 0);
      gram(1, 3) = m(1, 1);
      gram(2, 2) = m(1, 2);
      gram(2, 3) = m(1, 3);
      gram(3, 3) = sum_ff[b] - m(1, 2);
      rhs << 0.0, sum_fy[b], m(2, 0), m(2, 1);

      const Eigen::Vector4d scale = gram.diagonal().cwiseSqrt().cwiseInverse();
      if (!scale.allFinite()) {
        ++best.degenerate;
        continue;
      }
      const Eigen::Matrix4d scaled =
          scale.asDiagonal() * gram.selfadjointView<Eigen::Upper>().toDenseMatrix() * scale.asDiagonal();
      const Eigen::LDLT<Eigen::Matrix4d> ldlt(scaled);
      if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > kGramPivotTolerance)) {
        ++best.degenerate;
        continue;
      }
      const Eigen::Vector4d scaled_rhs = scale.cwiseProduct(rhs);
      const double rss = std::max(0.0, yy - scaled_rhs.dot(ldlt.solve(scaled_rhs)));
      if (rss < best.rss) {
        best.rss = rss;
        best.beta = int(b);
        best.omega = int(w);
      }
    }
  }
  return best;
}

double qr_rss(const Eigen::VectorXd& t, const Eigen::VectorXd& y, double tc, double beta, double omega) {
  try {
    return ols_solve(design_matrix(t, tc, beta, omega), y).rss;
  } catch (const Error&) {
    return kInf;
  }
}

// Bounded Nelder-Mead on (tc, beta, omega); points outside the box are clamped.
Eigen::Vector3d polish(const Eigen::VectorXd& t, const Eigen::VectorXd& y, const Eigen::Vector3d& start,
                       const Eigen::Vector3d& lo, const Eigen::Vector3d& hi) {
  const auto clamp = [&](Eigen::Vector3d p) { return p.cwiseMax(lo).cwiseMin(hi).eval(); };
  const auto cost = [&](const Eigen::Vector3d& p) { return qr_rss(t, y, p[0], p[1], p[2]); };

  std::array<Eigen::Vector3d, 4> simplex;
  std::array<double, 4> values;
  simplex[0] = start;
  for (int i = 0; i < 3; ++i) {
    Eigen::Vector3d p = start;
    const double half = 0.5 * (hi[i] - lo[i]);
    p[i] = (start[i] + half <= hi[i]) ? start[i] + half : start[i] - half;
    simplex[std::size_t(i) + 1] = clamp(p);
  }
  for (std::size_t i = 0; i < 4; ++i) values[i] = cost(simplex[i]);

  for (int iter = 0; iter < 400; ++iter) {
    std::array<std::size_t, 4> order{0, 1, 2, 3};
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    const std::size_t best = order[0], worst = order[3], second = order[2];
    if ((simplex[worst] - simplex[best]).cwiseAbs().maxCoeff() < 1e-10) break;

    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < 3; ++i) centroid += simplex[order[i]];
    centroid /= 3.0;

    const Eigen::Vector3d reflected = clamp(centroid + (centroid - simplex[worst]));
    const double f_reflected = cost(reflected);
    if (f_reflected < values[best]) {
      const Eigen::Vector3d expanded = clamp(centroid + 2.0 * (centroid - simplex[worst]));
      const double f_expanded = cost(expanded);
      if (f_expanded < f_reflected) {
        simplex[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[second]) {
      simplex[worst] = reflected;
      values[worst] = f_reflected;
      continue;
    }
    const Eigen::Vector3d contracted = clamp(centroid + 0.5 * (simplex[worst] - centroid));
    const double f_contracted = cost(contracted);
    if (f_contracted < values[worst]) {
      simplex[worst] = contracted;
      values[worst] = f_contracted;
      continue;
    }
    for (std::size_t i = 0; i < 4; ++i) {
      if (i == best) continue;
      simplex[i] = clamp(simplex[best] + 0.5 * (simplex[i] - simplex[best]));
      values[i] = cost(simplex[i]);
    }
  }
  std::size_t arg = 0;
  for (std::size_t i = 1; i < 4; ++i)
    if (values[i] < values[arg]) arg = i;
  return simplex[arg];
}

}  // namespace

double uniform_grid_value(double lo, double hi, int count, int k) {
  if (count <= 1) return lo;
  if (k == count - 1) return hi;
  return lo + (hi - lo) * double(k) / double(count - 1);
}

void GridSpec::validate() const {
  const bool ok = tc_offset_min > 0.0 && tc_offset_max >= tc_offset_min && tc_step > 0.0 && beta_count >= 1 &&
                  beta_min > 0.0 && beta_max <= 1.0 && beta_max >= beta_min && omega_count >= 1 &&
                  omega_min > 0.0 && omega_max >= omega_min && std::isfinite(tc_offset_max);
  if (!ok) throw Error(Errc::InvalidGrid, "grid ranges must be non-empty with tc offset > 0, 0 < beta <= 1, omega > 0");
}

std::vector<double> GridSpec::tc_values(double t_last) const {
  std::vector<double> out;
  const auto count = std::size_t(std::floor((tc_offset_max - tc_offset_min) / tc_step + 1e-9)) + 1;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(t_last + tc_offset_min + tc_step * double(k));
  return out;
}

std::vector<double> GridSpec::beta_values() const {
  std::vector<double> out;
  for (int k = 0; k < beta_count; ++k) out.push_back(uniform_grid_value(beta_min, beta_max, beta_count, k));
  return out;
}

std::vector<double> GridSpec::omega_values() const {
  std::vector<double> out;
  for (int k = 0; k < omega_count; ++k) out.push_back(uniform_grid_value(omega_min, omega_max, omega_count, k));
  return out;
}

FitResult fit_series(const PriceSeries& local, const GridSpec& grid, int threads) {
  grid.validate();
  const Index n = local.size();
  if (n < kMinWindowLength)
    throw Error(Errc::WindowTooShort, std::to_string(n) + " observations, need " + std::to_string(kMinWindowLength));

  const Eigen::VectorXd t = local.time_axis();
  const Eigen::VectorXd& y = local.log_prices();
  const double y_mean = y.mean();
  const Eigen::ArrayXd yc = y.array() - y_mean;
  const double yy = yc.square().sum();

  const double t_last = double(n - 1);
  const auto tcs = grid.tc_values(t_last);
  const auto betas = grid.beta_values();
  const auto omegas = grid.omega_values();

  std::vector<Best> per_tc(tcs.size());
  parallel_for(std::ptrdiff_t(tcs.size()), threads, [&](std::ptrdiff_t k) {
    per_tc[std::size_t(k)] = scan_tc(t.array(), yc, yy, tcs[std::size_t(k)], betas, omegas);
    per_tc[std::size_t(k)].tc = int(k);
  });

  Best best;
  Index degenerate = 0;
  for (const Best& b : per_tc) {
    degenerate += b.degenerate;
    if (b.beta >= 0 && b.rss < best.rss) best = b;
  }
  if (best.beta < 0) throw Error(Errc::AllGridPointsDegenerate, "every grid point was rank deficient");

  double tc = tcs[std::size_t(best.tc)];
  double beta = betas[std::size_t(best.beta)];
  double omega = omegas[std::size_t(best.omega)];

  if (grid.refine) {
    const double db = betas.size() > 1 ? betas[1] - betas[0] : 0.0;
    const double dw = omegas.size() > 1 ? omegas[1] - omegas[0] : 0.0;
    const Eigen::Vector3d lo(std::max(tc - grid.tc_step, t_last + grid.tc_offset_min),
                             std::max(beta - db, 1e-6), std::max(omega - dw, 1e-6));
    const Eigen::Vector3d hi(tc + grid.tc_step, std::min(beta + db, 1.0), omega + dw);
    const Eigen::Vector3d start(tc, beta, omega);
    const Eigen::Vector3d polished = polish(t, y, start, lo, hi);
    if (qr_rss(t, y, polished[0], polished[1], polished[2]) < qr_rss(t, y, tc, beta, omega)) {
      tc = polished[0];
      beta = polished[1];
      omega = polished[2];
    }
  }

  FitResult result;
  Eigen::Vector4d coef;
  double rss = 0.0;
  try {
    const auto sol = ols_solve(design_matrix(t, tc, beta, omega), y);
    coef = sol.coef;
    rss = sol.rss;
  } catch (const Error& e) {
    if (e.code() != Errc::RankDeficient) throw;
    // Accepted by the Gram test but not by QR: fall back to the pivoted QR basic solution.
    const auto X = design_matrix(t, tc, beta, omega);
    coef = X.colPivHouseholderQr().solve(y);
    rss = (y - X * coef).squaredNorm();
  }
  result.params = {tc, beta, omega, coef[0], coef[1], coef[2], coef[3]};
  result.window = {0, n - 1};
  result.rmse = std::sqrt(rss / double(n));
  result.n_obs = n;
  result.boundary = {best.tc == 0 || best.tc == int(tcs.size()) - 1,
                     best.beta == 0 || best.beta == int(betas.size()) - 1,
                     best.omega == 0 || best.omega == int(omegas.size()) - 1};
  result.degenerate_points = degenerate;
  result.grid = grid;
  return result;
}

FitResult fit_window(const PriceSeries& series, const Window& window, const GridSpec& grid, int threads) {
  const PriceSeries local = slice(series, window);
  FitResult result = fit_series(local, grid, threads);
  result.window = window;
  return result;
}

Eigen::VectorXd fitted_values(const FitResult& fit) {
  return lppls_eval(fit.params, Eigen::VectorXd::LinSpaced(fit.n_obs, 0.0, double(fit.n_obs - 1)));
}

}  // namespace bubblelens
