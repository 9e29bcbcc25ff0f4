#pragma once

// LPPLS forward model in the linearised form
//
//   ln p(t) = A + B f(t) + C1 f(t) cos(w ln(tc - t)) + C2 f(t) sin(w ln(tc - t)),
//   f(t)    = (tc - t)^beta,
//
// with C1 = C cos(phi), C2 = -C sin(phi). All times are window-local
// trading-day indices (t = 0 at the first observation of the window).

#include "bubblelens/error.hpp"
#include "bubblelens/timeseries.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace bubblelens {

template <typename Scalar>
struct Canonical {
  Scalar C;    ///< oscillation magnitude
  Scalar phi;  ///< phase in (-pi, pi]
  Scalar tau;  ///< characteristic time scale exp(-phi / omega)
};

template <typename Scalar>
Canonical<Scalar> derive_canonical(Scalar c1, Scalar c2, Scalar omega) {
  using std::atan2;
  using std::exp;
  using std::hypot;
  Scalar phi = atan2(-c2, c1);
  if (phi == Scalar(0)) phi = Scalar(0);  // drop the sign of -0
  if (phi <= -std::numbers::pi_v<Scalar>) phi = std::numbers::pi_v<Scalar>;
  return {hypot(c1, c2), phi, exp(-phi / omega)};
}

template <typename Scalar>
struct LpplsParamsT {
  Scalar tc{};
  Scalar beta{};
  Scalar omega{};
  Scalar A{};
  Scalar B{};
  Scalar C1{};
  Scalar C2{};

  Canonical<Scalar> canonical() const { return derive_canonical(C1, C2, omega); }

  /// Inverse of the canonical map: C1 = C cos(phi), C2 = -C sin(phi).
  static LpplsParamsT from_canonical(Scalar tc, Scalar beta, Scalar omega, Scalar A, Scalar B, Scalar C,
                                     Scalar phi) {
    using std::cos;
    using std::sin;
    return {tc, beta, omega, A, B, C * cos(phi), -C * sin(phi)};
  }

  friend bool operator==(const LpplsParamsT&, const LpplsParamsT&) = default;
};

using LpplsParams = LpplsParamsT<double>;

template <typename Scalar>
Scalar lppls_eval(const LpplsParamsT<Scalar>& p, Scalar t) {
  using std::cos;
  using std::log;
  using std::pow;
  using std::sin;
  const Scalar dt = p.tc - t;
  if (!(dt > Scalar(0))) throw Error(Errc::TimeAtOrPastCritical, "t must be before tc");
  const Scalar f = pow(dt, p.beta);
  const Scalar arg = p.omega * log(dt);
  return p.A + p.B * f + f * (p.C1 * cos(arg) + p.C2 * sin(arg));
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> lppls_eval(
    const LpplsParamsT<typename Derived::Scalar>& p, const Eigen::MatrixBase<Derived>& t) {
  using Scalar = typename Derived::Scalar;
  if (t.size() > 0 && !(p.tc > t.maxCoeff())) throw Error(Errc::TimeAtOrPastCritical, "t must be before tc");
  const auto log_dt = (Scalar(p.tc) - t.array()).log().eval();
  const auto f = (p.beta * log_dt).exp().eval();
  const auto arg = (p.omega * log_dt).eval();
  return (p.A + f * (p.B + p.C1 * arg.cos() + p.C2 * arg.sin())).matrix();
}

template <typename Scalar>
using DesignMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, 4>;

/// Columns [1, f, f cos(w ln(tc - t)), f sin(w ln(tc - t))], one row per time.
/// beta is accepted on (0, 1]; the upper edge is the default grid boundary.
template <typename Derived>
DesignMatrix<typename Derived::Scalar> design_matrix(const Eigen::MatrixBase<Derived>& t,
                                                     typename Derived::Scalar tc,
                                                     typename Derived::Scalar beta,
                                                     typename Derived::Scalar omega) {
  using Scalar = typename Derived::Scalar;
  if (t.size() == 0 || !(tc > t.maxCoeff()) || !(beta > Scalar(0)) || !(beta <= Scalar(1)) ||
      !(omega > Scalar(0)))
    throw Error(Errc::InvalidNonlinearParams, "need tc > max t, 0 < beta <= 1, omega > 0");
  const auto log_dt = (tc - t.array()).log().eval();
  const auto f = (beta * log_dt).exp().eval();
  const auto arg = (omega * log_dt).eval();
  DesignMatrix<Scalar> X(t.size(), 4);
  X.col(0).setOnes();
  X.col(1) = f.matrix();
  X.col(2) = (f * arg.cos()).matrix();
  X.col(3) = (f * arg.sin()).matrix();
  return X;
}

inline DesignMatrix<double> design_matrix(const PriceSeries& series, double tc, double beta, double omega) {
  return design_matrix(series.time_axis(), tc, beta, omega);
}

template <typename Scalar, int Cols>
struct OlsSolution {
  Eigen::Matrix<Scalar, Cols, 1> coef;
  Scalar rss;
};

/// Relative pivot threshold under which a column is treated as dependent.
inline constexpr double kRankTolerance = 1e-10;

/// Least squares via column-pivoting Householder QR. Throws RankDeficient when
/// X does not have full column rank; callers scanning a grid skip that point.
template <typename DerivedX, typename DerivedY>
OlsSolution<typename DerivedX::Scalar, DerivedX::ColsAtCompileTime> ols_solve(
    const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  if (X.rows() != y.size()) throw Error(Errc::Usage, "design matrix and target differ in length");
  if (X.rows() < X.cols() + 1) throw Error(Errc::WindowTooShort, "too few observations for least squares");
  using PlainX = Eigen::Matrix<Scalar, Eigen::Dynamic, DerivedX::ColsAtCompileTime>;
  Eigen::ColPivHouseholderQR<PlainX> qr(X);
  qr.setThreshold(Scalar(kRankTolerance));
  if (qr.rank() < X.cols()) throw Error(Errc::RankDeficient, "design matrix is rank deficient");
  OlsSolution<Scalar, DerivedX::ColsAtCompileTime> out;
  out.coef = qr.solve(y);
  out.rss = (y - X * out.coef).squaredNorm();
  return out;
}

}  // namespace bubblelens
