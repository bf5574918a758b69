#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/LU>

#include "qwsqueeze/dynamics.hpp"
#include "qwsqueeze/errors.hpp"

namespace qwsqueeze {

// Relative asymmetry of a raw solution above which it is flagged.
inline constexpr double kAsymmetryWarning = 1e-8;
// Required ||R V + V R^T + N||_F / ||N||_F of a Lyapunov solve.
inline constexpr double kLyapunovResidualTolerance = 1e-10;
// Heisenberg bound on single-mode block determinants, with slack.
inline constexpr double kHeisenbergBound = 0.25;
inline constexpr double kHeisenbergSlack = 1e-9;

/// Symmetric steady-state covariance V_ij = <u_i u_j + u_j u_i>/2.
///
/// The matrix is symmetrized on construction; the relative asymmetry of the
/// input is kept so callers can see how far the raw solution drifted.
class CovarianceMatrix {
public:
  CovarianceMatrix() : values_(Matrix8::Zero()) {}

  explicit CovarianceMatrix(const Matrix8& raw) {
    values_ = 0.5 * (raw + raw.transpose());
    const double scale = raw.norm();
    asymmetry_ = scale > 0.0 ? (raw - raw.transpose()).norm() / scale : 0.0;
  }

  static CovarianceMatrix vacuum() { return CovarianceMatrix(0.5 * Matrix8::Identity()); }

  const Matrix8& matrix() const noexcept { return values_; }
  double operator()(int i, int j) const { return values_(i, j); }

  double asymmetry() const noexcept { return asymmetry_; }
  bool conditioning_warning() const noexcept { return asymmetry_ > kAsymmetryWarning; }

  Eigen::Matrix2d mode_block(Mode m) const {
    const int k = 2 * static_cast<int>(m);
    return values_.block<2, 2>(k, k);
  }

  bool positive_definite() const {
    Eigen::SelfAdjointEigenSolver<Matrix8> es(values_, Eigen::EigenvaluesOnly);
    return es.info() == Eigen::Success && es.eigenvalues().minCoeff() > 0.0;
  }

  double min_block_determinant() const {
    double d = std::numeric_limits<double>::infinity();
    for (int m = 0; m < 4; ++m) d = std::min(d, mode_block(static_cast<Mode>(m)).determinant());
    return d;
  }

  /// Positive definite and every mode obeys det(block) >= 1/4 - slack.
  bool physical() const {
    return positive_definite() && min_block_determinant() >= kHeisenbergBound - kHeisenbergSlack;
  }

private:
  Matrix8 values_;
  double asymmetry_ = 0.0;
};

template <typename A, typename V, typename N>
Eigen::MatrixXd lyapunov_operator(const Eigen::MatrixBase<A>& drift,
                                  const Eigen::MatrixBase<V>& cov,
                                  const Eigen::MatrixBase<N>& diffusion) {
  return drift * cov + cov * drift.transpose() + diffusion;
}

/// Frobenius norm of R V + V R^T + N.
template <typename A, typename V, typename N>
double lyapunov_residual(const Eigen::MatrixBase<A>& drift, const Eigen::MatrixBase<V>& cov,
                         const Eigen::MatrixBase<N>& diffusion) {
  return lyapunov_operator(drift, cov, diffusion).norm();
}

namespace detail {

/// Solves R V + V R^T = -N through (I (x) R + R (x) I) vec V = -vec N with
/// partial-pivot LU and one refinement sweep. No stability check.
template <int Dim>
Eigen::Matrix<double, Dim, Dim> solve_lyapunov_kronecker(
    const Eigen::Matrix<double, Dim, Dim>& drift,
    const Eigen::Matrix<double, Dim, Dim>& diffusion) {
  using Mat = Eigen::Matrix<double, Dim, Dim>;
  const int n = static_cast<int>(drift.rows());
  const int nn = n * n;

  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(nn, nn);
  // Column-major vec: entry (i, j) lives at i + n j.
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int row = i + n * j;
      for (int l = 0; l < n; ++l) {
        k(row, l + n * j) += drift(i, l);  // (R V)_ij
        k(row, i + n * l) += drift(j, l);  // (V R^T)_ij
      }
    }
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(k);
  const double rcond = lu.rcond();
  if (!(rcond > 1e3 * std::numeric_limits<double>::epsilon())) {
    std::ostringstream os;
    os << "Kronecker Lyapunov system is numerically singular (rcond = " << rcond << ")";
    throw ConditioningError(os.str());
  }

  const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(diffusion.data(), nn);
  Eigen::VectorXd x = lu.solve(rhs);
  x += lu.solve(rhs - k * x);

  Mat v = Eigen::Map<const Mat>(x.data(), n, n);
  return v;
}

}  // namespace detail

/// Steady-state covariance from R V + V R^T + N = 0.
///
/// Refuses drifts that are not strictly stable. Throws ConditioningError when
/// the solve is singular or misses the relative residual tolerance.
inline CovarianceMatrix solve_lyapunov(const Matrix8& drift, const Matrix8& diffusion,
                                       const StabilityVerdict& verdict) {
  if (!verdict.stable) {
    std::ostringstream os;
    os << "drift is " << to_string(verdict.classification)
       << " (max Re lambda = " << verdict.margin << "); no steady state";
    throw StabilityError(os.str(), verdict.margin);
  }
  const Matrix8 raw = detail::solve_lyapunov_kronecker<8>(drift, diffusion);
  CovarianceMatrix v(raw);
  const double scale = diffusion.norm();
  const double res = lyapunov_residual(drift, v.matrix(), diffusion);
  if (!std::isfinite(res) || res > kLyapunovResidualTolerance * scale) {
    std::ostringstream os;
    os << "Lyapunov residual " << res << " exceeds " << kLyapunovResidualTolerance
       << " * ||N||_F = " << kLyapunovResidualTolerance * scale;
    throw ConditioningError(os.str());
  }
  return v;
}

inline CovarianceMatrix solve_lyapunov(const Matrix8& drift, const Matrix8& diffusion) {
  return solve_lyapunov(drift, diffusion, check_stability(drift));
}

inline CovarianceMatrix solve_lyapunov(const LinearSystem& sys) {
  return solve_lyapunov(sys.drift, sys.diffusion);
}

struct IntegrationOptions {
  double dt = 1e-2;
  double t_max = 1e6;
  double tolerance = 1e-12;  // on ||dV/dt||_F
  long long max_steps = 10'000'000;
};

/// Default horizon 10 / gamma_m, the slowest bare relaxation scale.
inline IntegrationOptions default_integration_options(const SystemParams& p) {
  IntegrationOptions o;
  o.t_max = 10.0 / p.gamma_m;
  return o;
}

/// Integrates dV/dt = R V + V R^T + N with classical RK4 at fixed step until
/// ||dV/dt||_F drops below the tolerance.
///
/// Serves as an independent check of solve_lyapunov. The step budget is
/// min(t_max / dt, max_steps); running out of it throws NonConvergenceError.
inline CovarianceMatrix integrate_to_steady_state(const Matrix8& drift, const Matrix8& diffusion,
                                                  const Matrix8& v0,
                                                  const IntegrationOptions& opt = {}) {
  if (!(opt.dt > 0.0)) throw DomainError("integration step must be positive");
  if (!(opt.t_max >= 0.0)) throw DomainError("integration horizon must be non-negative");
  const auto verdict = check_stability(drift);
  if (!verdict.stable) {
    throw StabilityError("cannot integrate to a steady state: drift is " +
                             std::string(to_string(verdict.classification)),
                         verdict.margin);
  }

  const Matrix8 rt = drift.transpose();
  auto rhs = [&](const Matrix8& v) -> Matrix8 {
    Matrix8 out = diffusion;
    out.noalias() += drift * v;
    out.noalias() += v * rt;
    return out;
  };

  // The relative slack keeps t_max = k * dt from rounding up to k + 1 steps.
  const double steps_d =
      std::min(std::ceil(opt.t_max / opt.dt * (1.0 - 1e-12)), static_cast<double>(opt.max_steps));
  const long long steps = static_cast<long long>(steps_d);
  const double h = opt.dt;

  Matrix8 v = v0;
  double residual = 0.0;
  for (long long n = 0;; ++n) {
    const Matrix8 k1 = rhs(v);
    residual = k1.norm();
    if (residual < opt.tolerance) return CovarianceMatrix(v);
    if (n >= steps || !std::isfinite(residual)) {
      std::ostringstream os;
      os << "covariance integration did not converge after " << n << " steps (t = " << n * h
         << "); final ||dV/dt||_F = " << residual;
      throw NonConvergenceError(os.str(), residual, static_cast<double>(n) * h);
    }
    const Matrix8 k2 = rhs(v + 0.5 * h * k1);
    const Matrix8 k3 = rhs(v + 0.5 * h * k2);
    const Matrix8 k4 = rhs(v + h * k3);
    v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
}

}  // namespace qwsqueeze
