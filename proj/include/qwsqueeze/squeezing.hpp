#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "qwsqueeze/errors.hpp"
#include "qwsqueeze/steadystate.hpp"

namespace qwsqueeze {

struct SqueezingResult {
  double V_q = 0.0;   // <X_b^2>
  double V_p = 0.0;   // <Y_b^2>
  double V_qp = 0.0;  // symmetrized <X_b Y_b>
  double S_min = 0.0;
  double S_max = 0.0;
  double theta_opt = 0.0;  // in [0, pi)
  double dB = 0.0;
};

inline Eigen::Matrix2d mechanical_block(const CovarianceMatrix& v) {
  return v.mode_block(Mode::mechanics);
}

namespace detail {

inline void require_covariance_block(const Eigen::Matrix2d& b) {
  if (!b.allFinite()) throw DomainError("covariance block has non-finite entries");
  const double scale = std::max(std::abs(b(0, 0)), std::abs(b(1, 1)));
  if (std::abs(b(0, 1) - b(1, 0)) > 1e-12 * std::max(scale, 1.0))
    throw DomainError("covariance block is not symmetric");
  if (!(b(0, 0) > 0.0) || !(b.determinant() > 0.0))
    throw DomainError("covariance block is not positive definite");
}

}  // namespace detail

/// <Q^2(theta)> for Q = X_b cos(theta) + Y_b sin(theta).
inline double quadrature_variance(const Eigen::Matrix2d& block, double theta) {
  detail::require_covariance_block(block);
  const double c = std::cos(theta), s = std::sin(theta);
  return block(0, 0) * c * c + block(1, 1) * s * s + 2.0 * block(0, 1) * s * c;
}

/// Variance in dB relative to the vacuum level 1: -10 log10(S_min).
inline double to_decibel(double s_min) {
  if (!(s_min > 0.0)) throw DomainError("variance must be positive to express in dB");
  return -10.0 * std::log10(s_min);
}

/// Minimized mechanical quadrature variance
///   S_min = V_p + V_q - sqrt((V_q - V_p)^2 + 4 V_qp^2) = 2 min_theta <Q^2(theta)>,
/// normalized so the vacuum gives exactly 1.
inline SqueezingResult minimize_variance(const Eigen::Matrix2d& block) {
  detail::require_covariance_block(block);
  SqueezingResult r;
  r.V_q = block(0, 0);
  r.V_p = block(1, 1);
  r.V_qp = 0.5 * (block(0, 1) + block(1, 0));
  const double root = std::hypot(r.V_q - r.V_p, 2.0 * r.V_qp);
  r.S_min = r.V_p + r.V_q - root;
  r.S_max = r.V_p + r.V_q + root;
  // Cancellation can leave a tiny S_min inaccurate; S_min S_max = 4 det is exact.
  if (r.S_min < 1e-6 * r.S_max) r.S_min = 4.0 * block.determinant() / r.S_max;

  // <Q^2> = (V_q + V_p)/2 + (V_q - V_p)/2 cos 2t + V_qp sin 2t.
  if (r.V_qp == 0.0 && r.V_q == r.V_p) {
    r.theta_opt = 0.0;
  } else {
    double t = 0.5 * std::atan2(-2.0 * r.V_qp, r.V_p - r.V_q);
    if (t < 0.0) t += std::numbers::pi;
    if (t >= std::numbers::pi) t -= std::numbers::pi;
    r.theta_opt = t;
  }
  r.dB = to_decibel(r.S_min);
  return r;
}

inline SqueezingResult minimize_variance(const CovarianceMatrix& v) {
  return minimize_variance(mechanical_block(v));
}

}  // namespace qwsqueeze
