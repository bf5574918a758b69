#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "qwsqueeze/errors.hpp"
#include "qwsqueeze/model.hpp"

namespace qwsqueeze {

using Matrix8 = Eigen::Matrix<double, 8, 8>;

/// Index of each quadrature in the fluctuation vector.
enum Quadrature : int { Xb = 0, Yb, Xa, Ya, Xc1, Yc1, Xc2, Yc2 };

/// The four bosonic modes; each owns two consecutive quadratures.
enum class Mode : int { mechanics = 0, cavity = 1, exciton1 = 2, exciton2 = 3 };

inline constexpr std::array<std::string_view, 8> kQuadratureNames{
    "X_b", "Y_b", "X_a", "Y_a", "X_c1", "Y_c1", "X_c2", "Y_c2"};

struct LinearSystem {
  Matrix8 drift;
  Matrix8 diffusion;

  static constexpr const std::array<std::string_view, 8>& ordering() { return kQuadratureNames; }
};

inline void validate_couplings(const Couplings& c) {
  if (!std::isfinite(c.G_minus) || c.G_minus < 0.0)
    throw DomainError("G_minus must be finite and non-negative");
  if (!std::isfinite(c.G_plus) || c.G_plus < 0.0)
    throw DomainError("G_plus must be finite and non-negative");
}

/// Drift matrix of the linearized quadrature fluctuations.
///
/// Obtained from the rotating-wave fluctuation equations with
/// X = (o^+ + o)/sqrt2, Y = i(o^+ - o)/sqrt2. The red tone enters as a beam
/// splitter (G_minus) and the blue tone as two-mode squeezing (G_plus), so the
/// couplings only appear through G_minus + G_plus and G_minus - G_plus.
inline Matrix8 build_drift(const SystemParams& p, const Couplings& c) {
  p.validate();
  validate_couplings(c);
  const double sum = c.G_minus + c.G_plus;
  const double diff = c.G_minus - c.G_plus;

  Matrix8 r = Matrix8::Zero();
  r(Xb, Xb) = -p.gamma_m;
  r(Yb, Yb) = -p.gamma_m;
  r(Xb, Ya) = -diff;
  r(Yb, Xa) = sum;

  r(Xa, Xa) = -p.kappa;
  r(Ya, Ya) = -p.kappa;
  r(Xa, Yb) = -diff;
  r(Ya, Xb) = sum;

  for (int i = 0; i < 2; ++i) {
    const auto& ex = p.excitons[static_cast<std::size_t>(i)];
    const int x = Xc1 + 2 * i;
    const int y = x + 1;
    r(Xa, x) = ex.g;
    r(Ya, y) = ex.g;
    r(x, Xa) = -ex.g;
    r(y, Ya) = -ex.g;
    r(x, x) = -ex.gamma;
    r(y, y) = -ex.gamma;
    r(x, y) = ex.delta_ex;
    r(y, x) = -ex.delta_ex;
  }
  return r;
}

/// Diagonal noise matrix: gamma_m(2 n_th + 1) on the mechanics, the bare decay
/// rates on the vacuum-driven cavity and exciton quadratures.
inline Matrix8 build_diffusion(const SystemParams& p) {
  p.validate();
  Eigen::Matrix<double, 8, 1> d;
  const double mech = p.gamma_m * (2.0 * p.n_th + 1.0);
  d << mech, mech, p.kappa, p.kappa, p.excitons[0].gamma, p.excitons[0].gamma,
      p.excitons[1].gamma, p.excitons[1].gamma;
  return d.asDiagonal();
}

inline LinearSystem build_linear_system(const SystemParams& p, const Couplings& c) {
  return LinearSystem{build_drift(p, c), build_diffusion(p)};
}

// Real parts closer to zero than this are not trusted as strictly negative.
inline constexpr double kStabilityEpsilon = 1e-12;

enum class Stability { stable, marginal, unstable };

inline const char* to_string(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::marginal: return "marginal";
    case Stability::unstable: return "unstable";
  }
  return "unknown";
}

struct StabilityVerdict {
  bool stable = false;
  Stability classification = Stability::unstable;
  std::vector<double> eigen_real_parts;  // sorted descending
  double margin = 0.0;                   // largest real part
};

/// Classifies a margin: stable below -eps, marginal in [-eps, 0), unstable otherwise.
inline Stability classify_margin(double margin) {
  if (margin < -kStabilityEpsilon) return Stability::stable;
  if (margin < 0.0) return Stability::marginal;
  return Stability::unstable;
}

/// Spectral form of the Routh-Hurwitz test: every eigenvalue of the drift
/// must lie strictly in the left half plane.
template <typename Derived>
StabilityVerdict check_stability(const Eigen::MatrixBase<Derived>& drift) {
  if (drift.rows() != drift.cols()) throw DomainError("drift matrix must be square");
  const Eigen::MatrixXd m = drift;
  if (!m.allFinite()) throw DomainError("drift matrix has non-finite entries");

  Eigen::EigenSolver<Eigen::MatrixXd> solver;
  solver.compute(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eigenvalue iteration did not converge within " << 40 * m.rows()
       << " QR iterations for drift matrix\n"
       << m;
    throw NumericalError(os.str());
  }

  StabilityVerdict v;
  const auto& ev = solver.eigenvalues();
  v.eigen_real_parts.reserve(static_cast<std::size_t>(ev.size()));
  for (Eigen::Index i = 0; i < ev.size(); ++i) v.eigen_real_parts.push_back(ev[i].real());
  std::sort(v.eigen_real_parts.begin(), v.eigen_real_parts.end(), std::greater<>());
  v.margin = v.eigen_real_parts.empty() ? 0.0 : v.eigen_real_parts.front();
  v.classification = classify_margin(v.margin);
  v.stable = v.classification == Stability::stable;
  return v;
}

}  // namespace qwsqueeze
