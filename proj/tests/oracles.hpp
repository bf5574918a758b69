#pragma once

// Independent reference computations used only by the tests. None of these
// call into the code paths they are used to check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "qwsqueeze/model.hpp"

namespace qwsqueeze::oracle {

/// Drift matrix assembled from the complex-amplitude fluctuation equations in
/// the basis (b, b+, a, a+, c1, c1+, c2, c2+) and then mapped to quadratures
/// with u = T w, R = T M T^-1.
inline Eigen::Matrix<double, 8, 8> drift_from_mode_equations(const SystemParams& p, double G_minus,
                                                             double G_plus) {
  using cd = std::complex<double>;
  const cd I(0.0, 1.0);
  Eigen::Matrix<cd, 8, 8> m = Eigen::Matrix<cd, 8, 8>::Zero();
  enum { b = 0, bd, a, ad, c1, c1d, c2, c2d };
  // d b / dt
  m(b, b) = -p.gamma_m;
  m(b, a) = I * G_minus;
  m(b, ad) = I * G_plus;
  m(bd, bd) = -p.gamma_m;
  m(bd, ad) = -I * G_minus;
  m(bd, a) = -I * G_plus;
  // d a / dt
  m(a, a) = -p.kappa;
  m(a, b) = I * G_minus;
  m(a, bd) = I * G_plus;
  m(ad, ad) = -p.kappa;
  m(ad, bd) = -I * G_minus;
  m(ad, b) = -I * G_plus;
  for (int i = 0; i < 2; ++i) {
    const auto& ex = p.excitons[static_cast<std::size_t>(i)];
    const int c = c1 + 2 * i, cdg = c + 1;
    m(a, c) = ex.g;
    m(ad, cdg) = ex.g;
    m(c, c) = -(ex.gamma + I * ex.delta_ex);
    m(cdg, cdg) = -(ex.gamma - I * ex.delta_ex);
    m(c, a) = -ex.g;
    m(cdg, ad) = -ex.g;
  }
  Eigen::Matrix<cd, 8, 8> t = Eigen::Matrix<cd, 8, 8>::Zero();
  const double s = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < 4; ++k) {
    const int o = 2 * k, od = o + 1;
    t(o, o) = s;  // X = (o + o+)/sqrt2
    t(o, od) = s;
    t(od, o) = -I * s;  // Y = i(o+ - o)/sqrt2
    t(od, od) = I * s;
  }
  const Eigen::Matrix<cd, 8, 8> r = t * m * t.inverse();
  return r.real();
}

/// Characteristic polynomial coefficients (monic, highest degree first) by
/// the Faddeev-LeVerrier recursion in long double.
inline std::vector<long double> characteristic_polynomial(const Eigen::MatrixXd& a) {
  using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const int n = static_cast<int>(a.rows());
  const MatL al = a.cast<long double>();
  std::vector<long double> c(static_cast<std::size_t>(n) + 1, 0.0L);
  c[0] = 1.0L;
  MatL mk = MatL::Zero(n, n);
  for (int k = 1; k <= n; ++k) {
    mk = al * mk + c[static_cast<std::size_t>(k - 1)] * MatL::Identity(n, n);
    c[static_cast<std::size_t>(k)] = -(al * mk).trace() / static_cast<long double>(k);
  }
  return c;
}

/// All complex roots of a monic polynomial by Aberth-Ehrlich iteration.
inline std::vector<std::complex<long double>> polynomial_roots(const std::vector<long double>& c) {
  using cl = std::complex<long double>;
  const std::size_t n = c.size() - 1;
  auto eval = [&](cl z, cl& dp) {
    cl p = c[0];
    dp = 0.0L;
    for (std::size_t k = 1; k <= n; ++k) {
      dp = dp * z + p;
      p = p * z + c[k];
    }
    return p;
  };
  long double bound = 0.0L;
  for (std::size_t k = 1; k <= n; ++k) bound = std::max(bound, std::abs(c[k]));
  const long double radius = 1.0L + bound;
  std::vector<cl> z(n);
  for (std::size_t k = 0; k < n; ++k) {
    const long double ang = 2.0L * std::numbers::pi_v<long double> * static_cast<long double>(k) / n + 0.4L;
    z[k] = std::polar(0.5L * radius, ang);
  }
  for (int it = 0; it < 2000; ++it) {
    long double change = 0.0L;
    for (std::size_t k = 0; k < n; ++k) {
      cl dp;
      const cl p = eval(z[k], dp);
      if (p == cl(0.0L)) continue;
      const cl ratio = p / dp;
      cl sum = 0.0L;
      for (std::size_t j = 0; j < n; ++j)
        if (j != k) sum += 1.0L / (z[k] - z[j]);
      const cl step = ratio / (1.0L - ratio * sum);
      z[k] -= step;
      change = std::max(change, std::abs(step));
    }
    if (change < 1e-17L) break;
  }
  return z;
}

/// Eigenvalue real parts via characteristic polynomial roots, sorted descending.
inline std::vector<double> eigen_real_parts_by_polynomial(const Eigen::MatrixXd& a) {
  std::vector<double> re;
  for (const auto& z : polynomial_roots(characteristic_polynomial(a))) re.push_back(static_cast<double>(z.real()));
  std::sort(re.begin(), re.end(), std::greater<>());
  return re;
}

/// 2 * min over an evenly spaced theta grid of <Q^2(theta)>.
inline double grid_min_variance(const Eigen::Matrix2d& b, int points) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < points; ++k) {
    const double th = std::numbers::pi * k / points;
    const double c = std::cos(th), s = std::sin(th);
    best = std::min(best, b(0, 0) * c * c + b(1, 1) * s * s + 2.0 * b(0, 1) * s * c);
  }
  return 2.0 * best;
}

/// Random symmetric positive-definite 2x2 block.
template <typename Rng>
Eigen::Matrix2d random_block(Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::Matrix2d a;
  a << u(rng), u(rng), u(rng), u(rng);
  Eigen::Matrix2d b = a * a.transpose() + 0.05 * Eigen::Matrix2d::Identity();
  return 0.5 * (b + b.transpose());
}

/// Parameter draw around the reference set, with every rate, coupling and detuning
/// scaled by an independent factor in [0.5, 1.5].
struct RandomDraw {
  SystemParams params;
  double G_minus = 0.0;
  double G_plus = 0.0;
};

template <typename Rng>
RandomDraw random_reference_draw(Rng& rng) {
  std::uniform_real_distribution<double> f(0.5, 1.5);
  std::uniform_int_distribution<int> pick(0, 2);
  const double kappas[] = {0.1, 1.0, 5.0};
  const double nths[] = {0.0, 10.0, 50.0};
  RandomDraw d;
  auto& p = d.params;
  p.kappa = kappas[pick(rng)] * f(rng);
  p.gamma_m = 1e-5 * f(rng);
  p.n_th = nths[pick(rng)];
  p.excitons[0] = ExcitonParams{2.0 * f(rng), 2.0 * f(rng), 1.0 * f(rng)};
  p.excitons[1] = ExcitonParams{2.0 * f(rng), 2.0 * f(rng), -1.0 * f(rng)};
  d.G_minus = 0.1 * f(rng);
  d.G_plus = 0.05 * f(rng);
  return d;
}

}  // namespace qwsqueeze::oracle
