#pragma once

// Physical parameters of the two-well hybrid optomechanical cavity and the
// classical quantities derived from them: bath occupation, drive amplitudes,
// steady intracavity/exciton amplitudes and the dressed couplings.
//
// Every rate and frequency is expressed in units of the mechanical frequency,
// so omega_m is 1 internally. Only thermal_occupation and drive_amplitude take
// SI inputs.

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string>

#include "qwsqueeze/errors.hpp"

namespace qwsqueeze {

inline constexpr double kHbar = 1.054571817e-34;        // J s
inline constexpr double kBoltzmann = 1.380649e-23;      // J / K
inline constexpr double kSingularityThreshold = 1e-12;  // omega_m units

using complex = std::complex<double>;

struct ExcitonParams {
  double g = 0.0;         // exciton-cavity coupling
  double gamma = 1.0;     // spontaneous emission rate
  double delta_ex = 0.0;  // exciton-mechanical detuning omega_ex - omega_m
};

struct SystemParams {
  double omega_m = 1.0;
  double kappa = 1.0;
  double gamma_m = 1e-5;
  double g0 = 0.0;
  std::array<ExcitonParams, 2> excitons{};
  double n_th = 0.0;

  /// Throws DomainError when a rate is non-positive or n_th is negative.
  void validate() const {
    auto require = [](bool ok, const std::string& msg) {
      if (!ok) throw DomainError(msg);
    };
    require(std::isfinite(omega_m) && omega_m > 0.0, "omega_m must be positive");
    require(std::isfinite(kappa) && kappa > 0.0, "kappa must be positive");
    require(std::isfinite(gamma_m) && gamma_m > 0.0, "gamma_m must be positive");
    require(std::isfinite(n_th) && n_th >= 0.0, "n_th must be non-negative");
    require(std::isfinite(g0), "g0 must be finite");
    for (std::size_t i = 0; i < excitons.size(); ++i) {
      const auto& ex = excitons[i];
      const std::string tag = "exciton " + std::to_string(i + 1);
      require(std::isfinite(ex.gamma) && ex.gamma > 0.0, tag + ": gamma must be positive");
      require(std::isfinite(ex.g), tag + ": g must be finite");
      require(std::isfinite(ex.delta_ex), tag + ": delta_ex must be finite");
    }
  }
};

/// Effective optomechanical couplings of the red (minus) and blue (plus) tones.
struct Couplings {
  double G_minus = 0.0;
  double G_plus = 0.0;

  static Couplings from_ratio(double G_minus, double ratio) {
    return Couplings{G_minus, ratio * G_minus};
  }
};

enum class ToneSign { plus, minus };

inline const char* to_string(ToneSign s) { return s == ToneSign::plus ? "plus" : "minus"; }

/// One laser tone at omega_a +/- omega_m.
struct DriveTone {
  ToneSign sign = ToneSign::plus;
  // Only the modulus enters the dressed couplings; the phase is kept so that
  // callers can exercise phase invariance.
  complex amplitude{0.0, 0.0};
  // omega_a - omega_tone. Unset means the nominal sideband value -/+ omega_m.
  std::optional<double> cavity_detuning;

  double detuning() const {
    if (cavity_detuning) return *cavity_detuning;
    return sign == ToneSign::plus ? -1.0 : 1.0;
  }
};

/// Exciton-tone detunings omega_ex_i - omega_pm for both wells and both tones.
struct ToneDetunings {
  std::array<double, 2> plus{};
  std::array<double, 2> minus{};
};

struct SteadyAmplitudes {
  complex a_plus, a_minus;
  std::array<complex, 2> c_plus{}, c_minus{};
  double G_plus = 0.0, G_minus = 0.0;

  Couplings couplings() const { return Couplings{G_minus, G_plus}; }
};

/// Mean thermal phonon number [exp(hbar w / kB T) - 1]^-1.
inline double thermal_occupation(double temperature_kelvin, double omega_m_rad_s) {
  if (!(temperature_kelvin >= 0.0)) throw DomainError("temperature must be non-negative");
  if (!(omega_m_rad_s > 0.0)) throw DomainError("mechanical frequency must be positive");
  if (temperature_kelvin == 0.0) return 0.0;
  const double x = kHbar * omega_m_rad_s / (kBoltzmann * temperature_kelvin);
  return 1.0 / std::expm1(x);
}

/// Drive amplitude sqrt(kappa P / hbar w) in rad/s.
inline double drive_amplitude(double power_watt, double kappa_rad_s, double tone_frequency_rad_s) {
  if (!(power_watt >= 0.0)) throw DomainError("drive power must be non-negative");
  if (!(kappa_rad_s > 0.0)) throw DomainError("kappa must be positive");
  if (!(tone_frequency_rad_s > 0.0)) throw DomainError("tone frequency must be positive");
  return std::sqrt(kappa_rad_s * power_watt / (kHbar * tone_frequency_rad_s));
}

namespace detail {

inline complex checked_denominator(complex d, const std::string& where) {
  if (std::abs(d) < kSingularityThreshold) {
    throw SingularityError("vanishing denominator (|d| = " + std::to_string(std::abs(d)) +
                           ") in " + where);
  }
  return d;
}

struct ToneSolution {
  complex a;
  std::array<complex, 2> c;
};

inline ToneSolution solve_tone(const SystemParams& p, const DriveTone& tone,
                               const std::array<double, 2>& exciton_detuning) {
  const std::string tag = std::string(to_string(tone.sign)) + " tone";
  std::array<complex, 2> exciton_den{};
  complex self_energy{0.0, 0.0};
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& ex = p.excitons[i];
    exciton_den[i] = checked_denominator(complex(ex.gamma, exciton_detuning[i]),
                                         tag + ", exciton " + std::to_string(i + 1));
    self_energy += ex.g * ex.g / exciton_den[i];
  }
  const complex den =
      checked_denominator(complex(p.kappa, tone.detuning()) + self_energy, tag + ", cavity");
  ToneSolution out;
  out.a = tone.amplitude / den;
  for (std::size_t i = 0; i < 2; ++i) {
    out.c[i] = complex(0.0, -p.excitons[i].g) * out.a / exciton_den[i];
  }
  return out;
}

}  // namespace detail

/// Classical steady state of the driven cavity and excitons for both tones.
///
/// a = eps / (kappa + i(omega_a - omega_tone) + sum_i g_i^2 / (gamma_i + i Delta_i)),
/// c_i = -i g_i a / (gamma_i + i Delta_i). The dressed couplings are g0 |a|, i.e.
/// drive phases are taken such that both couplings are real and non-negative.
inline SteadyAmplitudes steady_amplitudes(const SystemParams& params, const DriveTone& plus,
                                          const DriveTone& minus,
                                          const ToneDetunings& detunings) {
  params.validate();
  if (plus.sign != ToneSign::plus || minus.sign != ToneSign::minus) {
    throw DomainError("steady_amplitudes expects (plus, minus) tones in that order");
  }
  const auto sp = detail::solve_tone(params, plus, detunings.plus);
  const auto sm = detail::solve_tone(params, minus, detunings.minus);
  SteadyAmplitudes out;
  out.a_plus = sp.a;
  out.a_minus = sm.a;
  out.c_plus = sp.c;
  out.c_minus = sm.c;
  out.G_plus = params.g0 * std::abs(sp.a);
  out.G_minus = params.g0 * std::abs(sm.a);
  return out;
}

}  // namespace qwsqueeze
