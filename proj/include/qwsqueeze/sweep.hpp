#pragma once

// Forward parameter scans of the full pipeline
//   couplings -> drift/diffusion -> stability -> Lyapunov -> squeezing
// over one or two axes, plus presets for the two standard figure families
// (dB versus G+/G- at a few kappa values, and dB over G+/G- x kappa).

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <iomanip>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "qwsqueeze/dynamics.hpp"
#include "qwsqueeze/errors.hpp"
#include "qwsqueeze/model.hpp"
#include "qwsqueeze/squeezing.hpp"
#include "qwsqueeze/steadystate.hpp"

namespace qwsqueeze {

enum class SweepParameter {
  ratio,  // G_plus / G_minus
  G_minus,
  kappa,
  n_th,
  gamma_m,
  g,  // both wells
  g1,
  g2,
  gamma,  // both wells
  gamma1,
  gamma2,
  delta_ex1,
  delta_ex2,
};

inline constexpr std::array<std::pair<SweepParameter, std::string_view>, 13> kSweepParameterNames{{
    {SweepParameter::ratio, "ratio"},
    {SweepParameter::G_minus, "G_minus"},
    {SweepParameter::kappa, "kappa"},
    {SweepParameter::n_th, "n_th"},
    {SweepParameter::gamma_m, "gamma_m"},
    {SweepParameter::g, "g"},
    {SweepParameter::g1, "g1"},
    {SweepParameter::g2, "g2"},
    {SweepParameter::gamma, "gamma"},
    {SweepParameter::gamma1, "gamma1"},
    {SweepParameter::gamma2, "gamma2"},
    {SweepParameter::delta_ex1, "delta_ex1"},
    {SweepParameter::delta_ex2, "delta_ex2"},
}};

inline std::string_view to_string(SweepParameter p) {
  for (const auto& [k, v] : kSweepParameterNames)
    if (k == p) return v;
  return "?";
}

inline std::optional<SweepParameter> parse_sweep_parameter(std::string_view s) {
  for (const auto& [k, v] : kSweepParameterNames)
    if (v == s) return k;
  return std::nullopt;
}

struct Axis {
  SweepParameter parameter = SweepParameter::ratio;
  std::vector<double> grid;

  static Axis linspace(SweepParameter p, double lo, double hi, std::size_t n) {
    Axis a{p, {}};
    a.grid.reserve(n);
    if (n == 1) {
      a.grid.push_back(lo);
      return a;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(n - 1);
      a.grid.push_back(i + 1 == n ? hi : lo + (hi - lo) * t);
    }
    return a;
  }
};

/// Couplings given directly, as in the figure presets.
struct DirectDrive {
  double G_minus = 0.1;
  double G_plus = 0.0;
};

/// Couplings derived from tone amplitudes through the classical steady state.
struct AmplitudeDrive {
  DriveTone plus{ToneSign::plus, {0.0, 0.0}, std::nullopt};
  DriveTone minus{ToneSign::minus, {0.0, 0.0}, std::nullopt};
  ToneDetunings detunings{};
};

using DriveSpec = std::variant<DirectDrive, AmplitudeDrive>;

inline Couplings resolve_couplings(const SystemParams& p, const DriveSpec& drive) {
  if (const auto* d = std::get_if<DirectDrive>(&drive)) return Couplings{d->G_minus, d->G_plus};
  const auto& a = std::get<AmplitudeDrive>(drive);
  return steady_amplitudes(p, a.plus, a.minus, a.detunings).couplings();
}

enum class PlotStyle { automatic, curves, heatmap };

inline const char* to_string(PlotStyle s) {
  switch (s) {
    case PlotStyle::automatic: return "auto";
    case PlotStyle::curves: return "curves";
    case PlotStyle::heatmap: return "heatmap";
  }
  return "auto";
}

struct SweepSpec {
  SystemParams base;
  DriveSpec drive = DirectDrive{};
  Axis axis1;
  std::optional<Axis> axis2;
  PlotStyle plot = PlotStyle::automatic;

  std::size_t size() const { return axis1.grid.size() * (axis2 ? axis2->grid.size() : 1); }

  /// Two-axis sweeps default to a heatmap, one-axis sweeps to a single curve.
  PlotStyle effective_plot() const {
    if (plot != PlotStyle::automatic) return plot;
    return axis2 ? PlotStyle::heatmap : PlotStyle::curves;
  }

  void validate() const {
    try {
      base.validate();
    } catch (const DomainError& e) {
      throw ConfigError(std::string("invalid base parameters: ") + e.what());
    }
    auto check_axis = [&](const Axis& a, const char* label) {
      const std::string tag = std::string(label) + " (" + std::string(to_string(a.parameter)) + ")";
      if (a.grid.empty()) throw ConfigError(tag + ": grid is empty");
      for (std::size_t i = 0; i < a.grid.size(); ++i) {
        if (!std::isfinite(a.grid[i])) throw ConfigError(tag + ": grid value is not finite");
        if (i > 0 && !(a.grid[i] > a.grid[i - 1]))
          throw ConfigError(tag + ": grid must be strictly increasing");
      }
      if (a.parameter == SweepParameter::ratio && a.grid.front() < 0.0)
        throw ConfigError(tag + ": ratio values must be non-negative");
      if (std::holds_alternative<AmplitudeDrive>(drive) &&
          (a.parameter == SweepParameter::ratio || a.parameter == SweepParameter::G_minus))
        throw ConfigError(tag + ": coupling axes need a direct G_minus/G_plus drive");
    };
    check_axis(axis1, "axis1");
    if (axis2) {
      check_axis(*axis2, "axis2");
      if (axis2->parameter == axis1.parameter) throw ConfigError("both axes sweep the same parameter");
    }
  }
};

struct SweepTolerances {
  double stability_epsilon = kStabilityEpsilon;
  double lyapunov_residual = kLyapunovResidualTolerance;
  double asymmetry_warning = kAsymmetryWarning;
  double singularity_threshold = kSingularityThreshold;
};

struct PointRecord {
  Stability stability = Stability::unstable;
  double margin = 0.0;
  std::optional<SqueezingResult> squeezing;  // only for strictly stable points
  std::string error;                         // non-empty when a stable point failed to solve
  bool conditioning_warning = false;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<double> axis1;
  std::vector<double> axis2;  // empty for one-axis sweeps
  std::vector<PointRecord> records;  // axis1 fastest: index = i + N1 * j
  std::string timestamp;
  SweepTolerances tolerances;
  bool all_unstable = false;

  std::size_t n1() const { return axis1.size(); }
  std::size_t n2() const { return axis2.empty() ? 1 : axis2.size(); }
  const PointRecord& at(std::size_t i, std::size_t j = 0) const { return records.at(i + n1() * j); }
};

struct PointEvaluation {
  StabilityVerdict verdict;
  std::optional<CovarianceMatrix> covariance;
  std::optional<SqueezingResult> squeezing;
};

/// Full single-point pipeline. The Lyapunov solve only runs for strictly
/// stable drifts; marginal and unstable points return the verdict alone.
inline PointEvaluation evaluate_point(const SystemParams& p, const Couplings& c) {
  const LinearSystem sys = build_linear_system(p, c);
  PointEvaluation out;
  out.verdict = check_stability(sys.drift);
  if (!out.verdict.stable) return out;
  out.covariance = solve_lyapunov(sys.drift, sys.diffusion, out.verdict);
  out.squeezing = minimize_variance(*out.covariance);
  return out;
}

/// Overrides one parameter. Ratio axes are applied last so they see the
/// final G_minus.
inline void apply_parameter(SweepParameter which, double value, SystemParams& p, DriveSpec& drive) {
  auto& ex = p.excitons;
  switch (which) {
    case SweepParameter::ratio: {
      auto& d = std::get<DirectDrive>(drive);
      d.G_plus = value * d.G_minus;
      break;
    }
    case SweepParameter::G_minus: std::get<DirectDrive>(drive).G_minus = value; break;
    case SweepParameter::kappa: p.kappa = value; break;
    case SweepParameter::n_th: p.n_th = value; break;
    case SweepParameter::gamma_m: p.gamma_m = value; break;
    case SweepParameter::g: ex[0].g = ex[1].g = value; break;
    case SweepParameter::g1: ex[0].g = value; break;
    case SweepParameter::g2: ex[1].g = value; break;
    case SweepParameter::gamma: ex[0].gamma = ex[1].gamma = value; break;
    case SweepParameter::gamma1: ex[0].gamma = value; break;
    case SweepParameter::gamma2: ex[1].gamma = value; break;
    case SweepParameter::delta_ex1: ex[0].delta_ex = value; break;
    case SweepParameter::delta_ex2: ex[1].delta_ex = value; break;
  }
}

namespace detail {

inline PointRecord evaluate_grid_point(const SweepSpec& spec, std::size_t i, std::size_t j) {
  SystemParams p = spec.base;
  DriveSpec drive = spec.drive;
  std::vector<std::pair<SweepParameter, double>> overrides{{spec.axis1.parameter, spec.axis1.grid[i]}};
  if (spec.axis2) overrides.emplace_back(spec.axis2->parameter, spec.axis2->grid[j]);
  std::stable_partition(overrides.begin(), overrides.end(),
                        [](const auto& o) { return o.first != SweepParameter::ratio; });
  for (const auto& [which, value] : overrides) apply_parameter(which, value, p, drive);

  PointRecord rec;
  try {
    const Couplings c = resolve_couplings(p, drive);
    const LinearSystem sys = build_linear_system(p, c);
    const StabilityVerdict verdict = check_stability(sys.drift);
    rec.stability = verdict.classification;
    rec.margin = verdict.margin;
    if (verdict.stable) {
      const CovarianceMatrix v = solve_lyapunov(sys.drift, sys.diffusion, verdict);
      rec.conditioning_warning = v.conditioning_warning();
      rec.squeezing = minimize_variance(v);
    }
  } catch (const Error& e) {
    rec.squeezing.reset();
    rec.error = e.what();
  }
  return rec;
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace detail

struct SweepOptions {
  unsigned threads = 0;  // 0 = hardware concurrency
  // Non-zero permutes the evaluation order; aggregation is unaffected.
  std::uint64_t shuffle_seed = 0;
};

/// Evaluates every grid point. Per-point failures are recorded, never thrown.
inline SweepResult run_sweep(const SweepSpec& spec, const SweepOptions& opt = {}) {
  spec.validate();
  SweepResult result;
  result.spec = spec;
  result.axis1 = spec.axis1.grid;
  if (spec.axis2) result.axis2 = spec.axis2->grid;
  result.timestamp = detail::utc_timestamp();

  const std::size_t n1 = result.n1();
  const std::size_t total = spec.size();
  result.records.resize(total);

  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (opt.shuffle_seed != 0) {
    std::mt19937_64 rng(opt.shuffle_seed);
    std::shuffle(order.begin(), order.end(), rng);
  }

  unsigned workers = opt.threads != 0 ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, total));

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k; (k = next.fetch_add(1, std::memory_order_relaxed)) < total;) {
      const std::size_t idx = order[k];
      result.records[idx] = detail::evaluate_grid_point(spec, idx % n1, idx / n1);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  result.all_unstable = std::none_of(result.records.begin(), result.records.end(),
                                     [](const PointRecord& r) { return r.stability == Stability::stable; });
  return result;
}

// Figure presets -----------------------------------------------------------

enum class FigureId { fig2a, fig2b, fig2c, fig3a, fig3b, fig3c };

inline constexpr std::array<std::pair<FigureId, std::string_view>, 6> kFigureNames{{
    {FigureId::fig2a, "fig2a"},
    {FigureId::fig2b, "fig2b"},
    {FigureId::fig2c, "fig2c"},
    {FigureId::fig3a, "fig3a"},
    {FigureId::fig3b, "fig3b"},
    {FigureId::fig3c, "fig3c"},
}};

inline std::string_view to_string(FigureId f) {
  for (const auto& [k, v] : kFigureNames)
    if (k == f) return v;
  return "?";
}

inline std::optional<FigureId> parse_figure_id(std::string_view s) {
  for (const auto& [k, v] : kFigureNames)
    if (v == s) return k;
  return std::nullopt;
}

struct FigureOptions {
  // Exciton coupling g1 = g2 used by the presets. 2 is the default, 1 an alternative reading.
  double exciton_coupling = 2.0;
  std::optional<std::size_t> ratio_points;  // default 200 (line plots) or 100 (heatmaps)
  std::size_t kappa_points = 100;
  double ratio_max = 0.99;
};

/// Reference parameter set: G- = 0.1, g1 = g2 = 2, gamma1 = gamma2 = 2,
/// Delta_ex1 = -Delta_ex2 = 1, gamma_m = 1e-5 (all in omega_m), kappa = 0.1.
inline SystemParams reference_parameters(double exciton_coupling = 2.0, double n_th = 0.0) {
  SystemParams p;
  p.kappa = 0.1;
  p.gamma_m = 1e-5;
  p.n_th = n_th;
  p.excitons[0] = ExcitonParams{exciton_coupling, 2.0, 1.0};
  p.excitons[1] = ExcitonParams{exciton_coupling, 2.0, -1.0};
  return p;
}

inline constexpr double kReferenceGMinus = 0.1;

inline double figure_thermal_occupation(FigureId f) {
  switch (f) {
    case FigureId::fig2a:
    case FigureId::fig3a: return 0.0;
    case FigureId::fig2b:
    case FigureId::fig3b: return 10.0;
    case FigureId::fig2c:
    case FigureId::fig3c: return 50.0;
  }
  return 0.0;
}

inline bool is_line_figure(FigureId f) {
  return f == FigureId::fig2a || f == FigureId::fig2b || f == FigureId::fig2c;
}

/// Sweep specification behind one figure panel: three kappa curves for the
/// line plots, a ratio x kappa grid over [0.1, 5] for the heatmaps.
inline SweepSpec figure_spec(FigureId f, const FigureOptions& opt = {}) {
  SweepSpec s;
  s.base = reference_parameters(opt.exciton_coupling, figure_thermal_occupation(f));
  s.drive = DirectDrive{kReferenceGMinus, 0.0};
  if (is_line_figure(f)) {
    s.axis1 = Axis::linspace(SweepParameter::ratio, 0.0, opt.ratio_max, opt.ratio_points.value_or(200));
    s.axis2 = Axis{SweepParameter::kappa, {0.1, 1.0, 5.0}};
    s.plot = PlotStyle::curves;
  } else {
    s.axis1 = Axis::linspace(SweepParameter::ratio, 0.0, opt.ratio_max, opt.ratio_points.value_or(100));
    s.axis2 = Axis::linspace(SweepParameter::kappa, 0.1, 5.0, opt.kappa_points);
    s.plot = PlotStyle::heatmap;
  }
  return s;
}

inline SweepResult reproduce_figure(FigureId f, const SweepOptions& sweep_opt = {},
                                    const FigureOptions& fig_opt = {}) {
  return run_sweep(figure_spec(f, fig_opt), sweep_opt);
}

}  // namespace qwsqueeze
