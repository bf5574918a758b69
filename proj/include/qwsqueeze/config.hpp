#pragma once

// JSON run configuration: parsing with line-numbered diagnostics, and the
// inverse serialization used for self-contained metadata sidecars.
// The schema is documented in docs/config.md.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "qwsqueeze/errors.hpp"
#include "qwsqueeze/model.hpp"
#include "qwsqueeze/sweep.hpp"

namespace qwsqueeze {

using json = nlohmann::json;

enum class OutputFormat { csv, json, both };

inline const char* to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::csv: return "csv";
    case OutputFormat::json: return "json";
    case OutputFormat::both: return "both";
  }
  return "csv";
}

inline std::optional<OutputFormat> parse_output_format(std::string_view s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  if (s == "both") return OutputFormat::both;
  return std::nullopt;
}

struct OutputOptions {
  std::string dir = "out";
  std::string prefix = "sweep";
  OutputFormat format = OutputFormat::csv;
  int precision = 12;  // significant digits, 6..17
};

struct SweepAxes {
  Axis axis1;
  std::optional<Axis> axis2;
  PlotStyle plot = PlotStyle::automatic;
};

struct RunConfig {
  SystemParams system;
  DriveSpec drive = DirectDrive{};
  std::optional<SweepAxes> sweep;
  OutputOptions output;
  unsigned threads = 0;

  SweepSpec sweep_spec() const {
    if (!sweep) throw ConfigError("configuration has no sweep section");
    SweepSpec s;
    s.base = system;
    s.drive = drive;
    s.axis1 = sweep->axis1;
    s.axis2 = sweep->axis2;
    s.plot = sweep->plot;
    return s;
  }
};

/// Configuration equivalent to a figure preset.
inline RunConfig figure_config(FigureId f, const FigureOptions& opt = {}) {
  const SweepSpec s = figure_spec(f, opt);
  RunConfig c;
  c.system = s.base;
  c.drive = s.drive;
  c.sweep = SweepAxes{s.axis1, s.axis2, s.plot};
  c.output.prefix = std::string(to_string(f));
  return c;
}

namespace detail {

/// 1-based line of a byte offset.
inline std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

/// Walks a JSON object, reading known keys and rejecting the rest. Errors name
/// the JSON path and, where the key can be found in the source, its line.
class ObjectReader {
public:
  ObjectReader(const json& obj, std::string path, const std::string& text)
      : obj_(obj), path_(std::move(path)), text_(text) {
    if (!obj_.is_object()) fail(path_, "expected an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    if (!obj_.contains(key)) fail(path_, "missing required field \"" + key + "\"");
    return obj_.at(key);
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) fail(child(key), "field \"" + key + "\" must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(child(key), "field \"" + key + "\" must be finite");
    return d;
  }

  std::optional<double> opt_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number(key);
  }

  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) fail(child(key), "field \"" + key + "\" must be a string");
    return v.get<std::string>();
  }

  ObjectReader object(const std::string& key) { return ObjectReader(raw(key), child(key), text_); }

  std::string child(const std::string& key) const { return path_ + "/" + key; }
  const std::string& path() const { return path_; }
  const std::string& text() const { return text_; }

  /// Rejects keys that were never read.
  void finish() const {
    for (const auto& [k, v] : obj_.items()) {
      if (!seen_.count(k)) fail(child(k), "unknown key \"" + k + "\"");
    }
  }

  void ignore(const std::string& key) { seen_.insert(key); }

  [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
    throw ConfigError(locate(path) + path + ": " + msg);
  }

private:
  std::string locate(const std::string& path) const {
    // Best effort: the line of the last key of the path that appears in the text.
    std::string key = path.substr(path.find_last_of('/') + 1);
    if (!key.empty() && !std::isdigit(static_cast<unsigned char>(key.front()))) {
      const auto pos = text_.find("\"" + key + "\"");
      if (pos != std::string::npos) return "line " + std::to_string(line_of_offset(text_, pos)) + ": ";
    }
    if (path != path_) return locate(path_);
    return "";
  }

  const json& obj_;
  std::string path_;
  const std::string& text_;
  std::set<std::string> seen_;
};

inline std::vector<double> number_array(ObjectReader& r, const std::string& key, std::size_t expected = 0) {
  const json& v = r.raw(key);
  if (!v.is_array()) r.fail(r.child(key), "field \"" + key + "\" must be an array of numbers");
  if (expected != 0 && v.size() != expected)
    r.fail(r.child(key), "field \"" + key + "\" must have exactly " + std::to_string(expected) + " entries");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) r.fail(r.child(key), "field \"" + key + "\" must contain only numbers");
    out.push_back(e.get<double>());
    if (!std::isfinite(out.back())) r.fail(r.child(key), "field \"" + key + "\" must be finite");
  }
  return out;
}

inline SystemParams read_system(ObjectReader r) {
  SystemParams p;
  p.kappa = r.number("kappa");
  p.gamma_m = r.number("gamma_m");
  if (auto g0 = r.opt_number("g0")) p.g0 = *g0;

  if (r.has("n_th") && r.has("temperature"))
    r.fail(r.path(), "give either \"n_th\" or \"temperature\", not both");
  if (r.has("temperature")) {
    auto t = r.object("temperature");
    const double kelvin = t.number("kelvin");
    const double omega = t.number("omega_m_rad_s");
    t.finish();
    try {
      p.n_th = thermal_occupation(kelvin, omega);
    } catch (const DomainError& e) {
      r.fail(r.child("temperature"), e.what());
    }
  } else {
    p.n_th = r.number("n_th");
  }

  const std::optional<double> shared_gamma = r.opt_number("gamma");
  const json& ex = r.raw("excitons");
  if (!ex.is_array() || ex.size() != 2)
    r.fail(r.child("excitons"), "\"excitons\" must be an array of exactly two wells");
  for (std::size_t i = 0; i < 2; ++i) {
    ObjectReader e(ex[i], r.child("excitons") + "/" + std::to_string(i), r.text());
    p.excitons[i].g = e.number("g");
    p.excitons[i].delta_ex = e.number("delta_ex");
    if (e.has("gamma") || !shared_gamma) {
      p.excitons[i].gamma = e.number("gamma");
    } else {
      p.excitons[i].gamma = *shared_gamma;
    }
    e.finish();
  }
  r.finish();
  try {
    p.validate();
  } catch (const DomainError& e) {
    r.fail(r.path(), e.what());
  }
  return p;
}

inline DriveTone read_tone(ObjectReader r, ToneSign sign, double kappa) {
  DriveTone t;
  t.sign = sign;
  if (r.has("epsilon") == r.has("power_W"))
    r.fail(r.path(), "give exactly one of \"epsilon\" or \"power_W\"");
  if (r.has("epsilon")) {
    const json& e = r.raw("epsilon");
    if (e.is_number()) {
      t.amplitude = complex(e.get<double>(), 0.0);
    } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
      t.amplitude = complex(e[0].get<double>(), e[1].get<double>());
    } else {
      r.fail(r.child("epsilon"), "\"epsilon\" must be a number or [re, im]");
    }
  } else {
    const double power = r.number("power_W");
    const double freq = r.number("frequency_rad_s");
    const double omega_m = r.number("omega_m_rad_s");
    try {
      if (!(omega_m > 0.0)) throw DomainError("omega_m_rad_s must be positive");
      t.amplitude = complex(drive_amplitude(power, kappa * omega_m, freq) / omega_m, 0.0);
    } catch (const DomainError& e) {
      r.fail(r.path(), e.what());
    }
  }
  t.cavity_detuning = r.opt_number("cavity_detuning");
  r.finish();
  return t;
}

inline DriveSpec read_drive(ObjectReader r, const SystemParams& sys) {
  const bool direct = r.has("G_minus") || r.has("G_plus") || r.has("ratio");
  const bool amplitude = r.has("amplitudes");
  if (direct == amplitude)
    r.fail(r.path(), "give exactly one drive specification: {G_minus, ratio | G_plus} or {amplitudes}");
  if (direct) {
    DirectDrive d;
    d.G_minus = r.number("G_minus");
    if (r.has("ratio") == r.has("G_plus")) r.fail(r.path(), "give exactly one of \"ratio\" or \"G_plus\"");
    if (r.has("ratio")) {
      d.G_plus = r.number("ratio") * d.G_minus;
    } else {
      d.G_plus = r.number("G_plus");
    }
    if (d.G_minus < 0.0 || d.G_plus < 0.0) r.fail(r.path(), "couplings must be non-negative");
    r.finish();
    return d;
  }
  auto a = r.object("amplitudes");
  AmplitudeDrive d;
  d.plus = read_tone(a.object("plus"), ToneSign::plus, sys.kappa);
  d.minus = read_tone(a.object("minus"), ToneSign::minus, sys.kappa);
  auto det = a.object("exciton_detunings");
  const auto dp = number_array(det, "plus", 2);
  const auto dm = number_array(det, "minus", 2);
  det.finish();
  d.detunings.plus = {dp[0], dp[1]};
  d.detunings.minus = {dm[0], dm[1]};
  a.finish();
  r.finish();
  if (sys.g0 == 0.0) r.fail("/system", "amplitude drive needs a non-zero \"g0\"");
  return d;
}

inline Axis read_axis(ObjectReader r) {
  Axis a;
  const std::string name = r.string("parameter");
  const auto p = parse_sweep_parameter(name);
  if (!p) r.fail(r.child("parameter"), "unknown sweep parameter \"" + name + "\"");
  a.parameter = *p;
  if (r.has("values")) {
    if (r.has("start") || r.has("stop") || r.has("points"))
      r.fail(r.path(), "give either \"values\" or {start, stop, points}");
    a.grid = number_array(r, "values");
  } else {
    const double start = r.number("start");
    const double stop = r.number("stop");
    const double points = r.number("points");
    if (points < 1 || points != std::floor(points) || points > 1e7)
      r.fail(r.child("points"), "\"points\" must be a positive integer");
    a.grid = Axis::linspace(a.parameter, start, stop, static_cast<std::size_t>(points)).grid;
  }
  r.finish();
  return a;
}

inline SweepAxes read_sweep(ObjectReader r) {
  SweepAxes s;
  const json& axes = r.raw("axes");
  if (!axes.is_array() || axes.empty() || axes.size() > 2)
    r.fail(r.child("axes"), "\"axes\" must be an array of one or two axes");
  s.axis1 = read_axis(ObjectReader(axes[0], r.child("axes") + "/0", r.text()));
  if (axes.size() == 2) s.axis2 = read_axis(ObjectReader(axes[1], r.child("axes") + "/1", r.text()));
  if (r.has("plot")) {
    const std::string plot = r.string("plot");
    if (plot == "auto") s.plot = PlotStyle::automatic;
    else if (plot == "curves") s.plot = PlotStyle::curves;
    else if (plot == "heatmap") s.plot = PlotStyle::heatmap;
    else r.fail(r.child("plot"), "\"plot\" must be auto, curves or heatmap");
  }
  r.finish();
  return s;
}

inline OutputOptions read_output(ObjectReader r) {
  OutputOptions o;
  if (r.has("dir")) o.dir = r.string("dir");
  if (r.has("prefix")) o.prefix = r.string("prefix");
  if (r.has("format")) {
    const auto f = parse_output_format(r.string("format"));
    if (!f) r.fail(r.child("format"), "\"format\" must be csv, json or both");
    o.format = *f;
  }
  if (r.has("precision")) {
    const double p = r.number("precision");
    if (p != std::floor(p) || p < 6 || p > 17) r.fail(r.child("precision"), "\"precision\" must be an integer in [6, 17]");
    o.precision = static_cast<int>(p);
  }
  if (o.prefix.empty() || o.prefix.find('/') != std::string::npos)
    r.fail(r.child("prefix"), "\"prefix\" must be a non-empty file name");
  r.finish();
  return o;
}

}  // namespace detail

/// Parses a JSON configuration. Throws ConfigError with a line-numbered
/// diagnostic on malformed JSON, unknown keys, or invalid values.
inline RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("line " + std::to_string(detail::line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0)) +
                      ": malformed JSON: " + e.what());
  }
  detail::ObjectReader root(doc, "", text);
  RunConfig c;
  c.system = detail::read_system(root.object("system"));
  c.drive = detail::read_drive(root.object("drive"), c.system);
  if (root.has("sweep")) c.sweep = detail::read_sweep(root.object("sweep"));
  if (root.has("output")) c.output = detail::read_output(root.object("output"));
  if (root.has("threads")) {
    const double t = root.number("threads");
    if (t < 0 || t != std::floor(t) || t > 4096) root.fail("/threads", "\"threads\" must be a non-negative integer");
    c.threads = static_cast<unsigned>(t);
  }
  root.ignore("metadata");  // written into sidecars, not an input
  root.finish();
  if (c.sweep) {
    try {
      c.sweep_spec().validate();
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("/sweep: ") + e.what());
    }
  }
  return c;
}

namespace detail {

inline json tone_to_json(const DriveTone& t) {
  json j;
  j["epsilon"] = json::array({t.amplitude.real(), t.amplitude.imag()});
  if (t.cavity_detuning) j["cavity_detuning"] = *t.cavity_detuning;
  return j;
}

inline json axis_to_json(const Axis& a) {
  return json{{"parameter", std::string(to_string(a.parameter))}, {"values", a.grid}};
}

}  // namespace detail

/// Canonical JSON form; parse_config(to_json(c).dump()) reproduces c exactly.
inline json to_json(const RunConfig& c) {
  json sys;
  sys["kappa"] = c.system.kappa;
  sys["gamma_m"] = c.system.gamma_m;
  sys["g0"] = c.system.g0;
  sys["n_th"] = c.system.n_th;
  sys["excitons"] = json::array();
  for (const auto& ex : c.system.excitons)
    sys["excitons"].push_back({{"g", ex.g}, {"gamma", ex.gamma}, {"delta_ex", ex.delta_ex}});

  json drive;
  if (const auto* d = std::get_if<DirectDrive>(&c.drive)) {
    drive = {{"G_minus", d->G_minus}, {"G_plus", d->G_plus}};
  } else {
    const auto& a = std::get<AmplitudeDrive>(c.drive);
    drive["amplitudes"] = {
        {"plus", detail::tone_to_json(a.plus)},
        {"minus", detail::tone_to_json(a.minus)},
        {"exciton_detunings",
         {{"plus", {a.detunings.plus[0], a.detunings.plus[1]}},
          {"minus", {a.detunings.minus[0], a.detunings.minus[1]}}}}};
  }

  json out{{"system", sys}, {"drive", drive}};
  if (c.sweep) {
    json axes = json::array({detail::axis_to_json(c.sweep->axis1)});
    if (c.sweep->axis2) axes.push_back(detail::axis_to_json(*c.sweep->axis2));
    out["sweep"] = {{"axes", axes}, {"plot", to_string(c.sweep->plot)}};
  }
  out["output"] = {{"dir", c.output.dir},
                   {"prefix", c.output.prefix},
                   {"format", to_string(c.output.format)},
                   {"precision", c.output.precision}};
  out["threads"] = c.threads;
  return out;
}

}  // namespace qwsqueeze
