#pragma once

// Serialization of sweep and point results: CSV tables, JSON records,
// metadata sidecars and plot-ready text files.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "json.hpp"

#include "qwsqueeze/config.hpp"
#include "qwsqueeze/errors.hpp"
#include "qwsqueeze/sweep.hpp"

namespace qwsqueeze {

inline constexpr std::string_view kToolVersion = "1.0.0";

/// Shortest decimal that round-trips, unless that needs more than
/// `precision` significant digits, in which case %.{precision}g.
inline std::string format_number(double v, int precision) {
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";  // also folds -0
  char buf[64];
  auto shortest = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, shortest.ptr);
  int digits = 0;
  bool leading = true;
  for (char ch : s) {
    if (ch == 'e' || ch == 'E') break;
    if (ch < '0' || ch > '9') continue;
    if (leading && ch == '0') continue;
    leading = false;
    ++digits;
  }
  if (digits <= precision) return s;
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, precision);
  return std::string(buf, r.ptr);
}

inline const char* record_flag(const PointRecord& r) {
  if (!r.error.empty()) return "error";
  return to_string(r.stability);
}

/// CSV table: axis1,axis2,stable,S_min,dB,V_q,V_p,V_qp,theta_opt (axis2
/// omitted for one-axis sweeps). Rows follow the grid with axis1 fastest.
inline std::string csv_string(const SweepResult& r, int precision) {
  const bool two_axes = !r.axis2.empty();
  std::ostringstream os;
  os << "axis1," << (two_axes ? "axis2," : "") << "stable,S_min,dB,V_q,V_p,V_qp,theta_opt\n";
  for (std::size_t j = 0; j < r.n2(); ++j) {
    for (std::size_t i = 0; i < r.n1(); ++i) {
      const PointRecord& rec = r.at(i, j);
      os << format_number(r.axis1[i], precision) << ',';
      if (two_axes) os << format_number(r.axis2[j], precision) << ',';
      os << record_flag(rec);
      if (rec.squeezing) {
        const auto& s = *rec.squeezing;
        for (double v : {s.S_min, s.dB, s.V_q, s.V_p, s.V_qp, s.theta_opt}) os << ',' << format_number(v, precision);
      } else {
        os << ",,,,,,";
      }
      os << '\n';
    }
  }
  return os.str();
}

struct CsvRow {
  double axis1 = 0.0;
  std::optional<double> axis2;
  std::string stable;
  std::optional<double> S_min, dB, V_q, V_p, V_qp, theta_opt;
};

/// Reads a table written by csv_string.
inline std::vector<CsvRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("CSV: missing header");
  std::vector<std::string> header;
  {
    std::stringstream hs(line);
    for (std::string f; std::getline(hs, f, ',');) header.push_back(f);
  }
  const bool two_axes = header.size() == 9;
  if (header.size() != 8 && header.size() != 9) throw ConfigError("CSV: unexpected header \"" + line + "\"");

  auto number = [](const std::string& f, std::size_t line_no) -> std::optional<double> {
    if (f.empty()) return std::nullopt;
    double v = 0.0;
    const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
    if (res.ec != std::errc() || res.ptr != f.data() + f.size())
      throw ConfigError("CSV line " + std::to_string(line_no) + ": bad number \"" + f + "\"");
    return v;
  };

  std::vector<CsvRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (std::size_t pos; (pos = line.find(',', start)) != std::string::npos; start = pos + 1)
      f.push_back(line.substr(start, pos - start));
    f.push_back(line.substr(start));
    if (f.size() != header.size()) throw ConfigError("CSV line " + std::to_string(line_no) + ": wrong field count");
    std::size_t k = 0;
    CsvRow row;
    row.axis1 = number(f[k++], line_no).value_or(std::nan(""));
    if (two_axes) row.axis2 = number(f[k++], line_no);
    row.stable = f[k++];
    row.S_min = number(f[k++], line_no);
    row.dB = number(f[k++], line_no);
    row.V_q = number(f[k++], line_no);
    row.V_p = number(f[k++], line_no);
    row.V_qp = number(f[k++], line_no);
    row.theta_opt = number(f[k++], line_no);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json squeezing_to_json(const SqueezingResult& s) {
  return json{{"S_min", s.S_min}, {"dB", s.dB},     {"V_q", s.V_q},
              {"V_p", s.V_p},     {"V_qp", s.V_qp}, {"theta_opt", s.theta_opt}};
}

/// Result records as JSON (for --format json).
inline json result_to_json(const SweepResult& r) {
  json records = json::array();
  for (std::size_t j = 0; j < r.n2(); ++j) {
    for (std::size_t i = 0; i < r.n1(); ++i) {
      const PointRecord& rec = r.at(i, j);
      json e{{"axis1", r.axis1[i]}, {"stable", record_flag(rec)}, {"margin", rec.margin}};
      if (!r.axis2.empty()) e["axis2"] = r.axis2[j];
      if (rec.squeezing) e.update(squeezing_to_json(*rec.squeezing));
      if (!rec.error.empty()) e["error"] = rec.error;
      if (rec.conditioning_warning) e["conditioning_warning"] = true;
      records.push_back(std::move(e));
    }
  }
  json axes{{"axis1", {{"parameter", to_string(r.spec.axis1.parameter)}, {"values", r.axis1}}}};
  if (r.spec.axis2) axes["axis2"] = {{"parameter", to_string(r.spec.axis2->parameter)}, {"values", r.axis2}};
  return json{{"axes", axes}, {"records", records}};
}

/// Metadata sidecar: a complete, re-runnable configuration plus a "metadata"
/// block (ignored when the sidecar is read back as a configuration).
inline json metadata_sidecar(const RunConfig& config, const SweepResult& r) {
  json j = to_json(config);
  std::size_t stable = 0, marginal = 0, unstable = 0, errors = 0;
  for (const auto& rec : r.records) {
    if (!rec.error.empty()) ++errors;
    else if (rec.stability == Stability::stable) ++stable;
    else if (rec.stability == Stability::marginal) ++marginal;
    else ++unstable;
  }
  j["metadata"] = {
      {"tool", "qwsqueeze"},
      {"version", kToolVersion},
      {"timestamp", r.timestamp},
      {"units", "all rates and frequencies in units of omega_m"},
      {"points", r.records.size()},
      {"counts", {{"stable", stable}, {"marginal", marginal}, {"unstable", unstable}, {"error", errors}}},
      {"all_unstable", r.all_unstable},
      {"tolerances",
       {{"stability_epsilon", r.tolerances.stability_epsilon},
        {"lyapunov_relative_residual", r.tolerances.lyapunov_residual},
        {"asymmetry_warning", r.tolerances.asymmetry_warning},
        {"singularity_threshold", r.tolerances.singularity_threshold}}}};
  return j;
}

struct PlotFile {
  std::string name;
  std::string content;
};

/// Two-column x<TAB>dB text per curve (one per axis2 value), or one matrix
/// file for heatmaps. Unstable points emit nan.
inline std::vector<PlotFile> plot_files(const SweepResult& r, const std::string& prefix, int precision) {
  auto db = [&](const PointRecord& rec) {
    return rec.squeezing ? format_number(rec.squeezing->dB, precision) : std::string("nan");
  };
  std::vector<PlotFile> files;
  if (r.spec.effective_plot() == PlotStyle::heatmap && !r.axis2.empty()) {
    std::ostringstream os;
    os << "# x:";
    for (double x : r.axis1) os << ' ' << format_number(x, precision);
    os << "\n# y:";
    for (double y : r.axis2) os << ' ' << format_number(y, precision);
    os << '\n';
    for (std::size_t j = 0; j < r.n2(); ++j) {
      for (std::size_t i = 0; i < r.n1(); ++i) os << (i ? "\t" : "") << db(r.at(i, j));
      os << '\n';
    }
    files.push_back({prefix + "_heatmap.dat", os.str()});
    return files;
  }
  for (std::size_t j = 0; j < r.n2(); ++j) {
    std::ostringstream os;
    for (std::size_t i = 0; i < r.n1(); ++i) os << format_number(r.axis1[i], precision) << '\t' << db(r.at(i, j)) << '\n';
    std::string name = prefix;
    if (!r.axis2.empty())
      name += "_" + std::string(to_string(r.spec.axis2->parameter)) + "_" + format_number(r.axis2[j], precision);
    files.push_back({name + ".dat", os.str()});
  }
  return files;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

/// Writes CSV and/or JSON records, the metadata sidecar and plot data under
/// config.output.dir. Returns the written paths.
inline std::vector<std::filesystem::path> write_sweep_outputs(const RunConfig& config, const SweepResult& r) {
  namespace fs = std::filesystem;
  const fs::path dir(config.output.dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());

  const std::string& prefix = config.output.prefix;
  const int precision = config.output.precision;
  std::vector<fs::path> written;
  auto emit = [&](const std::string& name, const std::string& content) {
    write_text_file(dir / name, content);
    written.push_back(dir / name);
  };
  if (config.output.format != OutputFormat::json) emit(prefix + ".csv", csv_string(r, precision));
  if (config.output.format != OutputFormat::csv) emit(prefix + ".json", result_to_json(r).dump(2) + "\n");
  emit(prefix + ".meta.json", metadata_sidecar(config, r).dump(2) + "\n");
  for (const auto& f : plot_files(r, prefix, precision)) emit(f.name, f.content);
  return written;
}

/// JSON document printed by the single-point command.
inline json point_to_json(const PointEvaluation& e, const Couplings& c) {
  json j{{"stable", e.verdict.stable},
         {"stability", to_string(e.verdict.classification)},
         {"margin", e.verdict.margin},
         {"eigen_real_parts", e.verdict.eigen_real_parts},
         {"G_minus", c.G_minus},
         {"G_plus", c.G_plus}};
  if (e.squeezing) j.update(squeezing_to_json(*e.squeezing));
  if (e.covariance && e.covariance->conditioning_warning()) j["conditioning_warning"] = true;
  return j;
}

}  // namespace qwsqueeze
