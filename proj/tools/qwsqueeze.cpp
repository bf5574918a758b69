// qwsqueeze: steady-state mechanical squeezing of the two-well hybrid
// optomechanical cavity.
//
//   qwsqueeze point --config run.json
//   qwsqueeze sweep --config run.json --out results/ --threads 0
//   qwsqueeze sweep --figure fig2a --out results/
//
// Exit codes: 0 success, 1 configuration or I/O error, 2 the requested point
// has no steady state (marginal or unstable drift).

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "qwsqueeze/qwsqueeze.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUnstable = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qwsqueeze::IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

qwsqueeze::RunConfig load_config(const std::string& path) {
  try {
    return qwsqueeze::parse_config(read_file(path));
  } catch (const qwsqueeze::ConfigError& e) {
    throw qwsqueeze::ConfigError(path + ": " + e.what());
  }
}

struct PointArgs {
  std::string config;
};

struct SweepArgs {
  std::string config;
  std::string figure;
  std::string out;
  std::string format;
  int threads = -1;
  double exciton_coupling = 2.0;
  std::size_t ratio_points = 0;
  std::size_t kappa_points = 0;
};

int run_point(const PointArgs& args) {
  const qwsqueeze::RunConfig cfg = load_config(args.config);
  if (cfg.sweep) throw qwsqueeze::ConfigError(args.config + ": point expects a configuration without \"sweep\"");
  const qwsqueeze::Couplings c = qwsqueeze::resolve_couplings(cfg.system, cfg.drive);
  const auto eval = qwsqueeze::evaluate_point(cfg.system, c);
  std::cout << qwsqueeze::point_to_json(eval, c).dump(2) << std::endl;
  return eval.verdict.stable ? kExitOk : kExitUnstable;
}

int run_sweep(const SweepArgs& args) {
  qwsqueeze::RunConfig cfg;
  if (!args.figure.empty()) {
    const auto fig = qwsqueeze::parse_figure_id(args.figure);
    if (!fig) throw qwsqueeze::ConfigError("unknown figure \"" + args.figure + "\" (fig2a..fig2c, fig3a..fig3c)");
    qwsqueeze::FigureOptions fo;
    fo.exciton_coupling = args.exciton_coupling;
    if (args.ratio_points) fo.ratio_points = args.ratio_points;
    if (args.kappa_points) fo.kappa_points = args.kappa_points;
    cfg = qwsqueeze::figure_config(*fig, fo);
    if (!args.config.empty()) {
      // Output and thread settings still come from the file when both are given.
      const auto file_cfg = load_config(args.config);
      cfg.output = file_cfg.output;
      cfg.output.prefix = args.figure;
      cfg.threads = file_cfg.threads;
    }
  } else {
    if (args.config.empty()) throw qwsqueeze::ConfigError("sweep needs --config or --figure");
    cfg = load_config(args.config);
    if (!cfg.sweep) throw qwsqueeze::ConfigError(args.config + ": sweep expects a \"sweep\" section");
  }
  if (!args.out.empty()) cfg.output.dir = args.out;
  if (args.threads >= 0) cfg.threads = static_cast<unsigned>(args.threads);
  if (!args.format.empty()) cfg.output.format = *qwsqueeze::parse_output_format(args.format);

  qwsqueeze::SweepOptions opt;
  opt.threads = cfg.threads;
  const auto result = qwsqueeze::run_sweep(cfg.sweep_spec(), opt);
  if (result.all_unstable) std::cerr << "warning: no grid point is strictly stable\n";
  for (const auto& path : qwsqueeze::write_sweep_outputs(cfg, result)) std::cout << path.string() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady-state mechanical squeezing in a two-well hybrid optomechanical cavity"};
  app.require_subcommand(1);

  PointArgs point;
  auto* point_cmd = app.add_subcommand("point", "Evaluate a single parameter point and print JSON");
  point_cmd->add_option("--config", point.config, "JSON configuration file")->required();

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a 1D or 2D parameter sweep and write result files");
  sweep_cmd->add_option("--config", sweep.config, "JSON configuration file");
  sweep_cmd->add_option("--figure", sweep.figure, "Figure preset: fig2a|fig2b|fig2c|fig3a|fig3b|fig3c");
  sweep_cmd->add_option("--out", sweep.out, "Output directory (overrides the configuration)");
  sweep_cmd->add_option("--threads", sweep.threads, "Worker threads, 0 = auto")->check(CLI::NonNegativeNumber);
  sweep_cmd->add_option("--format", sweep.format, "Result format")->check(CLI::IsMember({"csv", "json", "both"}));
  sweep_cmd->add_option("--exciton-coupling", sweep.exciton_coupling,
                        "Exciton coupling g1 = g2 used by figure presets (2 or the alternative reading 1)")
      ->check(CLI::NonNegativeNumber);
  sweep_cmd->add_option("--ratio-points", sweep.ratio_points, "Ratio grid size for figure presets")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--kappa-points", sweep.kappa_points, "Kappa grid size for heatmap presets")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitError;
  }

  try {
    if (*point_cmd) return run_point(point);
    return run_sweep(sweep);
  } catch (const qwsqueeze::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
}
