// ebrsim: simulate quantum measurements as plunge-and-break processes on
// the generalized Bloch sphere.

#include <fstream>
#include <functional>
#include <iostream>

#include <CLI11.hpp>

#include "cli/commands.hpp"

namespace {

using ebr::cli::CommandResult;
using ebr::cli::ExperimentConfig;

struct CommonOptions {
  std::string config_file;
  std::string state;
  std::string observable;
  std::string density;
  std::string format;
  std::string out_file;
  double theta = -1.0;
  bool theta_set = false;
};

void add_common_flags(CLI::App* cmd, ExperimentConfig& config,
                      CommonOptions& opts) {
  cmd->add_option("--config", opts.config_file,
                  "JSON config file mirroring the experiment settings");
  cmd->add_option("--dim", config.dim, "Hilbert space dimension N (>= 2)");
  cmd->add_option("--state", opts.state,
                  "initial state: bloch-angle:<theta> | random-pure | "
                  "bloch:[...] | matrix:[[re,im],...]");
  cmd->add_option("--observable", opts.observable,
                  "observable: spin-z | spin-x | matrix:[[re,im],...]");
  cmd->add_option("--theta", opts.theta,
                  "shorthand for --state bloch-angle:<theta> (dim 2)")
      ->check(CLI::Range(0.0, 3.14159265358979323846));
  cmd->add_option("--density", opts.density,
                  "breaking density: uniform | piecewise-random:<depth>:<seed> "
                  "| piecewise:<depth>:[weights]");
  cmd->add_option("--runs", config.runs, "number of measurement runs");
  cmd->add_option("--seed", config.seed, "base seed (no environment override)");
  cmd->add_option("--workers", config.workers,
                  "worker threads (never affects results)");
  cmd->add_option("--format", opts.format, "output format: table | json")
      ->check(CLI::IsMember({"table", "json"}));
  cmd->add_option("--out", opts.out_file, "write the report to a file");
}

bool flag_given(const CLI::App& cmd, const std::string& name) {
  const CLI::Option* opt = cmd.get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

/// Flags override config-file values, which override defaults.  CLI11 has
/// already written flag values into `flags`; rebuild the result from
/// defaults, layer the file on top, then re-apply whatever was explicitly
/// passed on the command line.
ExperimentConfig finalize_config(const CLI::App& cmd,
                                 const ExperimentConfig& flags,
                                 const CommonOptions& opts) {
  ExperimentConfig config;
  if (!opts.config_file.empty())
    ebr::cli::apply_config_file(opts.config_file, config);

  if (flag_given(cmd, "--dim")) config.dim = flags.dim;
  if (flag_given(cmd, "--runs")) config.runs = flags.runs;
  if (flag_given(cmd, "--seed")) config.seed = flags.seed;
  if (flag_given(cmd, "--workers")) config.workers = flags.workers;
  if (flag_given(cmd, "--frames-per-stage"))
    config.frames_per_stage = flags.frames_per_stage;
  if (flag_given(cmd, "--densities")) config.densities = flags.densities;
  if (flag_given(cmd, "--depth")) config.depth = flags.depth;
  if (flag_given(cmd, "--runs-per-density"))
    config.runs_per_density = flags.runs_per_density;
  if (flag_given(cmd, "--scan")) config.scan = flags.scan;

  if (flag_given(cmd, "--state"))
    config.state = ebr::cli::parse_state_spec(opts.state);
  if (flag_given(cmd, "--theta")) {
    if (flag_given(cmd, "--state"))
      throw ebr::cli::ConfigError("theta", "--theta conflicts with --state");
    config.state = ebr::cli::BlochAngleState{opts.theta};
  }
  if (flag_given(cmd, "--observable"))
    config.observable = ebr::cli::parse_observable_spec(opts.observable);
  if (flag_given(cmd, "--density"))
    config.density = ebr::cli::parse_density_spec(opts.density);
  if (flag_given(cmd, "--format"))
    config.format = (opts.format == "json") ? ebr::cli::OutputFormat::kJson
                                            : ebr::cli::OutputFormat::kTable;
  return config;
}

int emit(const CommandResult& result, const std::string& out_file) {
  if (out_file.empty()) {
    std::cout << result.output;
  } else {
    std::ofstream out(out_file, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write '" << out_file << "'\n";
      return ebr::cli::kExitConfigError;
    }
    out << result.output;
  }
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Generalized Bloch-sphere measurement simulator: states plunge onto an "
      "elastic outcome membrane whose random breaking reproduces the Born "
      "rule"};
  app.require_subcommand(1);

  struct SubcommandState {
    ExperimentConfig config;
    CommonOptions opts;
    CLI::App* cmd = nullptr;
    std::function<CommandResult(const ExperimentConfig&)> run;
  };
  std::vector<SubcommandState> subs(5);

  subs[0].cmd = app.add_subcommand(
      "born", "exact probabilities: trace formula vs membrane geometry");
  subs[0].run = ebr::cli::cmd_born;

  subs[1].cmd = app.add_subcommand(
      "measure", "Monte Carlo ensemble of membrane-breaking measurements");
  subs[1].run = ebr::cli::cmd_measure;

  subs[2].cmd = app.add_subcommand(
      "trajectory", "JSON-lines animation frames of one measurement");
  subs[2].run = ebr::cli::cmd_trajectory;
  subs[2].cmd->add_option("--frames-per-stage", subs[2].config.frames_per_stage,
                          "frames per stage (>= 2)");

  subs[3].cmd = app.add_subcommand(
      "universal-average",
      "average outcome statistics over random non-uniform densities");
  subs[3].run = ebr::cli::cmd_universal_average;
  subs[3].cmd->add_option("--densities", subs[3].config.densities,
                          "number of random densities");
  subs[3].cmd->add_option("--depth", subs[3].config.depth,
                          "piecewise grid depth");
  subs[3].cmd->add_option("--runs-per-density", subs[3].config.runs_per_density,
                          "Monte Carlo runs per density (dim >= 3)");

  subs[4].cmd = app.add_subcommand(
      "sphere-info", "norm / bona fide diagnosis of a Bloch point");
  subs[4].run = ebr::cli::cmd_sphere_info;
  subs[4].cmd->add_option("--scan", subs[4].config.scan,
                          "sample this many random unit-ball points");

  for (auto& sub : subs) add_common_flags(sub.cmd, sub.config, sub.opts);

  CLI11_PARSE(app, argc, argv);

  for (auto& sub : subs) {
    if (!sub.cmd->parsed()) continue;
    try {
      const ExperimentConfig config =
          finalize_config(*sub.cmd, sub.config, sub.opts);
      return emit(sub.run(config), sub.opts.out_file);
    } catch (const ebr::cli::ConfigError& err) {
      std::cerr << "config error: " << err.what() << "\n";
      return ebr::cli::kExitConfigError;
    } catch (const std::exception& err) {
      std::cerr << "error: " << err.what() << "\n";
      return 1;
    }
  }
  return ebr::cli::kExitConfigError;
}
