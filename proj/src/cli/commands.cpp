#include "cli/commands.hpp"

#include <cstdio>
#include <sstream>

#include "cli/experiment.hpp"

namespace ebr::cli {

namespace {

using nlohmann::ordered_json;

std::string fmt(double value, const char* spec = "%.12g") {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), spec, value);
  return buffer;
}

ordered_json vector_to_json(const RealVector<double>& v) {
  ordered_json arr = ordered_json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

ordered_json header(const char* command, const ExperimentConfig& config,
                    ordered_json extra_config) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = command;
  doc["seed"] = config.seed;
  doc["rng_algorithm"] = RngStream::algorithm();
  ordered_json echo = config_echo(config);
  for (auto& [key, value] : extra_config.items()) echo[key] = value;
  doc["config"] = echo;
  return doc;
}

std::string dump_line(const ordered_json& doc) { return doc.dump() + "\n"; }

ordered_json frame_to_json(const Frame<double>& frame, Index outcome) {
  ordered_json line;
  line["stage"] = std::string(to_string(frame.stage));
  line["t"] = frame.t;
  line["particle"] = vector_to_json(frame.particle);
  line["embedding"] =
      frame.embedding ? vector_to_json(*frame.embedding) : ordered_json(nullptr);
  line["break_point"] =
      frame.break_bary ? vector_to_json(*frame.break_bary) : ordered_json(nullptr);
  line["outcome"] = (frame.stage == Stage::kPlunge) ? ordered_json(nullptr)
                                                    : ordered_json(outcome);
  return line;
}

}  // namespace

CommandResult cmd_born(const ExperimentConfig& config) {
  const ResolvedExperiment exp = resolve_experiment(config);

  const RealVector<double> born =
      born_probabilities(*exp.initial_state, exp.observable);
  const OnMembranePoint<double> pt = plunge(exp.initial, exp.membrane);
  const RealVector<double> ratios =
      subregion_measures(pt, exp.membrane) / total_measure(exp.membrane);

  double max_diff = 0.0;
  for (Index k = 0; k < born.size(); ++k) {
    max_diff = std::max(max_diff, std::abs(pt.barycentric[k] - born[k]));
    max_diff = std::max(max_diff, std::abs(ratios[k] - born[k]));
  }
  const bool pass = max_diff <= 1e-8;

  CommandResult result;
  result.exit_code = pass ? kExitOk : kExitIdentityFail;

  if (config.format == OutputFormat::kJson) {
    ordered_json doc = header("born", config, {});
    doc["results"] = {{"outcome_values", vector_to_json(exp.observable.eigenvalues())},
                      {"born_trace", vector_to_json(born)},
                      {"barycentric", vector_to_json(pt.barycentric)},
                      {"measure_ratio", vector_to_json(ratios)},
                      {"max_abs_difference", max_diff},
                      {"pass", pass}};
    result.output = dump_line(doc);
    return result;
  }

  std::ostringstream out;
  out << "Exact outcome probabilities (dim " << config.dim << ", seed "
      << config.seed << ")\n";
  out << "outcome      value      born(trace)      barycentric    measure-ratio\n";
  for (Index k = 0; k < born.size(); ++k) {
    char line[160];
    std::snprintf(line, sizeof(line), "%7lld %10.4g %16.12f %16.12f %16.12f\n",
                  static_cast<long long>(k + 1), exp.observable.eigenvalues()[k],
                  born[k], pt.barycentric[k], ratios[k]);
    out << line;
  }
  out << "max |difference| = " << fmt(max_diff, "%.3e") << "  ["
      << (pass ? "PASS" : "FAIL") << " tolerance 1e-8]\n";
  result.output = out.str();
  return result;
}

CommandResult cmd_measure(const ExperimentConfig& config) {
  const ResolvedExperiment exp = resolve_experiment(config);

  const EnsembleStats<double> stats =
      run_ensemble(exp.initial, exp.membrane, exp.observable, exp.density,
                   config.runs, RngStream(config.seed, kEnsembleStream),
                   config.workers);
  const bool pass = stats.within(4.0);

  CommandResult result;
  result.exit_code = pass ? kExitOk : kExitStatisticalFail;

  if (config.format == OutputFormat::kJson) {
    ordered_json doc = header("measure", config, {{"runs", config.runs}});
    ordered_json counts = ordered_json::array();
    for (auto c : stats.counts) counts.push_back(c);
    doc["results"] = {{"n_runs", stats.n_runs},
                      {"outcome_values", vector_to_json(exp.observable.eigenvalues())},
                      {"counts", counts},
                      {"frequencies", vector_to_json(stats.frequencies)},
                      {"born", vector_to_json(stats.born)},
                      {"std_errors", vector_to_json(stats.std_errors)},
                      {"max_abs_deviation", stats.max_abs_deviation},
                      {"pass_4se", pass}};
    result.output = dump_line(doc);
    return result;
  }

  std::ostringstream out;
  out << "Measurement ensemble: " << stats.n_runs << " runs (dim " << config.dim
      << ", seed " << config.seed << ")\n";
  out << "outcome      value        count        frequency             born"
         "        std-error\n";
  for (Index k = 0; k < stats.born.size(); ++k) {
    char line[200];
    std::snprintf(line, sizeof(line),
                  "%7lld %10.4g %12lld %16.12f %16.12f %16.12f\n",
                  static_cast<long long>(k + 1), exp.observable.eigenvalues()[k],
                  static_cast<long long>(stats.counts[std::size_t(k)]),
                  stats.frequencies[k], stats.born[k], stats.std_errors[k]);
    out << line;
  }
  out << "max |frequency - born| = " << fmt(stats.max_abs_deviation, "%.3e")
      << "  [" << (pass ? "PASS" : "FAIL") << " at 4 standard errors]\n";
  result.output = out.str();
  return result;
}

CommandResult cmd_trajectory(const ExperimentConfig& config) {
  const ResolvedExperiment exp = resolve_experiment(config);

  // animate run 0 of the ensemble stream for this seed
  const MeasurementRecord<double> record = run_measurement(
      exp.initial, exp.membrane, exp.observable, exp.density,
      RngStream(config.seed, kEnsembleStream).substream(0));
  const auto frames =
      make_trajectory(record, exp.membrane, Index(config.frames_per_stage));

  std::ostringstream out;
  out << dump_line(header("trajectory", config,
                          {{"frames_per_stage", config.frames_per_stage}}));
  for (const auto& frame : frames)
    out << dump_line(frame_to_json(frame, record.outcome_index));

  return CommandResult{kExitOk, out.str()};
}

CommandResult cmd_universal_average(const ExperimentConfig& config) {
  const ResolvedExperiment exp = resolve_experiment(config);

  std::vector<std::int64_t> checkpoints;
  for (std::int64_t c = 10; c < config.densities; c *= 10)
    checkpoints.push_back(c);

  const UniversalAverageResult avg = universal_average(
      exp.initial, exp.membrane, exp.observable, config.densities,
      config.runs_per_density, config.depth,
      RngStream(config.seed, kDensityStream), checkpoints);
  const RealVector<double> born =
      born_probabilities(*exp.initial_state, exp.observable);

  auto max_dev = [&born](const RealVector<double>& avg_probs) {
    return (avg_probs - born).cwiseAbs().maxCoeff();
  };

  CommandResult result;
  if (config.format == OutputFormat::kJson) {
    ordered_json doc = header("universal-average", config,
                              {{"densities", config.densities},
                               {"depth", config.depth},
                               {"runs_per_density", config.runs_per_density}});
    ordered_json rows = ordered_json::array();
    for (const auto& [count, probs] : avg.checkpoints)
      rows.push_back({{"densities", count},
                      {"averaged", vector_to_json(probs)},
                      {"max_abs_deviation", max_dev(probs)}});
    doc["results"] = {{"born", vector_to_json(born)},
                      {"rows", rows},
                      {"final_max_abs_deviation", max_dev(avg.averaged)}};
    result.output = dump_line(doc);
    return result;
  }

  std::ostringstream out;
  out << "Universal average over random densities (dim " << config.dim
      << ", depth " << config.depth << ", seed " << config.seed << ")\n";
  out << "      born:";
  for (Index k = 0; k < born.size(); ++k) out << " " << fmt(born[k], "%.9f");
  out << "\n densities   averaged probabilities ...   max |dev|\n";
  for (const auto& [count, probs] : avg.checkpoints) {
    char head[32];
    std::snprintf(head, sizeof(head), "%10lld  ", static_cast<long long>(count));
    out << head;
    for (Index k = 0; k < probs.size(); ++k) out << " " << fmt(probs[k], "%.9f");
    out << "   " << fmt(max_dev(probs), "%.3e") << "\n";
  }
  result.output = out.str();
  return result;
}

CommandResult cmd_sphere_info(const ExperimentConfig& config) {
  const ResolvedExperiment exp = resolve_experiment(config, false);

  const double norm = exp.initial.norm();
  const double min_eig = min_state_eigenvalue(exp.initial, exp.basis);
  const bool bona_fide = min_eig >= -kEigenTol && norm <= 1.0 + kEigenTol;

  std::int64_t hits = 0;
  if (config.scan > 0) {
    RngStream scan_rng(config.seed, kScanStream);
    for (std::int64_t i = 0; i < config.scan; ++i)
      if (is_bona_fide(random_ball_vector(exp.basis.count(), scan_rng), exp.basis))
        ++hits;
  }

  CommandResult result;
  if (config.format == OutputFormat::kJson) {
    ordered_json doc = header("sphere-info", config, {{"scan", config.scan}});
    doc["results"] = {{"norm", norm},
                      {"min_eigenvalue", min_eig},
                      {"bona_fide", bona_fide}};
    if (config.scan > 0)
      doc["results"]["scan"] = {
          {"samples", config.scan},
          {"bona_fide_count", hits},
          {"bona_fide_fraction", double(hits) / double(config.scan)}};
    else
      doc["results"]["scan"] = nullptr;
    result.output = dump_line(doc);
    return result;
  }

  std::ostringstream out;
  out << "Bloch point diagnosis (dim " << config.dim << ")\n";
  out << "  norm            = " << fmt(norm) << "\n";
  out << "  min eigenvalue  = " << fmt(min_eig) << "\n";
  out << "  bona fide state = " << (bona_fide ? "yes" : "no") << "\n";
  if (config.scan > 0) {
    out << "Unit-ball scan: " << hits << " / " << config.scan
        << " bona fide (fraction " << fmt(double(hits) / double(config.scan), "%.6f")
        << ")\n";
  }
  result.output = out.str();
  return result;
}

}  // namespace ebr::cli
