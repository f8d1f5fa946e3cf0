#pragma once

#include <string>

#include "cli/config.hpp"

namespace ebr::cli {

// Exit codes shared with CI consumers.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitStatisticalFail = 3;
inline constexpr int kExitIdentityFail = 4;

inline constexpr const char* kSchemaVersion = "1";

struct CommandResult {
  int exit_code = kExitOk;
  std::string output;
};

/// Exact probabilities three ways: Born trace formula, plunge barycentric
/// coordinates, subregion measure ratios.  Fails (exit 4) if they disagree
/// beyond 1e-8.
CommandResult cmd_born(const ExperimentConfig& config);

/// Seeded Monte Carlo ensemble; PASS/FAIL at four standard errors
/// (exit 3 on FAIL).
CommandResult cmd_measure(const ExperimentConfig& config);

/// JSON-lines frame stream of one seeded measurement animation.
CommandResult cmd_trajectory(const ExperimentConfig& config);

/// Average outcome probabilities over random non-uniform densities, with a
/// convergence table against the Born values.
CommandResult cmd_universal_average(const ExperimentConfig& config);

/// Norm / bona fide diagnosis of a Bloch point, with an optional random
/// scan of the unit ball.
CommandResult cmd_sphere_info(const ExperimentConfig& config);

}  // namespace ebr::cli
