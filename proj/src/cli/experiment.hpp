#pragma once

#include <optional>

#include "cli/config.hpp"
#include "ebr/ebr.hpp"

namespace ebr::cli {

// Stream ids carved out of each seed; keeping them fixed makes every command
// a pure function of (seed, config).
inline constexpr std::uint64_t kStateStream = 1;
inline constexpr std::uint64_t kEnsembleStream = 2;
inline constexpr std::uint64_t kScanStream = 3;
inline constexpr std::uint64_t kDensityStream = 4;

/// A fully built experiment: every spec resolved against the library types
/// and validated.  Construction throws ConfigError before any computation
/// if something is inconsistent.
struct ResolvedExperiment {
  ExperimentConfig config;
  GeneratorBasis<double> basis;
  Observable<double> observable;
  MembraneSimplex<double> membrane;
  BlochVector<double> initial;
  std::optional<DensityMatrix<double>> initial_state;  // absent only when the
                                                       // Bloch point is not a
                                                       // bona fide state
  MembraneDensity density = MembraneDensity::uniform();
};

/// Build observable presets (ħ = 1): spin-z / spin-x with eigenvalues
/// (1/2, -1/2) for dim 2 and (1, 0, -1) for dim 3.
Observable<double> make_observable(const ObservableSpec& spec, int dim);

/// Resolve the full experiment.  When require_state is true (born, measure,
/// trajectory), the initial Bloch point must be a bona fide state;
/// sphere-info passes false and inspects whatever point it is given.
ResolvedExperiment resolve_experiment(const ExperimentConfig& config,
                                      bool require_state = true);

}  // namespace ebr::cli
