#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace ebr::cli {

/// Configuration problem tied to a specific field; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct BlochAngleState {
  double theta = 0.0;
};
struct RandomPureState {};
struct ExplicitBlochState {
  std::vector<double> coords;
};
struct ExplicitMatrixState {
  std::vector<std::pair<double, double>> entries;  // row-major (re, im)
};
using StateSpec = std::variant<BlochAngleState, RandomPureState,
                               ExplicitBlochState, ExplicitMatrixState>;

struct SpinZObservable {};
struct SpinXObservable {};
struct ExplicitMatrixObservable {
  std::vector<std::pair<double, double>> entries;  // row-major (re, im)
};
using ObservableSpec =
    std::variant<SpinZObservable, SpinXObservable, ExplicitMatrixObservable>;

struct UniformDensity {};
struct PiecewiseRandomDensity {
  int depth = 6;
  std::uint64_t weight_seed = 1;
};
struct PiecewiseExplicitDensity {
  int depth = 1;
  std::vector<double> weights;
};
using DensitySpec =
    std::variant<UniformDensity, PiecewiseRandomDensity, PiecewiseExplicitDensity>;

enum class OutputFormat { kTable, kJson };

struct ExperimentConfig {
  int dim = 2;
  StateSpec state = BlochAngleState{0.0};
  ObservableSpec observable = SpinZObservable{};
  DensitySpec density = UniformDensity{};
  std::int64_t runs = 10000;
  std::uint64_t seed = 1;
  int workers = 1;
  OutputFormat format = OutputFormat::kTable;

  // trajectory
  std::int64_t frames_per_stage = 30;
  // universal-average
  std::int64_t densities = 100;
  int depth = 6;
  std::int64_t runs_per_density = 500;
  // sphere-info
  std::int64_t scan = 0;
};

/// Parse the textual spec forms used on the command line:
///   state:      "bloch-angle:<theta>" | "random-pure" | "bloch:[...]"
///               | "matrix:[[re,im],...]"
///   observable: "spin-z" | "spin-x" | "matrix:[[re,im],...]"
///   density:    "uniform" | "piecewise-random:<depth>:<seed>"
///               | "piecewise:<depth>:[w...]"
StateSpec parse_state_spec(const std::string& text);
ObservableSpec parse_observable_spec(const std::string& text);
DensitySpec parse_density_spec(const std::string& text);

/// Merge a JSON configuration document (mirror of ExperimentConfig) into
/// the given config.  Unknown keys are rejected.
void apply_config_json(const nlohmann::json& doc, ExperimentConfig& config);

/// Load and merge a config file.
void apply_config_file(const std::string& path, ExperimentConfig& config);

/// Structural validation that does not require building the experiment.
void validate_config(const ExperimentConfig& config);

/// Canonical echo of the experiment-defining fields (excludes execution
/// details such as worker count or output format, so identical experiments
/// serialize identically).
nlohmann::ordered_json config_echo(const ExperimentConfig& config);

}  // namespace ebr::cli
