#include "cli/config.hpp"

#include <cmath>
#include <fstream>

namespace ebr::cli {

namespace {

using nlohmann::json;

double parse_double(const std::string& field, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(field, "expected a number, got '" + text + "'");
  }
}

std::uint64_t parse_u64(const std::string& field, const std::string& text) {
  try {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(field, "expected a nonnegative integer, got '" + text + "'");
  }
}

json parse_json_tail(const std::string& field, const std::string& text) {
  json parsed = json::parse(text, nullptr, false);
  if (parsed.is_discarded())
    throw ConfigError(field, "malformed JSON payload '" + text + "'");
  return parsed;
}

std::vector<std::pair<double, double>> parse_complex_entries(
    const std::string& field, const json& array) {
  if (!array.is_array())
    throw ConfigError(field, "expected a row-major array of [re, im] pairs");
  std::vector<std::pair<double, double>> entries;
  entries.reserve(array.size());
  for (const auto& item : array) {
    if (item.is_number()) {
      entries.emplace_back(item.get<double>(), 0.0);
    } else if (item.is_array() && item.size() == 2 && item[0].is_number() &&
               item[1].is_number()) {
      entries.emplace_back(item[0].get<double>(), item[1].get<double>());
    } else {
      throw ConfigError(field, "matrix entries must be numbers or [re, im] pairs");
    }
  }
  return entries;
}

std::vector<double> parse_real_array(const std::string& field, const json& array) {
  if (!array.is_array())
    throw ConfigError(field, "expected an array of numbers");
  std::vector<double> values;
  values.reserve(array.size());
  for (const auto& item : array) {
    if (!item.is_number())
      throw ConfigError(field, "expected an array of numbers");
    values.push_back(item.get<double>());
  }
  return values;
}

json complex_entries_to_json(const std::vector<std::pair<double, double>>& entries) {
  json rows = json::array();
  for (const auto& [re, im] : entries) rows.push_back(json::array({re, im}));
  return rows;
}

}  // namespace

StateSpec parse_state_spec(const std::string& text) {
  if (text == "random-pure") return RandomPureState{};
  if (text.rfind("bloch-angle:", 0) == 0)
    return BlochAngleState{parse_double("state", text.substr(12))};
  if (text.rfind("bloch:", 0) == 0)
    return ExplicitBlochState{
        parse_real_array("state", parse_json_tail("state", text.substr(6)))};
  if (text.rfind("matrix:", 0) == 0)
    return ExplicitMatrixState{parse_complex_entries(
        "state", parse_json_tail("state", text.substr(7)))};
  throw ConfigError("state",
                    "unknown spec '" + text +
                        "' (expected bloch-angle:<theta>, random-pure, "
                        "bloch:[...], or matrix:[...])");
}

ObservableSpec parse_observable_spec(const std::string& text) {
  if (text == "spin-z") return SpinZObservable{};
  if (text == "spin-x") return SpinXObservable{};
  if (text.rfind("matrix:", 0) == 0)
    return ExplicitMatrixObservable{parse_complex_entries(
        "observable", parse_json_tail("observable", text.substr(7)))};
  throw ConfigError("observable",
                    "unknown spec '" + text +
                        "' (expected spin-z, spin-x, or matrix:[...])");
}

DensitySpec parse_density_spec(const std::string& text) {
  if (text == "uniform") return UniformDensity{};
  if (text.rfind("piecewise-random:", 0) == 0) {
    const std::string tail = text.substr(17);
    const auto colon = tail.find(':');
    if (colon == std::string::npos)
      throw ConfigError("density", "expected piecewise-random:<depth>:<seed>");
    PiecewiseRandomDensity d;
    d.depth = int(parse_u64("density", tail.substr(0, colon)));
    d.weight_seed = parse_u64("density", tail.substr(colon + 1));
    return d;
  }
  if (text.rfind("piecewise:", 0) == 0) {
    const std::string tail = text.substr(10);
    const auto colon = tail.find(':');
    if (colon == std::string::npos)
      throw ConfigError("density", "expected piecewise:<depth>:[w0,w1,...]");
    PiecewiseExplicitDensity d;
    d.depth = int(parse_u64("density", tail.substr(0, colon)));
    d.weights = parse_real_array(
        "density", parse_json_tail("density", tail.substr(colon + 1)));
    return d;
  }
  throw ConfigError("density",
                    "unknown spec '" + text +
                        "' (expected uniform, piecewise-random:<depth>:<seed>, "
                        "or piecewise:<depth>:[weights])");
}

void apply_config_json(const json& doc, ExperimentConfig& config) {
  if (!doc.is_object()) throw ConfigError("config", "expected a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "dim") {
      if (!value.is_number_integer())
        throw ConfigError("dim", "expected an integer");
      config.dim = value.get<int>();
    } else if (key == "state") {
      if (value.is_string()) {
        config.state = parse_state_spec(value.get<std::string>());
      } else if (value.is_object() && value.contains("bloch")) {
        config.state = ExplicitBlochState{parse_real_array("state", value["bloch"])};
      } else if (value.is_object() && value.contains("matrix")) {
        config.state =
            ExplicitMatrixState{parse_complex_entries("state", value["matrix"])};
      } else {
        throw ConfigError("state", "expected a spec string or {bloch|matrix: ...}");
      }
    } else if (key == "observable") {
      if (value.is_string()) {
        config.observable = parse_observable_spec(value.get<std::string>());
      } else if (value.is_object() && value.contains("matrix")) {
        config.observable = ExplicitMatrixObservable{
            parse_complex_entries("observable", value["matrix"])};
      } else {
        throw ConfigError("observable", "expected a spec string or {matrix: ...}");
      }
    } else if (key == "density") {
      if (value.is_string()) {
        config.density = parse_density_spec(value.get<std::string>());
      } else if (value.is_object() && value.contains("piecewise")) {
        const auto& p = value["piecewise"];
        if (!p.is_object() || !p.contains("depth"))
          throw ConfigError("density", "piecewise needs a depth");
        PiecewiseExplicitDensity d;
        d.depth = p["depth"].get<int>();
        if (p.contains("weights")) {
          d.weights = parse_real_array("density", p["weights"]);
          config.density = d;
        } else if (p.contains("seed")) {
          config.density = PiecewiseRandomDensity{
              d.depth, p["seed"].get<std::uint64_t>()};
        } else {
          throw ConfigError("density", "piecewise needs weights or a seed");
        }
      } else {
        throw ConfigError("density", "expected a spec string or {piecewise: ...}");
      }
    } else if (key == "runs") {
      if (!value.is_number_integer())
        throw ConfigError("runs", "expected an integer");
      config.runs = value.get<std::int64_t>();
    } else if (key == "seed") {
      if (!value.is_number_unsigned() && !value.is_number_integer())
        throw ConfigError("seed", "expected a nonnegative integer");
      config.seed = value.get<std::uint64_t>();
    } else if (key == "workers") {
      if (!value.is_number_integer())
        throw ConfigError("workers", "expected an integer");
      config.workers = value.get<int>();
    } else if (key == "format") {
      const std::string f = value.is_string() ? value.get<std::string>() : "";
      if (f == "table")
        config.format = OutputFormat::kTable;
      else if (f == "json")
        config.format = OutputFormat::kJson;
      else
        throw ConfigError("format", "expected 'json' or 'table'");
    } else if (key == "frames_per_stage") {
      config.frames_per_stage = value.get<std::int64_t>();
    } else if (key == "densities") {
      config.densities = value.get<std::int64_t>();
    } else if (key == "depth") {
      config.depth = value.get<int>();
    } else if (key == "runs_per_density") {
      config.runs_per_density = value.get<std::int64_t>();
    } else if (key == "scan") {
      config.scan = value.get<std::int64_t>();
    } else {
      throw ConfigError(key, "unknown configuration key");
    }
  }
}

void apply_config_file(const std::string& path, ExperimentConfig& config) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded())
    throw ConfigError("config", "'" + path + "' is not valid JSON");
  apply_config_json(doc, config);
}

void validate_config(const ExperimentConfig& config) {
  if (config.dim < 2) throw ConfigError("dim", "dimension must be at least 2");
  if (config.runs < 1) throw ConfigError("runs", "need at least one run");
  if (config.workers < 1 || config.workers > 256)
    throw ConfigError("workers", "worker count must be in [1, 256]");
  if (config.frames_per_stage < 2)
    throw ConfigError("frames_per_stage", "need at least two frames per stage");
  if (config.densities < 1)
    throw ConfigError("densities", "need at least one density");
  if (config.depth < 1 || config.depth > 20)
    throw ConfigError("depth", "depth must be in [1, 20]");
  if (config.runs_per_density < 1)
    throw ConfigError("runs_per_density", "need at least one run per density");
  if (config.scan < 0) throw ConfigError("scan", "scan count must be nonnegative");

  if (const auto* angle = std::get_if<BlochAngleState>(&config.state)) {
    if (config.dim != 2)
      throw ConfigError("state", "bloch-angle presets require dim 2");
    if (!(angle->theta >= 0.0) || angle->theta > std::acos(-1.0))
      throw ConfigError("state", "theta must lie in [0, pi]");
  }
  if (const auto* bloch = std::get_if<ExplicitBlochState>(&config.state)) {
    const std::size_t want = std::size_t(config.dim) * std::size_t(config.dim) - 1;
    if (bloch->coords.size() != want)
      throw ConfigError("state", "expected " + std::to_string(want) +
                                     " Bloch coordinates for dim " +
                                     std::to_string(config.dim));
  }
  if (const auto* mat = std::get_if<ExplicitMatrixState>(&config.state)) {
    const std::size_t want = std::size_t(config.dim) * std::size_t(config.dim);
    if (mat->entries.size() != want)
      throw ConfigError("state", "expected " + std::to_string(want) +
                                     " row-major entries for dim " +
                                     std::to_string(config.dim));
  }
  if (std::holds_alternative<SpinZObservable>(config.observable) ||
      std::holds_alternative<SpinXObservable>(config.observable)) {
    if (config.dim != 2 && config.dim != 3)
      throw ConfigError("observable", "spin presets support dim 2 and 3 only");
  }
  if (const auto* mat =
          std::get_if<ExplicitMatrixObservable>(&config.observable)) {
    const std::size_t want = std::size_t(config.dim) * std::size_t(config.dim);
    if (mat->entries.size() != want)
      throw ConfigError("observable", "expected " + std::to_string(want) +
                                          " row-major entries for dim " +
                                          std::to_string(config.dim));
  }
  if (const auto* d = std::get_if<PiecewiseRandomDensity>(&config.density)) {
    if (d->depth < 1 || d->depth > 20)
      throw ConfigError("density", "piecewise depth must be in [1, 20]");
  }
  if (const auto* d = std::get_if<PiecewiseExplicitDensity>(&config.density)) {
    if (d->depth < 1 || d->depth > 20)
      throw ConfigError("density", "piecewise depth must be in [1, 20]");
    for (double w : d->weights)
      if (w < 0.0) throw ConfigError("density", "weights must be nonnegative");
  }
}

nlohmann::ordered_json config_echo(const ExperimentConfig& config) {
  nlohmann::ordered_json echo;
  echo["dim"] = config.dim;

  if (const auto* angle = std::get_if<BlochAngleState>(&config.state)) {
    echo["state"] = nlohmann::ordered_json{{"bloch_angle", angle->theta}};
  } else if (std::holds_alternative<RandomPureState>(config.state)) {
    echo["state"] = "random-pure";
  } else if (const auto* bloch = std::get_if<ExplicitBlochState>(&config.state)) {
    echo["state"] = nlohmann::ordered_json{{"bloch", bloch->coords}};
  } else if (const auto* mat = std::get_if<ExplicitMatrixState>(&config.state)) {
    echo["state"] = nlohmann::ordered_json{{"matrix", complex_entries_to_json(mat->entries)}};
  }

  if (std::holds_alternative<SpinZObservable>(config.observable)) {
    echo["observable"] = "spin-z";
  } else if (std::holds_alternative<SpinXObservable>(config.observable)) {
    echo["observable"] = "spin-x";
  } else if (const auto* mat =
                 std::get_if<ExplicitMatrixObservable>(&config.observable)) {
    echo["observable"] =
        nlohmann::ordered_json{{"matrix", complex_entries_to_json(mat->entries)}};
  }

  if (std::holds_alternative<UniformDensity>(config.density)) {
    echo["density"] = "uniform";
  } else if (const auto* d = std::get_if<PiecewiseRandomDensity>(&config.density)) {
    echo["density"] = nlohmann::ordered_json{
        {"piecewise", {{"depth", d->depth}, {"seed", d->weight_seed}}}};
  } else if (const auto* d =
                 std::get_if<PiecewiseExplicitDensity>(&config.density)) {
    echo["density"] = nlohmann::ordered_json{
        {"piecewise", {{"depth", d->depth}, {"weights", d->weights}}}};
  }

  echo["seed"] = config.seed;
  return echo;
}

}  // namespace ebr::cli
