#include "cli/experiment.hpp"

#include <cmath>

namespace ebr::cli {

namespace {

ComplexMatrix<double> entries_to_matrix(
    const std::vector<std::pair<double, double>>& entries, int dim) {
  ComplexMatrix<double> m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      const auto& [re, im] = entries[std::size_t(r * dim + c)];
      m(r, c) = std::complex<double>(re, im);
    }
  return m;
}

/// Unit Bloch vector at angle theta from the first membrane vertex, rotated
/// toward a fixed reference direction orthogonal to it.
BlochVector<double> state_at_angle(const MembraneSimplex<double>& membrane,
                                   double theta) {
  const BlochVector<double> v1 = membrane.vertex(0);
  BlochVector<double> ref = BlochVector<double>::Zero(v1.size());
  for (Index i = 0; i < v1.size(); ++i) {
    ref.setZero();
    ref[i] = 1.0;
    ref -= ref.dot(v1) * v1;
    if (ref.norm() > 0.5) break;
  }
  ref.normalize();
  return std::cos(theta) * v1 + std::sin(theta) * ref;
}

}  // namespace

Observable<double> make_observable(const ObservableSpec& spec, int dim) {
  if (std::holds_alternative<SpinZObservable>(spec)) {
    RealVector<double> values(dim);
    if (dim == 2)
      values << 0.5, -0.5;
    else
      values << 1.0, 0.0, -1.0;
    return Observable<double>::diagonal(values);
  }
  if (std::holds_alternative<SpinXObservable>(spec)) {
    ComplexMatrix<double> m = ComplexMatrix<double>::Zero(dim, dim);
    if (dim == 2) {
      m(0, 1) = 0.5;
      m(1, 0) = 0.5;
    } else {
      const double h = 1.0 / std::sqrt(2.0);
      m(0, 1) = h;
      m(1, 0) = h;
      m(1, 2) = h;
      m(2, 1) = h;
    }
    return Observable<double>::from_matrix(m);
  }
  const auto& mat = std::get<ExplicitMatrixObservable>(spec);
  try {
    return Observable<double>::from_matrix(entries_to_matrix(mat.entries, dim));
  } catch (const std::invalid_argument& err) {
    throw ConfigError("observable", err.what());
  }
}

ResolvedExperiment resolve_experiment(const ExperimentConfig& config,
                                      bool require_state) {
  validate_config(config);

  ResolvedExperiment exp;
  exp.config = config;
  exp.basis = build_generators<double>(config.dim);
  exp.observable = make_observable(config.observable, config.dim);

  try {
    exp.membrane = build_membrane(exp.observable, exp.basis);
  } catch (const std::invalid_argument& err) {
    throw ConfigError("observable", err.what());
  }

  if (const auto* angle = std::get_if<BlochAngleState>(&config.state)) {
    exp.initial = state_at_angle(exp.membrane, angle->theta);
  } else if (std::holds_alternative<RandomPureState>(config.state)) {
    RngStream state_rng(config.seed, kStateStream);
    exp.initial_state = random_pure_state<double>(config.dim, state_rng);
    exp.initial = state_to_bloch(*exp.initial_state, exp.basis);
  } else if (const auto* bloch = std::get_if<ExplicitBlochState>(&config.state)) {
    exp.initial = Eigen::Map<const RealVector<double>>(
        bloch->coords.data(), Index(bloch->coords.size()));
  } else {
    const auto& mat = std::get<ExplicitMatrixState>(config.state);
    try {
      exp.initial_state = DensityMatrix<double>::from_matrix(
          entries_to_matrix(mat.entries, config.dim));
    } catch (const std::invalid_argument& err) {
      throw ConfigError("state", err.what());
    }
    exp.initial = state_to_bloch(*exp.initial_state, exp.basis);
  }

  if (!exp.initial_state) {
    // explicit Bloch coordinates or an angle preset: reconstruct if possible
    const ComplexMatrix<double> candidate = bloch_to_state(exp.initial, exp.basis);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix<double>> es(candidate,
                                                            Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() >= -kEigenTol &&
        exp.initial.norm() <= 1.0 + kEigenTol) {
      const ComplexMatrix<double> sym = (candidate + candidate.adjoint()) / 2.0;
      exp.initial_state = DensityMatrix<double>::from_matrix(sym);
    } else if (require_state) {
      throw ConfigError("state",
                        "Bloch coordinates do not describe a bona fide state "
                        "(norm " + std::to_string(exp.initial.norm()) +
                            ", min eigenvalue " +
                            std::to_string(es.eigenvalues().minCoeff()) + ")");
    }
  }

  if (const auto* d = std::get_if<PiecewiseRandomDensity>(&config.density)) {
    try {
      exp.density = MembraneDensity::piecewise_random(
          config.dim, d->depth, RngStream(d->weight_seed, kDensityStream));
    } catch (const std::invalid_argument& err) {
      throw ConfigError("density", err.what());
    }
  } else if (const auto* d =
                 std::get_if<PiecewiseExplicitDensity>(&config.density)) {
    try {
      exp.density = MembraneDensity::piecewise(
          config.dim, d->depth,
          Eigen::Map<const RealVector<double>>(d->weights.data(),
                                               Index(d->weights.size())));
    } catch (const std::invalid_argument& err) {
      throw ConfigError("density", err.what());
    }
  }

  return exp;
}

}  // namespace ebr::cli
