#pragma once

#include <cstdint>
#include <limits>
#include <thread>
#include <utility>
#include <vector>

#include "ebr/density.hpp"
#include "ebr/membrane.hpp"
#include "ebr/observable.hpp"
#include "ebr/rng.hpp"
#include "ebr/types.hpp"

namespace ebr {

/// Break point distributed uniformly (flat Dirichlet) over the membrane:
/// normalized exponential draws, N per sample.
template <typename Scalar>
RealVector<Scalar> sample_uniform_simplex(const MembraneSimplex<Scalar>& membrane,
                                          RngStream& rng) {
  RealVector<Scalar> u(membrane.dim);
  Scalar sum(0);
  for (Index i = 0; i < membrane.dim; ++i) {
    u[i] = Scalar(rng.next_exponential());
    sum += u[i];
  }
  return u / sum;
}

/// Which subregion A_i the break point falls in.  A_i is spanned by the
/// landed point and the vertices other than i; in barycentric terms the
/// break u lies in A_i iff alpha = u_i/b_i satisfies u_j - alpha b_j >= 0
/// for all j.  Regions where b_i = 0 are degenerate and never selected.
/// Boundary ties resolve to the smallest qualifying index.
template <typename Derived>
Index classify_break(const Eigen::MatrixBase<Derived>& break_bary,
                     const OnMembranePoint<typename Derived::Scalar>& pt) {
  using Scalar = typename Derived::Scalar;
  const Index n = pt.barycentric.size();
  if (break_bary.size() != n)
    throw std::invalid_argument("classify_break: dimension mismatch");
  if (!(pt.barycentric.sum() > Scalar(0)))
    throw std::invalid_argument("classify_break: invalid landed point");
  constexpr Scalar tol = Scalar(1e-12);
  if (break_bary.minCoeff() < -tol ||
      std::abs(break_bary.sum() - Scalar(1)) > Scalar(1e-9))
    throw std::invalid_argument("classify_break: break point not in simplex");

  for (Index i = 0; i < n; ++i) {
    const Scalar bi = pt.barycentric[i];
    if (bi <= Scalar(0)) continue;
    const Scalar alpha = break_bary[i] / bi;
    bool inside = true;
    for (Index j = 0; j < n && inside; ++j) {
      if (j == i) continue;
      if (break_bary[j] - alpha * pt.barycentric[j] < -tol) inside = false;
    }
    if (inside) return i;
  }
  // unreachable for valid inputs; pick the most interior region anyway
  Index best = 0;
  Scalar best_ratio = std::numeric_limits<Scalar>::infinity();
  for (Index i = 0; i < n; ++i) {
    if (pt.barycentric[i] <= Scalar(0)) continue;
    const Scalar ratio = break_bary[i] / pt.barycentric[i];
    if (ratio < best_ratio) {
      best_ratio = ratio;
      best = i;
    }
  }
  return best;
}

/// One simulated measurement run.
template <typename Scalar = double>
struct MeasurementRecord {
  BlochVector<Scalar> initial;
  OnMembranePoint<Scalar> on_membrane;
  RealVector<Scalar> break_bary;
  Index outcome_index = 0;
  Scalar outcome_value = Scalar(0);
  DensityMatrix<Scalar> final_state;
  std::uint64_t rng_seed = 0;
  std::uint64_t rng_stream = 0;
  std::uint64_t rng_draws = 0;
};

inline constexpr std::uint64_t kDefaultRejectionCap = 1'000'000;

/// Draw a break point from the given density.  Uniform densities sample the
/// flat Dirichlet law directly; piecewise densities use exact
/// cell-then-uniform sampling; callables use rejection against the bound.
template <typename Scalar>
RealVector<Scalar> sample_break_point(const MembraneDensity& density,
                                      const MembraneSimplex<Scalar>& membrane,
                                      RngStream& rng,
                                      std::uint64_t attempt_cap = kDefaultRejectionCap) {
  switch (density.kind()) {
    case MembraneDensity::Kind::kUniform:
      return sample_uniform_simplex(membrane, rng);
    case MembraneDensity::Kind::kPiecewise: {
      if (density.grid().outcomes() != membrane.dim)
        throw std::invalid_argument("sample_break_point: density/membrane dim mismatch");
      const auto& cdf = density.cell_cdf();
      const double u = rng.next_double();
      const Index cell = std::distance(
          cdf.data(), std::lower_bound(cdf.data(), cdf.data() + cdf.size(), u));
      return density.grid()
          .sample_in_cell(std::min(cell, cdf.size() - 1), rng)
          .template cast<Scalar>();
    }
    case MembraneDensity::Kind::kCallable: {
      for (std::uint64_t attempt = 0; attempt < attempt_cap; ++attempt) {
        RealVector<Scalar> u = sample_uniform_simplex(membrane, rng);
        const double rho = density.value(u.template cast<double>());
        if (rho < 0.0)
          throw std::runtime_error("sample_break_point: density returned a negative value");
        if (rho > density.bound())
          throw std::runtime_error(
              "sample_break_point: density exceeds its declared bound M; "
              "raise the bound");
        if (rng.next_double() * density.bound() < rho) return u;
      }
      throw std::runtime_error(
          "sample_break_point: rejection sampling exhausted the attempt cap; "
          "the density bound M is far above the density's typical values");
    }
  }
  throw std::logic_error("sample_break_point: unknown density kind");
}

namespace detail {

/// Stochastic stage shared by single runs and ensembles: break, classify.
template <typename Scalar>
std::pair<RealVector<Scalar>, Index> break_and_classify(
    const OnMembranePoint<Scalar>& pt, const MembraneDensity& density,
    const MembraneSimplex<Scalar>& membrane, RngStream& rng,
    std::uint64_t attempt_cap) {
  RealVector<Scalar> u = sample_break_point(density, membrane, rng, attempt_cap);
  return {u, classify_break(u, pt)};
}

}  // namespace detail

/// Full two-stage process: plunge, break, classify, collapse.
template <typename Scalar>
MeasurementRecord<Scalar> run_measurement(
    const BlochVector<Scalar>& initial, const MembraneSimplex<Scalar>& membrane,
    const Observable<Scalar>& obs, const MembraneDensity& density, RngStream rng,
    std::uint64_t attempt_cap = kDefaultRejectionCap) {
  if (obs.dim() != membrane.dim)
    throw std::invalid_argument("run_measurement: observable/membrane mismatch");
  OnMembranePoint<Scalar> pt = plunge(initial, membrane);
  auto [u, outcome] =
      detail::break_and_classify(pt, density, membrane, rng, attempt_cap);
  return MeasurementRecord<Scalar>{
      initial,
      std::move(pt),
      std::move(u),
      outcome,
      obs.eigenvalues()[outcome],
      DensityMatrix<Scalar>::from_matrix(obs.projector(outcome)),
      rng.seed(),
      rng.stream_id(),
      rng.draws()};
}

/// Aggregated outcome statistics for a batch of runs.
template <typename Scalar = double>
struct EnsembleStats {
  std::int64_t n_runs = 0;
  std::vector<std::int64_t> counts;
  RealVector<Scalar> frequencies;
  RealVector<Scalar> born;         // exact outcome probabilities
  RealVector<Scalar> std_errors;   // sqrt(p (1-p) / n)
  Scalar max_abs_deviation = Scalar(0);

  bool within(Scalar n_std_errors) const {
    for (Index k = 0; k < born.size(); ++k)
      if (std::abs(frequencies[k] - born[k]) > n_std_errors * std_errors[k] +
                                                   Scalar(kAlgebraTol))
        return false;
    return true;
  }
};

/// Run n independent measurements and aggregate.  Run r draws from
/// rng.substream(r), so the statistics are a pure function of
/// (seed, stream_id, config) no matter how many workers execute it.
template <typename Scalar>
EnsembleStats<Scalar> run_ensemble(const BlochVector<Scalar>& initial,
                                   const MembraneSimplex<Scalar>& membrane,
                                   const Observable<Scalar>& obs,
                                   const MembraneDensity& density,
                                   std::int64_t n, const RngStream& rng,
                                   int workers = 1,
                                   std::uint64_t attempt_cap = kDefaultRejectionCap) {
  if (n < 1) throw std::invalid_argument("run_ensemble: n >= 1 required");
  if (workers < 1) throw std::invalid_argument("run_ensemble: workers >= 1");
  if (obs.dim() != membrane.dim)
    throw std::invalid_argument("run_ensemble: observable/membrane mismatch");

  const OnMembranePoint<Scalar> pt = plunge(initial, membrane);
  const Index n_out = membrane.dim;

  std::vector<std::vector<std::int64_t>> partial(
      static_cast<std::size_t>(workers),
      std::vector<std::int64_t>(static_cast<std::size_t>(n_out), 0));
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(workers));

  auto worker_fn = [&](int w) {
    try {
      auto& local = partial[static_cast<std::size_t>(w)];
      for (std::int64_t r = w; r < n; r += workers) {
        RngStream run_rng = rng.substream(static_cast<std::uint64_t>(r));
        auto [u, outcome] = detail::break_and_classify(pt, density, membrane,
                                                       run_rng, attempt_cap);
        (void)u;
        ++local[static_cast<std::size_t>(outcome)];
      }
    } catch (...) {
      failures[static_cast<std::size_t>(w)] = std::current_exception();
    }
  };

  if (workers == 1) {
    worker_fn(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker_fn, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& failure : failures)
    if (failure) std::rethrow_exception(failure);

  EnsembleStats<Scalar> stats;
  stats.n_runs = n;
  stats.counts.assign(static_cast<std::size_t>(n_out), 0);
  for (int w = 0; w < workers; ++w)
    for (Index k = 0; k < n_out; ++k)
      stats.counts[static_cast<std::size_t>(k)] +=
          partial[static_cast<std::size_t>(w)][static_cast<std::size_t>(k)];

  stats.frequencies.resize(n_out);
  stats.born = pt.barycentric;
  stats.std_errors.resize(n_out);
  for (Index k = 0; k < n_out; ++k) {
    stats.frequencies[k] =
        Scalar(stats.counts[static_cast<std::size_t>(k)]) / Scalar(n);
    const Scalar p = stats.born[k];
    stats.std_errors[k] = std::sqrt(p * (Scalar(1) - p) / Scalar(n));
    stats.max_abs_deviation = std::max(
        stats.max_abs_deviation, std::abs(stats.frequencies[k] - stats.born[k]));
  }
  return stats;
}

/// Shortcut sampler for uniform membranes: inverse CDF over the landed
/// point's barycentric coordinates (one draw per outcome).  Distributionally
/// equivalent to sample_uniform_simplex + classify_break.
template <typename Scalar>
Index fast_sample_outcome(const OnMembranePoint<Scalar>& pt, RngStream& rng) {
  const Scalar u = Scalar(rng.next_double());
  Scalar acc(0);
  Index last_positive = 0;
  for (Index i = 0; i < pt.barycentric.size(); ++i) {
    if (pt.barycentric[i] <= Scalar(0)) continue;
    acc += pt.barycentric[i];
    last_positive = i;
    if (u < acc) return i;
  }
  return last_positive;
}

/// Average of outcome probabilities across random piecewise-constant
/// densities, with running checkpoints.
struct UniversalAverageResult {
  RealVector<double> averaged;
  std::vector<std::pair<std::int64_t, RealVector<double>>> checkpoints;
};

/// Draw n_densities random depth-d piecewise densities (i.i.d. uniform cell
/// weights) and average the outcome probabilities they induce.  Two-outcome
/// membranes integrate each density exactly; larger membranes estimate with
/// runs_per_density samples each.  As the number of densities grows the
/// average recovers the uniform-membrane (Born) probabilities.
template <typename Scalar>
UniversalAverageResult universal_average(
    const BlochVector<Scalar>& initial, const MembraneSimplex<Scalar>& membrane,
    const Observable<Scalar>& obs, std::int64_t n_densities,
    std::int64_t runs_per_density, int grid_depth, const RngStream& rng,
    std::vector<std::int64_t> checkpoint_counts = {}) {
  if (n_densities < 1)
    throw std::invalid_argument("universal_average: n_densities >= 1");
  if (grid_depth < 1)
    throw std::invalid_argument("universal_average: grid_depth >= 1");
  if (membrane.dim != obs.dim())
    throw std::invalid_argument("universal_average: observable/membrane mismatch");
  if (membrane.dim > 2 && runs_per_density < 1)
    throw std::invalid_argument("universal_average: runs_per_density >= 1");

  const OnMembranePoint<Scalar> pt = plunge(initial, membrane);
  const RealVector<double> bary = pt.barycentric.template cast<double>();
  const Index n_out = membrane.dim;

  UniversalAverageResult result;
  RealVector<double> acc = RealVector<double>::Zero(n_out);
  std::size_t next_checkpoint = 0;
  std::sort(checkpoint_counts.begin(), checkpoint_counts.end());

  for (std::int64_t t = 0; t < n_densities; ++t) {
    RngStream weight_rng = rng.substream(2 * static_cast<std::uint64_t>(t));
    MembraneDensity density =
        MembraneDensity::piecewise_random(n_out, grid_depth, weight_rng);

    RealVector<double> probs(n_out);
    if (n_out == 2) {
      probs = piecewise_two_outcome_probabilities(density, bary);
    } else {
      RngStream sample_rng = rng.substream(2 * static_cast<std::uint64_t>(t) + 1);
      std::vector<std::int64_t> counts(static_cast<std::size_t>(n_out), 0);
      OnMembranePoint<double> pt_d{pt.point.template cast<double>(), bary};
      for (std::int64_t r = 0; r < runs_per_density; ++r) {
        RealVector<double> u = sample_break_point(density, membrane, sample_rng)
                                   .template cast<double>();
        ++counts[static_cast<std::size_t>(classify_break(u, pt_d))];
      }
      for (Index k = 0; k < n_out; ++k)
        probs[k] = double(counts[static_cast<std::size_t>(k)]) /
                   double(runs_per_density);
    }
    acc += probs;

    while (next_checkpoint < checkpoint_counts.size() &&
           checkpoint_counts[next_checkpoint] == t + 1) {
      result.checkpoints.emplace_back(t + 1, (acc / double(t + 1)).eval());
      ++next_checkpoint;
    }
  }
  result.averaged = acc / double(n_densities);
  if (result.checkpoints.empty() ||
      result.checkpoints.back().first != n_densities)
    result.checkpoints.emplace_back(n_densities, result.averaged);
  return result;
}

}  // namespace ebr
