#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ebr/engine.hpp"
#include "ebr/sampling.hpp"

using namespace ebr;

namespace {

Observable<double> spin_z(Index n) {
  RealVector<double> values(n);
  for (Index k = 0; k < n; ++k) values[k] = double(n - 1) / 2.0 - double(k);
  return Observable<double>::diagonal(values);
}

OnMembranePoint<double> point_at(std::initializer_list<double> bary) {
  OnMembranePoint<double> pt;
  pt.barycentric = RealVector<double>(Index(bary.size()));
  Index i = 0;
  for (double b : bary) pt.barycentric[i++] = b;
  pt.point = RealVector<double>::Zero(1);  // classification ignores the point
  return pt;
}

RealVector<double> bary(std::initializer_list<double> values) {
  RealVector<double> v(Index(values.size()));
  Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("uniform simplex sampling matches flat Dirichlet moments") {
  const int n_draws = 1000000;
  for (Index n : {2, 3, 4}) {
    const auto basis = build_generators<double>(n);
    RngStream rng(1000 + n, 0);
    const auto m = build_membrane(spin_z(n), basis);

    const double expect_mean = 1.0 / double(n);
    RealVector<double> mean = RealVector<double>::Zero(n);
    RealVector<double> m2 = RealVector<double>::Zero(n);  // central moments
    RealVector<double> m4 = RealVector<double>::Zero(n);
    for (int i = 0; i < n_draws; ++i) {
      const auto u = sample_uniform_simplex(m, rng);
      CHECK(u.minCoeff() >= 0.0);
      mean += u;
      const RealVector<double> d = u.array() - expect_mean;
      m2 += d.cwiseProduct(d);
      m4 += d.cwiseProduct(d).cwiseProduct(d.cwiseProduct(d));
    }
    mean /= n_draws;
    m2 /= n_draws;
    m4 /= n_draws;

    const double expect_var =
        double(n - 1) / (double(n) * double(n) * double(n + 1));
    // 5 standard errors on each empirical coordinate moment; the variance
    // estimator's error is sqrt((m4 - var^2)/n)
    const double se_mean = std::sqrt(expect_var / n_draws);
    for (Index k = 0; k < n; ++k) {
      CHECK(std::abs(mean[k] - expect_mean) <= 5 * se_mean);
      const double se_var =
          std::sqrt((m4[k] - expect_var * expect_var) / n_draws);
      CHECK(std::abs(m2[k] - expect_var) <= 5 * se_var);
    }
  }
}

TEST_CASE("classification on the segment follows the tension-fragment rule") {
  const auto pt = point_at({0.75, 0.25});
  CHECK(classify_break(bary({0.9, 0.1}), pt) == 1);  // breaks between pt and v1
  CHECK(classify_break(bary({0.1, 0.9}), pt) == 0);  // breaks between pt and v2
  // exactly at the landed point: smallest index wins
  CHECK(classify_break(bary({0.75, 0.25}), pt) == 0);
}

TEST_CASE("classification at the centroid splits the triangle by closest edge") {
  const auto pt = point_at({1.0 / 3, 1.0 / 3, 1.0 / 3});
  // near the edge opposite vertex 1 -> region A_1 -> outcome 0
  CHECK(classify_break(bary({0.05, 0.475, 0.475}), pt) == 0);
  CHECK(classify_break(bary({0.475, 0.05, 0.475}), pt) == 1);
  CHECK(classify_break(bary({0.475, 0.475, 0.05}), pt) == 2);
}

TEST_CASE("degenerate regions are never selected") {
  const auto pt = point_at({0.0, 0.6, 0.4});
  RngStream rng(77, 0);
  for (int i = 0; i < 2000; ++i) {
    RealVector<double> u(3);
    double s = 0;
    for (Index k = 0; k < 3; ++k) {
      u[k] = rng.next_exponential();
      s += u[k];
    }
    u /= s;
    CHECK(classify_break(u, pt) != 0);
  }
}

TEST_CASE("classification rejects malformed inputs") {
  const auto pt = point_at({0.5, 0.5});
  CHECK_THROWS_AS(classify_break(bary({0.7, 0.4}), pt), std::invalid_argument);
  CHECK_THROWS_AS(classify_break(bary({-0.2, 1.2}), pt), std::invalid_argument);
}

TEST_CASE("eigenstates always produce their own outcome") {
  RngStream rng(31, 0);
  for (Index n : {2, 3}) {
    const auto basis = build_generators<double>(n);
    const auto obs = random_observable<double>(n, rng);
    const auto m = build_membrane(obs, basis);
    for (Index k = 0; k < n; ++k) {
      for (auto density :
           {MembraneDensity::uniform(),
            MembraneDensity::piecewise_random(n, 3, rng.substream(9))}) {
        const auto record = run_measurement(m.vertex(k), m, obs, density,
                                            rng.substream(100 + k));
        CHECK(record.outcome_index == k);
        CHECK(record.outcome_value == obs.eigenvalues()[k]);
        CHECK((record.final_state.matrix() - obs.projector(k))
                  .cwiseAbs()
                  .maxCoeff() <= kEigenTol);
      }
    }
  }
}

TEST_CASE("measurement records carry their provenance") {
  const auto basis = build_generators<double>(2);
  const auto obs = spin_z(2);
  const auto m = build_membrane(obs, basis);
  BlochVector<double> x_state(3);
  x_state << 1, 0, 0;

  RngStream rng(123, 5);
  const auto record =
      run_measurement(x_state, m, obs, MembraneDensity::uniform(), rng);
  CHECK(record.rng_seed == 123);
  CHECK(record.rng_stream == 5);
  CHECK(record.rng_draws == 2);  // two exponentials for the 1-simplex
  CHECK(std::abs(record.break_bary.sum() - 1.0) <= 1e-12);
  CHECK(std::abs(record.on_membrane.barycentric[0] - 0.5) <= kEigenTol);
}

TEST_CASE("the equator state splits a million runs evenly") {
  const auto basis = build_generators<double>(2);
  const auto obs = spin_z(2);
  const auto m = build_membrane(obs, basis);
  BlochVector<double> equator(3);
  equator << 1, 0, 0;  // theta = pi/2

  const std::int64_t runs = 1000000;
  const auto stats = run_ensemble(equator, m, obs, MembraneDensity::uniform(),
                                  runs, RngStream(404, 2));
  CHECK(std::abs(stats.frequencies[0] - 0.5) <=
        4 * std::sqrt(0.25 / double(runs)));
}

TEST_CASE("ensembles reproduce the Born statistics at a million runs") {
  RngStream rng(2026, 0);
  const Index n = 3;
  const auto basis = build_generators<double>(n);
  const auto obs = random_observable<double>(n, rng);
  const auto m = build_membrane(obs, basis);
  const auto state = random_pure_state(n, rng);
  const auto initial = state_to_bloch(state, basis);

  const std::int64_t runs = 1000000;
  const auto stats = run_ensemble(initial, m, obs, MembraneDensity::uniform(),
                                  runs, RngStream(99, 1));
  const auto born = born_probabilities(state, obs);
  CHECK(stats.n_runs == runs);
  std::int64_t total = 0;
  for (auto c : stats.counts) total += c;
  CHECK(total == runs);
  for (Index k = 0; k < n; ++k) {
    const double se = std::sqrt(born[k] * (1 - born[k]) / double(runs));
    CHECK(std::abs(stats.frequencies[k] - born[k]) <= 4 * se);
  }
  CHECK(stats.within(4.0));
}

TEST_CASE("ensembles are reproducible and schedule-independent") {
  const Index n = 3;
  const auto basis = build_generators<double>(n);
  RngStream rng(2027, 0);
  const auto obs = random_observable<double>(n, rng);
  const auto m = build_membrane(obs, basis);
  const auto initial = state_to_bloch(random_pure_state(n, rng), basis);

  const auto base = run_ensemble(initial, m, obs, MembraneDensity::uniform(),
                                 20000, RngStream(7, 7), 1);
  for (int workers : {1, 2, 8}) {
    const auto again = run_ensemble(initial, m, obs, MembraneDensity::uniform(),
                                    20000, RngStream(7, 7), workers);
    CHECK(again.counts == base.counts);
    CHECK(again.max_abs_deviation == base.max_abs_deviation);
  }
}

TEST_CASE("a single run matches the first substream of an ensemble") {
  const Index n = 2;
  const auto basis = build_generators<double>(n);
  const auto obs = spin_z(n);
  const auto m = build_membrane(obs, basis);
  BlochVector<double> x_state(3);
  x_state << 1, 0, 0;

  RngStream rng(5150, 0);
  const auto one = run_ensemble(x_state, m, obs, MembraneDensity::uniform(), 1, rng);
  const auto record =
      run_measurement(x_state, m, obs, MembraneDensity::uniform(), rng.substream(0));
  CHECK(one.counts[std::size_t(record.outcome_index)] == 1);
}

TEST_CASE("deviation shrinks like one over root n") {
  const Index n = 2;
  const auto basis = build_generators<double>(n);
  const auto obs = spin_z(n);
  const auto m = build_membrane(obs, basis);
  BlochVector<double> tilted(3);
  tilted << std::sin(1.0), 0, std::cos(1.0);

  double dev_small = 0, dev_large = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    dev_small += run_ensemble(tilted, m, obs, MembraneDensity::uniform(), 10000,
                              RngStream(800 + s, 0))
                     .max_abs_deviation;
    dev_large += run_ensemble(tilted, m, obs, MembraneDensity::uniform(), 1000000,
                              RngStream(900 + s, 0))
                     .max_abs_deviation;
  }
  CHECK(dev_large / 10 < 0.4 * (dev_small / 10));
}

TEST_CASE("fast sampler agrees with the mechanistic sampler") {
  const Index n = 3;
  const auto basis = build_generators<double>(n);
  RngStream rng(2028, 0);
  const auto obs = random_observable<double>(n, rng);
  const auto m = build_membrane(obs, basis);
  const auto initial = state_to_bloch(random_pure_state(n, rng), basis);
  const auto pt = plunge(initial, m);

  const std::int64_t draws = 1000000;
  std::vector<std::int64_t> fast_counts(3, 0);
  RngStream fast_rng(41, 0);
  for (std::int64_t i = 0; i < draws; ++i)
    ++fast_counts[std::size_t(fast_sample_outcome(pt, fast_rng))];

  const auto mech = run_ensemble(initial, m, obs, MembraneDensity::uniform(),
                                 draws, RngStream(42, 0));
  for (Index k = 0; k < n; ++k) {
    const double p = pt.barycentric[k];
    const double se = std::sqrt(p * (1 - p) / double(draws));
    const double combined = std::sqrt(2.0) * se;
    CHECK(std::abs(double(fast_counts[std::size_t(k)]) / double(draws) -
                   mech.frequencies[k]) <= 5 * combined);
  }

  // one-hot landing always yields that outcome
  OnMembranePoint<double> hot;
  hot.point = m.vertex(1);
  hot.barycentric = RealVector<double>::Zero(3);
  hot.barycentric[1] = 1.0;
  RngStream hot_rng(4, 4);
  for (int i = 0; i < 100; ++i) CHECK(fast_sample_outcome(hot, hot_rng) == 1);
}

TEST_CASE("piecewise and callable densities bias the outcome as designed") {
  const Index n = 2;
  const auto basis = build_generators<double>(n);
  const auto obs = spin_z(n);
  const auto m = build_membrane(obs, basis);
  BlochVector<double> x_state(3);
  x_state << 1, 0, 0;  // Born would give (1/2, 1/2)

  // callable supported on A_2 only: outcome 2 with certainty
  const auto pt = plunge(x_state, m);
  auto in_a2 = [pt](const RealVector<double>& u) {
    return u[0] > pt.barycentric[0] ? 1.0 : 0.0;
  };
  const auto skew = MembraneDensity::callable(in_a2, 1.0);
  const auto stats =
      run_ensemble(x_state, m, obs, skew, 2000, RngStream(71, 0));
  CHECK(stats.counts[0] == 0);
  CHECK(stats.counts[1] == 2000);
}

TEST_CASE("rejection sampling enforces the attempt cap and the bound") {
  const Index n = 2;
  const auto basis = build_generators<double>(n);
  const auto obs = spin_z(n);
  const auto m = build_membrane(obs, basis);
  BlochVector<double> x_state(3);
  x_state << 1, 0, 0;

  // almost-nowhere positive density: cap of 32 attempts must trip
  auto needle = [](const RealVector<double>& u) {
    return u[0] > 0.9999999 ? 1.0 : 0.0;
  };
  CHECK_THROWS_AS(run_measurement(x_state, m, obs,
                                  MembraneDensity::callable(needle, 1.0),
                                  RngStream(72, 0), 32),
                  std::runtime_error);

  // a density exceeding its declared bound is reported
  auto liar = [](const RealVector<double>&) { return 2.0; };
  CHECK_THROWS_AS(run_measurement(x_state, m, obs,
                                  MembraneDensity::callable(liar, 1.0),
                                  RngStream(73, 0)),
                  std::runtime_error);
}

TEST_CASE("universal average over random densities recovers the Born split") {
  const Index n = 2;
  const auto basis = build_generators<double>(n);
  const auto obs = spin_z(n);
  const auto m = build_membrane(obs, basis);
  BlochVector<double> tilted(3);
  const double theta = std::numbers::pi / 3;
  tilted << std::sin(theta), 0, std::cos(theta);

  const auto result = universal_average(tilted, m, obs, 400, 0, 6,
                                        RngStream(314, 0), {10, 100});
  CHECK(std::abs(result.averaged[0] - 0.75) <= 0.015);
  CHECK(result.checkpoints.size() == 3);
  CHECK(result.checkpoints[0].first == 10);
  CHECK(result.checkpoints[1].first == 100);
  CHECK(result.checkpoints.back().first == 400);
}

TEST_CASE("universal average with sampling for three outcomes") {
  const Index n = 3;
  const auto basis = build_generators<double>(n);
  RngStream rng(2029, 0);
  const auto obs = random_observable<double>(n, rng);
  const auto m = build_membrane(obs, basis);
  const auto state = random_pure_state(n, rng);
  const auto initial = state_to_bloch(state, basis);

  const auto result =
      universal_average(initial, m, obs, 200, 200, 4, RngStream(315, 0));
  const auto born = born_probabilities(state, obs);
  CHECK((result.averaged - born.cast<double>()).cwiseAbs().maxCoeff() <= 0.02);
}
