#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ebr/sampling.hpp"
#include "ebr/trajectory.hpp"

using namespace ebr;

namespace {

Observable<double> spin_z(Index n) {
  RealVector<double> values(n);
  for (Index k = 0; k < n; ++k) values[k] = double(n - 1) / 2.0 - double(k);
  return Observable<double>::diagonal(values);
}

}  // namespace

TEST_CASE("frame count, staging, and endpoint exactness") {
  const auto basis = build_generators<double>(3);
  RngStream rng(61, 0);
  const auto obs = random_observable<double>(3, rng);
  const auto m = build_membrane(obs, basis);
  const auto initial = state_to_bloch(random_pure_state(3, rng), basis);
  const auto record =
      run_measurement(initial, m, obs, MembraneDensity::uniform(), rng.substream(1));

  for (Index fps : {2, 5, 30}) {
    const auto frames = make_trajectory(record, m, fps);
    REQUIRE(Index(frames.size()) == 2 * fps);

    // stage 1: plunge, full membrane, exact endpoints
    CHECK(frames.front().stage == Stage::kPlunge);
    CHECK(frames.front().t == 0.0);
    CHECK((frames.front().particle - initial).cwiseAbs().maxCoeff() == 0.0);
    const auto& landed = frames[std::size_t(fps - 1)];
    CHECK(landed.t == 1.0);
    CHECK((landed.particle - record.on_membrane.point).cwiseAbs().maxCoeff() ==
          0.0);

    // stage 2 opens with the break marker and ends exactly on the vertex
    const auto& breaking = frames[std::size_t(fps)];
    CHECK(breaking.stage == Stage::kDisintegration);
    CHECK(breaking.membrane_state == MembranePhase::kBreaking);
    REQUIRE(breaking.break_bary.has_value());
    CHECK((*breaking.break_bary - record.break_bary).cwiseAbs().maxCoeff() ==
          0.0);
    CHECK((breaking.particle - record.on_membrane.point).cwiseAbs().maxCoeff() ==
          0.0);

    CHECK(frames.back().stage == Stage::kCollapse);
    CHECK(frames.back().membrane_state == MembranePhase::kContracted);
    CHECK((frames.back().particle - m.vertex(record.outcome_index))
              .cwiseAbs()
              .maxCoeff() == 0.0);

    // t is monotone within each stage
    for (std::size_t i = 1; i < frames.size(); ++i)
      if (frames[i].stage == frames[i - 1].stage)
        CHECK(frames[i].t > frames[i - 1].t);
  }

  CHECK_THROWS_AS(make_trajectory(record, m, 1), std::invalid_argument);
}

TEST_CASE("trajectory starting at the winning vertex never moves") {
  const auto basis = build_generators<double>(2);
  const auto obs = spin_z(2);
  const auto m = build_membrane(obs, basis);
  const auto record = run_measurement(m.vertex(0), m, obs,
                                      MembraneDensity::uniform(), RngStream(9, 9));
  REQUIRE(record.outcome_index == 0);
  for (const auto& f : make_trajectory(record, m, 4))
    CHECK((f.particle - m.vertex(0)).cwiseAbs().maxCoeff() <= kEigenTol);
}

TEST_CASE("plunge chord midpoint for the equator state") {
  const auto basis = build_generators<double>(2);
  const auto obs = spin_z(2);
  const auto m = build_membrane(obs, basis);
  BlochVector<double> equator(3);
  equator << 1, 0, 0;  // theta = pi/2: lands on the sphere center

  const auto record = run_measurement(equator, m, obs,
                                      MembraneDensity::uniform(), RngStream(8, 8));
  const auto frames = make_trajectory(record, m, 3);
  // middle plunge frame is halfway down the chord
  BlochVector<double> expected(3);
  expected << 0.5, 0, 0;
  CHECK((frames[1].particle - expected).cwiseAbs().maxCoeff() <= kAlgebraTol);
}

TEST_CASE("embedding is the identity on the N=2 sphere") {
  const auto basis = build_generators<double>(2);
  const auto m = build_membrane(spin_z(2), basis);
  BlochVector<double> p(3);
  p << 0.3, -0.4, 0.5;
  CHECK((embed(p, m) - p).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("membrane embedding is isometric: N=3 vertices form a sqrt(3) triangle") {
  const auto basis = build_generators<double>(3);
  RngStream rng(62, 0);
  const auto obs = random_observable<double>(3, rng);
  const auto m = build_membrane(obs, basis);

  std::vector<RealVector<double>> e;
  for (Index k = 0; k < 3; ++k) {
    e.push_back(embed(m.vertex(k), m));
    REQUIRE(e.back().size() == 3);  // 2 in-plane + 1 off-plane
    CHECK(std::abs(e.back()[2]) <= kEigenTol);  // vertices lie in the hull
  }
  for (Index i = 0; i < 3; ++i)
    for (Index j = i + 1; j < 3; ++j) {
      const double side = (e[std::size_t(i)].head(2) - e[std::size_t(j)].head(2)).norm();
      CHECK(std::abs(side - std::sqrt(3.0)) <= kEigenTol);
      // distances preserved against the ambient chord
      CHECK(std::abs(side - (m.vertex(i) - m.vertex(j)).norm()) <= kEigenTol);
    }
}

TEST_CASE("embedding distances are preserved for higher N too") {
  const auto basis = build_generators<double>(4);
  RngStream rng(63, 0);
  const auto obs = random_observable<double>(4, rng);
  const auto m = build_membrane(obs, basis);
  for (Index i = 0; i < 4; ++i)
    for (Index j = i + 1; j < 4; ++j) {
      const auto ei = embed(m.vertex(i), m);
      const auto ej = embed(m.vertex(j), m);
      CHECK(std::abs((ei - ej).norm() - (m.vertex(i) - m.vertex(j)).norm()) <=
            kEigenTol);
    }
}

TEST_CASE("off-plane distance of a pure state is sin theta on the sphere") {
  const auto basis = build_generators<double>(2);
  const auto m = build_membrane(spin_z(2), basis);
  for (double theta : {0.0, 0.4, std::numbers::pi / 2, 2.8}) {
    BlochVector<double> p(3);
    p << std::sin(theta), 0, std::cos(theta);
    CHECK(std::abs(offplane_distance(p, m) - std::abs(std::sin(theta))) <=
          kEigenTol);
  }
}

TEST_CASE("on-membrane points have zero off-plane distance") {
  const auto basis = build_generators<double>(3);
  RngStream rng(64, 0);
  const auto obs = random_observable<double>(3, rng);
  const auto m = build_membrane(obs, basis);
  for (int rep = 0; rep < 10; ++rep) {
    const auto initial = state_to_bloch(random_pure_state(3, rng), basis);
    const auto pt = plunge(initial, m);
    CHECK(offplane_distance(pt.point, m) <= kEigenTol);
  }
}
