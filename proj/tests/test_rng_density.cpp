#include <doctest.h>

#include <set>

#include "ebr/density.hpp"
#include "ebr/rng.hpp"

using namespace ebr;

TEST_CASE("identical (seed, stream) reproduce identical sequences") {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(a.draws() == 100);
}

TEST_CASE("frozen draws pin the generator across platforms") {
  // splitmix64-ctr/1: draw i of (seed, id) is
  // mix64(mix64(mix64(seed + golden) ^ mix64(id + salt)) + (i+1) * golden)
  RngStream rng(0, 0);
  CHECK(rng.next_u64() == detail::mix64(
                              detail::mix64(detail::mix64(detail::kGolden) ^
                                            detail::mix64(detail::kStreamSalt)) +
                              detail::kGolden));
}

TEST_CASE("different seeds and streams decorrelate") {
  RngStream a(1, 0), b(2, 0), c(1, 1);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 50; ++i) {
    seen.insert(a.next_u64());
    seen.insert(b.next_u64());
    seen.insert(c.next_u64());
  }
  CHECK(seen.size() == 150);
}

TEST_CASE("substreams differ from the parent and from each other") {
  RngStream parent(9, 4);
  RngStream s0 = parent.substream(0);
  RngStream s1 = parent.substream(1);
  CHECK(s0.next_u64() != s1.next_u64());

  // substream derivation is independent of parent draw position
  RngStream parent2(9, 4);
  parent2.next_double();
  CHECK(parent2.substream(0).next_u64() == parent.substream(0).next_u64());
}

TEST_CASE("doubles land in [0,1) and exponentials are positive") {
  RngStream rng(3, 3);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / 20000 - 0.5) < 0.02);
  for (int i = 0; i < 1000; ++i) CHECK(rng.next_exponential() > 0.0);
}

TEST_CASE("grid cells partition the simplex with unit total volume") {
  for (Index n : {2, 3, 4}) {
    for (int depth : {1, 3, 5}) {
      SimplexGrid grid(n, depth);
      CHECK(std::abs(grid.volumes().sum() - 1.0) <= 1e-12);
      CHECK(grid.volumes().minCoeff() > 0.0);
    }
  }
  CHECK(SimplexGrid(2, 6).cell_count() == 64);
  CHECK(SimplexGrid(3, 6).cell_count() == 2080);  // C(65, 2)
}

TEST_CASE("grid rejects unusable parameters") {
  CHECK_THROWS_AS(SimplexGrid(1, 3), std::invalid_argument);
  CHECK_THROWS_AS(SimplexGrid(3, 0), std::invalid_argument);
  CHECK_THROWS_AS(SimplexGrid(6, 12), std::invalid_argument);  // cell blowup
}

TEST_CASE("locate returns the cell that generated a sample") {
  RngStream rng(55, 0);
  for (Index n : {2, 3, 4}) {
    SimplexGrid grid(n, 3);
    for (Index cell = 0; cell < grid.cell_count(); ++cell) {
      for (int rep = 0; rep < 5; ++rep) {
        const auto bary = grid.sample_in_cell(cell, rng);
        CHECK(std::abs(bary.sum() - 1.0) <= 1e-12);
        CHECK(bary.minCoeff() >= 0.0);
        CHECK(grid.locate(bary) == cell);
      }
    }
  }
}

TEST_CASE("piecewise density validation") {
  CHECK_THROWS_AS(
      MembraneDensity::piecewise(2, 2, RealVector<double>::Ones(5)),
      std::invalid_argument);  // wrong weight count (4 cells at depth 2)
  CHECK_THROWS_AS(
      MembraneDensity::piecewise(2, 2, RealVector<double>::Zero(4)),
      std::invalid_argument);  // identically zero
  RealVector<double> negative = RealVector<double>::Ones(4);
  negative[2] = -0.25;
  CHECK_THROWS_AS(MembraneDensity::piecewise(2, 2, negative),
                  std::invalid_argument);
}

TEST_CASE("density value lookup matches the cell weights") {
  RealVector<double> w(4);
  w << 0.1, 0.7, 0.2, 0.9;
  const auto density = MembraneDensity::piecewise(2, 2, w);
  RealVector<double> bary(2);
  bary << 0.1, 0.9;  // z = 0.1 -> cell 0
  CHECK(density.value(bary) == 0.1);
  bary << 0.8, 0.2;  // z = 0.8 -> cell 3
  CHECK(density.value(bary) == 0.9);

  CHECK(MembraneDensity::uniform().value(bary) == 1.0);
}

TEST_CASE("callable density validation") {
  CHECK_THROWS_AS(MembraneDensity::callable(nullptr, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      MembraneDensity::callable([](const RealVector<double>&) { return 1.0; },
                                0.0),
      std::invalid_argument);
}

TEST_CASE("exact two-outcome integration agrees with the uniform law") {
  // flat weights must reproduce the barycentric split exactly
  const auto flat = MembraneDensity::piecewise(2, 4, RealVector<double>::Ones(16));
  RealVector<double> bary(2);
  bary << 0.625, 0.375;
  const auto p = piecewise_two_outcome_probabilities(flat, bary);
  CHECK(std::abs(p[0] - 0.625) <= 1e-12);

  // a density supported entirely past the split point pushes mass to A_2
  RealVector<double> skew = RealVector<double>::Zero(16);
  skew[15] = 1.0;  // only the last cell (u_1 in [15/16, 1]) can break
  const auto ps = piecewise_two_outcome_probabilities(
      MembraneDensity::piecewise(2, 4, skew), bary);
  CHECK(ps[0] == 0.0);
  CHECK(ps[1] == 1.0);
}
