#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "ebr/rng.hpp"
#include "ebr/types.hpp"

namespace ebr {

/// Partition of the (N-1)-simplex at subdivision depth d, built on the
/// cumulative coordinates z_j = x_1 + ... + x_j.  Each cumulative axis is
/// split into r = 2^d bins; a cell is a non-decreasing integer vector
/// m in {0..r-1}^(N-1).  Cell volumes are known in closed form, and points
/// are located by flooring, so piecewise densities support exact
/// cell-then-uniform sampling.
class SimplexGrid {
 public:
  SimplexGrid(Index n_outcomes, int depth) : n_(n_outcomes), k_(n_outcomes - 1) {
    if (n_outcomes < 2) throw std::invalid_argument("SimplexGrid: N >= 2");
    if (depth < 1 || depth > 20)
      throw std::invalid_argument("SimplexGrid: depth must be in [1, 20]");
    res_ = std::int64_t(1) << depth;

    // cells with repetition: C(r + k - 1, k); refuse absurd grids up front
    double count = 1.0;
    for (Index i = 0; i < k_; ++i)
      count *= double(res_ + i) / double(i + 1);
    if (count > 4e6)
      throw std::invalid_argument(
          "SimplexGrid: too many cells for this dim/depth combination");

    std::vector<std::int64_t> m(static_cast<std::size_t>(k_), 0);
    std::vector<double> volumes;
    while (true) {
      cells_.insert(cells_.end(), m.begin(), m.end());
      volumes.push_back(relative_volume(m));
      // next non-decreasing vector in lexicographic order
      Index pos = k_;
      while (pos > 0 && m[static_cast<std::size_t>(pos - 1)] == res_ - 1) --pos;
      if (pos == 0) break;
      const std::int64_t v = ++m[static_cast<std::size_t>(pos - 1)];
      for (Index j = pos; j < k_; ++j) m[static_cast<std::size_t>(j)] = v;
    }
    volumes_ = Eigen::Map<RealVector<double>>(volumes.data(),
                                              static_cast<Index>(volumes.size()));
  }

  Index outcomes() const { return n_; }
  std::int64_t resolution() const { return res_; }
  Index cell_count() const { return volumes_.size(); }

  /// Relative cell volumes; they sum to 1 over the grid.
  const RealVector<double>& volumes() const { return volumes_; }

  /// Index of the cell containing a barycentric point.
  Index locate(const RealVector<double>& bary) const {
    if (bary.size() != n_)
      throw std::invalid_argument("SimplexGrid: barycentric size mismatch");
    std::vector<std::int64_t> m(static_cast<std::size_t>(k_));
    double z = 0.0;
    for (Index j = 0; j < k_; ++j) {
      z += bary[j];
      auto b = static_cast<std::int64_t>(std::floor(z * double(res_)));
      m[static_cast<std::size_t>(j)] = std::clamp<std::int64_t>(b, 0, res_ - 1);
    }
    for (Index j = 1; j < k_; ++j)  // guard against rounding inversions
      m[static_cast<std::size_t>(j)] = std::max(m[static_cast<std::size_t>(j)],
                                                m[static_cast<std::size_t>(j - 1)]);
    return rank_of(m);
  }

  /// Uniform sample inside a cell, returned in barycentric coordinates.
  RealVector<double> sample_in_cell(Index cell, RngStream& rng) const {
    const std::int64_t* m = cells_.data() + cell * k_;
    std::vector<double> f(static_cast<std::size_t>(k_));
    for (Index j = 0; j < k_; ++j) f[static_cast<std::size_t>(j)] = rng.next_double();
    // within a block of equal m the cumulative coordinates must stay sorted
    Index start = 0;
    for (Index j = 1; j <= k_; ++j) {
      if (j == k_ || m[j] != m[start]) {
        std::sort(f.begin() + start, f.begin() + j);
        start = j;
      }
    }
    RealVector<double> bary(n_);
    double prev = 0.0;
    for (Index j = 0; j < k_; ++j) {
      const double zj = (double(m[j]) + f[static_cast<std::size_t>(j)]) / double(res_);
      bary[j] = zj - prev;
      prev = zj;
    }
    bary[k_] = 1.0 - prev;
    return bary;
  }

 private:
  double relative_volume(const std::vector<std::int64_t>& m) const {
    // k! / (r^k * prod block_size!) for blocks of equal entries
    double v = 1.0;
    for (Index i = 2; i <= k_; ++i) v *= double(i);
    for (Index i = 0; i < k_; ++i) v /= double(res_);
    Index run = 1;
    for (Index j = 1; j <= k_; ++j) {
      if (j < k_ && m[static_cast<std::size_t>(j)] == m[static_cast<std::size_t>(j - 1)]) {
        ++run;
        v /= double(run);
      } else {
        run = 1;
      }
    }
    return v;
  }

  Index rank_of(const std::vector<std::int64_t>& m) const {
    const Index count = cell_count();
    Index lo = 0, hi = count - 1;
    while (lo < hi) {
      const Index mid = (lo + hi) / 2;
      const std::int64_t* c = cells_.data() + mid * k_;
      if (std::lexicographical_compare(c, c + k_, m.data(), m.data() + k_))
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  }

  Index n_;
  Index k_;
  std::int64_t res_ = 2;
  std::vector<std::int64_t> cells_;  // flattened, k_ entries per cell
  RealVector<double> volumes_;
};

/// Breaking/disintegration law of the membrane.  Uniform reproduces quantum
/// measurements; piecewise-constant and callable densities model the wider
/// class of non-uniform measurements.
class MembraneDensity {
 public:
  enum class Kind { kUniform, kPiecewise, kCallable };

  static MembraneDensity uniform() { return MembraneDensity(Kind::kUniform); }

  static MembraneDensity piecewise(Index n_outcomes, int depth,
                                   RealVector<double> weights) {
    MembraneDensity d(Kind::kPiecewise);
    d.grid_ = std::make_shared<SimplexGrid>(n_outcomes, depth);
    if (weights.size() != d.grid_->cell_count())
      throw std::invalid_argument("MembraneDensity: expected one weight per cell");
    if (weights.minCoeff() < 0.0)
      throw std::invalid_argument("MembraneDensity: negative weight");
    if (weights.maxCoeff() <= 0.0)
      throw std::invalid_argument("MembraneDensity: density is identically zero");
    d.weights_ = std::move(weights);
    d.build_cdf();
    return d;
  }

  /// Piecewise density with i.i.d. uniform [0,1] cell weights.
  static MembraneDensity piecewise_random(Index n_outcomes, int depth,
                                          RngStream rng) {
    SimplexGrid grid(n_outcomes, depth);
    RealVector<double> w(grid.cell_count());
    for (Index i = 0; i < w.size(); ++i) w[i] = rng.next_double();
    return piecewise(n_outcomes, depth, std::move(w));
  }

  /// Arbitrary nonnegative density of the barycentric coordinates with a
  /// finite upper bound, sampled by rejection.
  static MembraneDensity callable(
      std::function<double(const RealVector<double>&)> f, double bound) {
    if (!f) throw std::invalid_argument("MembraneDensity: null callable");
    if (!(bound > 0.0))
      throw std::invalid_argument("MembraneDensity: bound must be positive");
    MembraneDensity d(Kind::kCallable);
    d.fn_ = std::move(f);
    d.bound_ = bound;
    return d;
  }

  Kind kind() const { return kind_; }
  double bound() const { return bound_; }
  const SimplexGrid& grid() const { return *grid_; }
  const RealVector<double>& weights() const { return weights_; }
  const RealVector<double>& cell_cdf() const { return cdf_; }

  /// Density value at a barycentric point (relative scale).
  double value(const RealVector<double>& bary) const {
    switch (kind_) {
      case Kind::kUniform:
        return 1.0;
      case Kind::kPiecewise:
        return weights_[grid_->locate(bary)];
      case Kind::kCallable:
        return fn_(bary);
    }
    return 0.0;
  }

 private:
  explicit MembraneDensity(Kind k) : kind_(k) {}

  void build_cdf() {
    cdf_.resize(weights_.size());
    double acc = 0.0;
    for (Index i = 0; i < weights_.size(); ++i) {
      acc += weights_[i] * grid_->volumes()[i];
      cdf_[i] = acc;
    }
    cdf_ /= acc;
  }

  Kind kind_;
  std::shared_ptr<SimplexGrid> grid_;
  RealVector<double> weights_;
  RealVector<double> cdf_;
  std::function<double(const RealVector<double>&)> fn_;
  double bound_ = 0.0;
};

/// Exact subregion masses of a piecewise density on the two-outcome
/// membrane (the 1-simplex): closed-form interval integration, no
/// sampling involved.
inline RealVector<double> piecewise_two_outcome_probabilities(
    const MembraneDensity& density, const RealVector<double>& barycentric) {
  if (density.kind() != MembraneDensity::Kind::kPiecewise ||
      density.grid().outcomes() != 2)
    throw std::invalid_argument(
        "piecewise_two_outcome_probabilities: need a two-outcome piecewise "
        "density");
  const auto& grid = density.grid();
  const double split = barycentric[0];  // A_1 = { u_1 <= b_1 }
  const double r = double(grid.resolution());
  double mass_a1 = 0.0, mass_total = 0.0;
  for (Index j = 0; j < grid.cell_count(); ++j) {
    const double lo = double(j) / r, hi = double(j + 1) / r;
    const double w = density.weights()[j];
    mass_total += w * (hi - lo);
    mass_a1 += w * std::max(0.0, std::min(hi, split) - lo);
  }
  RealVector<double> p(2);
  p[0] = mass_a1 / mass_total;
  p[1] = 1.0 - p[0];
  return p;
}

}  // namespace ebr
