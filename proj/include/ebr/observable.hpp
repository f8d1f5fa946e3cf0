#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ebr/types.hpp"

namespace ebr {

/// Hermitian observable with its spectral decomposition.  Eigenvalues are
/// stored in descending order; each projector is rank-1 while the spectrum
/// is nondegenerate.  Phase-free: all downstream geometry uses projectors.
template <typename Scalar = double>
class Observable {
 public:
  Observable() = default;  // empty placeholder; build via from_matrix

  static Observable from_matrix(const ComplexMatrix<Scalar>& m) {
    if (m.rows() != m.cols() || m.rows() < 2)
      throw std::invalid_argument("Observable: need square matrix, N >= 2");
    if (!is_hermitian<Scalar>(m, Scalar(kEigenTol)))
      throw std::invalid_argument("Observable: matrix is not Hermitian");

    Eigen::SelfAdjointEigenSolver<ComplexMatrix<Scalar>> es(m);
    const Index n = m.rows();

    Observable obs;
    obs.matrix_ = (m + m.adjoint()) / Scalar(2);
    obs.eigenvalues_.resize(n);
    obs.projectors_.reserve(static_cast<std::size_t>(n));
    // solver returns ascending order; flip to descending
    for (Index k = 0; k < n; ++k) {
      const Index src = n - 1 - k;
      obs.eigenvalues_[k] = es.eigenvalues()[src];
      ComplexVector<Scalar> v = es.eigenvectors().col(src);
      obs.projectors_.push_back((v * v.adjoint()).eval());
    }
    return obs;
  }

  /// Diagonal observable with the given values on the diagonal.
  static Observable diagonal(const RealVector<Scalar>& values) {
    ComplexMatrix<Scalar> m =
        ComplexMatrix<Scalar>::Zero(values.size(), values.size());
    for (Index i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return from_matrix(m);
  }

  Index dim() const { return matrix_.rows(); }
  const ComplexMatrix<Scalar>& matrix() const { return matrix_; }
  const RealVector<Scalar>& eigenvalues() const { return eigenvalues_; }
  const std::vector<ComplexMatrix<Scalar>>& projectors() const {
    return projectors_;
  }
  const ComplexMatrix<Scalar>& projector(Index k) const {
    return projectors_[static_cast<std::size_t>(k)];
  }

  /// True if any adjacent eigenvalue gap falls below the degeneracy
  /// threshold (descending order makes adjacent gaps sufficient).
  bool is_degenerate(Scalar gap = Scalar(kDegeneracyGap)) const {
    for (Index k = 0; k + 1 < eigenvalues_.size(); ++k)
      if (eigenvalues_[k] - eigenvalues_[k + 1] <= gap) return true;
    return false;
  }

 private:
  ComplexMatrix<Scalar> matrix_;
  RealVector<Scalar> eigenvalues_;
  std::vector<ComplexMatrix<Scalar>> projectors_;
};

/// Born rule P_k = Tr(rho P_k), clamped to [0, 1].  This trace route is the
/// independent oracle the geometric probabilities are tested against.
template <typename Scalar>
RealVector<Scalar> born_probabilities(const DensityMatrix<Scalar>& state,
                                      const Observable<Scalar>& obs) {
  if (state.dim() != obs.dim())
    throw std::invalid_argument("born_probabilities: dimension mismatch");
  RealVector<Scalar> p(obs.dim());
  for (Index k = 0; k < obs.dim(); ++k)
    p[k] = std::clamp((state.matrix() * obs.projector(k)).trace().real(),
                      Scalar(0), Scalar(1));
  return p;
}

/// Outcome structure of an observable with (possibly) repeated eigenvalues:
/// distinct measured values, the outcome indices feeding each value, and
/// the summed projector of each eigenspace.
template <typename Scalar = double>
struct DegenerateGrouping {
  RealVector<Scalar> values;                      // distinct, descending
  std::vector<std::vector<Index>> members;        // outcome indices per value
  std::vector<ComplexMatrix<Scalar>> projectors;  // eigenspace projectors

  Index group_count() const { return values.size(); }
};

/// Group outcomes whose eigenvalues differ by at most the degeneracy gap.
template <typename Scalar>
DegenerateGrouping<Scalar> group_eigenvalues(
    const Observable<Scalar>& obs, Scalar gap = Scalar(kDegeneracyGap)) {
  DegenerateGrouping<Scalar> g;
  std::vector<Scalar> values;
  for (Index k = 0; k < obs.dim(); ++k) {
    if (k > 0 && obs.eigenvalues()[k - 1] - obs.eigenvalues()[k] <= gap) {
      g.members.back().push_back(k);
      g.projectors.back() += obs.projector(k);
    } else {
      values.push_back(obs.eigenvalues()[k]);
      g.members.push_back({k});
      g.projectors.push_back(obs.projector(k));
    }
  }
  g.values = Eigen::Map<RealVector<Scalar>>(values.data(),
                                            static_cast<Index>(values.size()));
  return g;
}

/// Sum per-outcome probabilities into per-value probabilities.
template <typename Scalar>
RealVector<Scalar> grouped_probabilities(const DegenerateGrouping<Scalar>& g,
                                         const RealVector<Scalar>& outcome_probs) {
  RealVector<Scalar> p = RealVector<Scalar>::Zero(g.group_count());
  for (Index v = 0; v < g.group_count(); ++v)
    for (Index k : g.members[static_cast<std::size_t>(v)])
      p[v] += outcome_probs[k];
  return p;
}

/// Projective-measurement update for the eigenspace of value group v:
/// (P rho P) / Tr(P rho).
template <typename Scalar>
DensityMatrix<Scalar> grouped_post_state(const DegenerateGrouping<Scalar>& g,
                                         const DensityMatrix<Scalar>& state,
                                         Index v) {
  const ComplexMatrix<Scalar>& p = g.projectors[static_cast<std::size_t>(v)];
  const Scalar w = (p * state.matrix()).trace().real();
  if (w <= Scalar(0))
    throw std::invalid_argument(
        "grouped_post_state: outcome has zero probability");
  ComplexMatrix<Scalar> updated = (p * state.matrix() * p) / w;
  // symmetrize away rounding before validation
  updated = ((updated + updated.adjoint()) / Scalar(2)).eval();
  return DensityMatrix<Scalar>::from_matrix(updated);
}

}  // namespace ebr
