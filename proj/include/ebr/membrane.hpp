#pragma once

#include <cmath>
#include <numbers>
#include <utility>

#include "ebr/bloch.hpp"
#include "ebr/observable.hpp"
#include "ebr/types.hpp"

namespace ebr {

/// The potentiality region of a nondegenerate observable: the regular
/// (N-1)-simplex spanned by the Bloch vectors of its eigenprojectors.
/// For N=2 it is the diameter between two antipodal points ("elastic band"),
/// for N=3 an equilateral triangle ("membrane"), and so on.
template <typename Scalar = double>
struct MembraneSimplex {
  Index dim = 0;                  // N outcomes
  RealMatrix<Scalar> vertices;    // (N^2-1) x N, column k = outcome k
  BlochVector<Scalar> centroid;   // always the origin: projectors sum to I
  RealMatrix<Scalar> plane_basis; // (N^2-1) x (N-1), orthonormal columns

  BlochVector<Scalar> vertex(Index k) const { return vertices.col(k); }
};

/// Build the membrane from an observable.  Vertices follow the outcome
/// order (descending eigenvalue).  Degenerate spectra have no simplex of
/// rank-1 outcome states; callers must group eigenvalues instead.
template <typename Scalar>
MembraneSimplex<Scalar> build_membrane(const Observable<Scalar>& obs,
                                       const GeneratorBasis<Scalar>& basis) {
  if (obs.dim() != basis.dim)
    throw std::invalid_argument("build_membrane: dimension mismatch");
  if (obs.is_degenerate())
    throw std::invalid_argument(
        "build_membrane: observable has a degenerate spectrum; use "
        "group_eigenvalues for value-level outcomes");

  const Index n = obs.dim();
  MembraneSimplex<Scalar> m;
  m.dim = n;
  m.vertices.resize(basis.count(), n);
  for (Index k = 0; k < n; ++k)
    m.vertices.col(k) = projector_to_bloch(obs.projector(k), basis);
  m.centroid = m.vertices.rowwise().mean();

  // The affine hull directions: N-1 independent edges, orthonormalized.
  RealMatrix<Scalar> edges(basis.count(), n - 1);
  for (Index k = 0; k + 1 < n; ++k)
    edges.col(k) = m.vertices.col(k + 1) - m.vertices.col(0);
  Eigen::HouseholderQR<RealMatrix<Scalar>> qr(edges);
  RealMatrix<Scalar> thin_q =
      qr.householderQ() * RealMatrix<Scalar>::Identity(basis.count(), n - 1);
  m.plane_basis = thin_q;
  return m;
}

/// A state landed on the membrane: the projected Bloch point and its convex
/// weights with respect to the outcome vertices.
template <typename Scalar = double>
struct OnMembranePoint {
  BlochVector<Scalar> point;
  RealVector<Scalar> barycentric;  // each in [0,1], sums to 1
};

/// Barycentric coordinates of a point known to lie in the affine hull of
/// the membrane vertices, by solving the affine system [V; 1^T] t = [p; 1].
template <typename Derived>
RealVector<typename Derived::Scalar> affine_barycentric(
    const Eigen::MatrixBase<Derived>& p,
    const MembraneSimplex<typename Derived::Scalar>& membrane) {
  using Scalar = typename Derived::Scalar;
  const Index d = membrane.vertices.rows();
  const Index n = membrane.dim;
  RealMatrix<Scalar> a(d + 1, n);
  a.topRows(d) = membrane.vertices;
  a.bottomRows(1).setOnes();
  RealVector<Scalar> b(d + 1);
  b.head(d) = p;
  b[d] = Scalar(1);
  return a.colPivHouseholderQr().solve(b);
}

/// First, deterministic measurement stage: the particle sinks orthogonally
/// onto the membrane.  Accepts any bona fide Bloch vector; interior (mixed)
/// states are admitted as an extension of the pure-state picture.
template <typename Derived>
OnMembranePoint<typename Derived::Scalar> plunge(
    const Eigen::MatrixBase<Derived>& initial,
    const MembraneSimplex<typename Derived::Scalar>& membrane) {
  using Scalar = typename Derived::Scalar;
  if (initial.size() != membrane.vertices.rows())
    throw std::invalid_argument("plunge: dimension mismatch");
  if (initial.norm() > Scalar(1) + Scalar(kEigenTol))
    throw std::invalid_argument("plunge: Bloch vector outside the unit ball");

  OnMembranePoint<Scalar> pt;
  const BlochVector<Scalar> rel = initial - membrane.centroid;
  pt.point = membrane.centroid +
             membrane.plane_basis * (membrane.plane_basis.transpose() * rel);

  RealVector<Scalar> t = affine_barycentric(pt.point, membrane);
  Scalar sum(0);
  for (Index i = 0; i < t.size(); ++i) {
    if (t[i] < Scalar(-kEigenTol))
      throw std::invalid_argument(
          "plunge: projection outside the membrane; initial state is not "
          "bona fide");
    if (t[i] < Scalar(0)) t[i] = Scalar(0);
    sum += t[i];
  }
  pt.barycentric = t / sum;
  return pt;
}

/// Exact two-outcome probabilities (cos^2(theta/2), sin^2(theta/2)) for a
/// state at angle theta from the first outcome vertex.
template <typename Scalar>
std::pair<Scalar, Scalar> two_outcome_closed_form(Scalar theta) {
  if (theta < Scalar(0) || theta > std::numbers::pi_v<Scalar>)
    throw std::invalid_argument("two_outcome_closed_form: theta outside [0, pi]");
  const Scalar c = std::cos(theta / Scalar(2));
  const Scalar s = std::sin(theta / Scalar(2));
  return {c * c, s * s};
}

/// (k-dimensional) measure of the simplex spanned by the given vertex
/// columns, via the Gram determinant of its edge matrix.
template <typename Scalar>
Scalar gram_simplex_measure(const RealMatrix<Scalar>& verts) {
  const Index k = verts.cols() - 1;
  if (k == 0) return Scalar(1);
  RealMatrix<Scalar> w(verts.rows(), k);
  for (Index j = 0; j < k; ++j) w.col(j) = verts.col(j + 1) - verts.col(0);
  const RealMatrix<Scalar> gram = w.transpose() * w;
  Scalar det = gram.determinant();
  if (det < Scalar(0)) det = Scalar(0);
  Scalar factorial(1);
  for (Index i = 2; i <= k; ++i) factorial *= Scalar(i);
  return std::sqrt(det) / factorial;
}

/// Total membrane measure from the closed form for a regular (N-1)-simplex
/// inscribed in the unit sphere: side s = sqrt(2N/(N-1)), measure
/// s^(N-1) sqrt(N) / ((N-1)! 2^((N-1)/2)).
template <typename Scalar>
Scalar total_measure(const MembraneSimplex<Scalar>& membrane) {
  const Index n = membrane.dim;
  const Scalar side = std::sqrt(Scalar(2 * n) / Scalar(n - 1));
  Scalar factorial(1);
  for (Index i = 2; i < n; ++i) factorial *= Scalar(i);
  return std::pow(side, Scalar(n - 1)) * std::sqrt(Scalar(n)) /
         (factorial * std::pow(Scalar(2), Scalar(n - 1) / Scalar(2)));
}

/// Measures of the disintegration subregions A_i.  A_i replaces vertex i by
/// the landed point; it is the region whose breaking detaches every anchor
/// except outcome i, and its relative measure equals barycentric_i.
template <typename Scalar>
RealVector<Scalar> subregion_measures(const OnMembranePoint<Scalar>& pt,
                                      const MembraneSimplex<Scalar>& membrane) {
  const Index n = membrane.dim;
  if (pt.point.size() != membrane.vertices.rows() ||
      pt.barycentric.size() != n)
    throw std::invalid_argument("subregion_measures: dimension mismatch");
  if (pt.barycentric.minCoeff() < Scalar(-1e-9) ||
      std::abs(pt.barycentric.sum() - Scalar(1)) > Scalar(1e-9))
    throw std::invalid_argument("subregion_measures: point is not on the membrane");

  RealVector<Scalar> measures(n);
  RealMatrix<Scalar> verts(membrane.vertices.rows(), n);
  for (Index i = 0; i < n; ++i) {
    verts.col(0) = pt.point;
    Index c = 1;
    for (Index j = 0; j < n; ++j)
      if (j != i) verts.col(c++) = membrane.vertices.col(j);
    measures[i] = gram_simplex_measure<Scalar>(verts);
  }
  return measures;
}

/// The landed (fully decohered) state: diagonal in the outcome eigenbasis,
/// equal to sum_i barycentric_i P_i.
template <typename Scalar>
DensityMatrix<Scalar> decohered_state(const OnMembranePoint<Scalar>& pt,
                                      const Observable<Scalar>& obs,
                                      const GeneratorBasis<Scalar>& basis) {
  if (obs.dim() != basis.dim || pt.barycentric.size() != obs.dim())
    throw std::invalid_argument("decohered_state: dimension mismatch");
  ComplexMatrix<Scalar> m = bloch_to_state(pt.point, basis);
  m = ((m + m.adjoint()) / Scalar(2)).eval();
  return DensityMatrix<Scalar>::from_matrix(m);
}

}  // namespace ebr
