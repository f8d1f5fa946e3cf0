#pragma once

#include <algorithm>
#include <cmath>

#include "ebr/generators.hpp"
#include "ebr/types.hpp"

namespace ebr {

/// Bloch coordinates r_i = c_N Tr(rho L_i).  Pure states map to unit
/// vectors, the maximally mixed state to the origin.
template <typename Scalar>
BlochVector<Scalar> state_to_bloch(const DensityMatrix<Scalar>& state,
                                   const GeneratorBasis<Scalar>& basis) {
  if (state.dim() != basis.dim)
    throw std::invalid_argument("state_to_bloch: dimension mismatch");
  const Scalar c = basis.scale();
  BlochVector<Scalar> r(basis.count());
  for (Index i = 0; i < basis.count(); ++i)
    r[i] = c * (state.matrix() * basis.lambdas[static_cast<std::size_t>(i)])
                   .trace()
                   .real();
  return r;
}

/// Bloch coordinates of a rank-1 projector given directly as a matrix
/// (used for observable eigenprojectors, which carry no phase ambiguity).
template <typename Scalar>
BlochVector<Scalar> projector_to_bloch(const ComplexMatrix<Scalar>& projector,
                                       const GeneratorBasis<Scalar>& basis) {
  if (projector.rows() != basis.dim || projector.cols() != basis.dim)
    throw std::invalid_argument("projector_to_bloch: dimension mismatch");
  const Scalar c = basis.scale();
  BlochVector<Scalar> r(basis.count());
  for (Index i = 0; i < basis.count(); ++i)
    r[i] = c * (projector * basis.lambdas[static_cast<std::size_t>(i)])
                   .trace()
                   .real();
  return r;
}

/// Inverse map M = I/N + (1/(2 c_N)) sum_i r_i L_i.  Always Hermitian and
/// unit trace; positive semidefiniteness is NOT guaranteed — only a convex
/// portion of the Bloch ball corresponds to genuine states for N >= 3.
template <typename Derived>
ComplexMatrix<typename Derived::Scalar> bloch_to_state(
    const Eigen::MatrixBase<Derived>& vec,
    const GeneratorBasis<typename Derived::Scalar>& basis) {
  using Scalar = typename Derived::Scalar;
  if (vec.size() != basis.count())
    throw std::invalid_argument("bloch_to_state: dimension mismatch");
  const Index n = basis.dim;
  ComplexMatrix<Scalar> m =
      ComplexMatrix<Scalar>::Identity(n, n) / std::complex<Scalar>(Scalar(n));
  const Scalar half_inv_c = Scalar(1) / (Scalar(2) * basis.scale());
  for (Index i = 0; i < basis.count(); ++i)
    m += (half_inv_c * vec[i]) * basis.lambdas[static_cast<std::size_t>(i)];
  return m;
}

/// Smallest eigenvalue of the reconstructed matrix; negative values flag
/// points of the Bloch ball that are not bona fide states.
template <typename Derived>
typename Derived::Scalar min_state_eigenvalue(
    const Eigen::MatrixBase<Derived>& vec,
    const GeneratorBasis<typename Derived::Scalar>& basis) {
  using Scalar = typename Derived::Scalar;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Scalar>> es(
      bloch_to_state(vec, basis), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

template <typename Derived>
bool is_bona_fide(const Eigen::MatrixBase<Derived>& vec,
                  const GeneratorBasis<typename Derived::Scalar>& basis) {
  using Scalar = typename Derived::Scalar;
  return min_state_eigenvalue(vec, basis) >= Scalar(-kEigenTol);
}

/// Angle between two unit Bloch vectors, in [0, pi].
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar bloch_angle(const Eigen::MatrixBase<DerivedA>& a,
                                      const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  static_assert(std::is_same_v<Scalar, typename DerivedB::Scalar>);
  if (a.size() != b.size())
    throw std::invalid_argument("bloch_angle: dimension mismatch");
  if (std::abs(a.norm() - Scalar(1)) > Scalar(kUnitNormTol) ||
      std::abs(b.norm() - Scalar(1)) > Scalar(kUnitNormTol))
    throw std::invalid_argument("bloch_angle: inputs must be unit vectors");
  const Scalar d = std::clamp(a.dot(b), Scalar(-1), Scalar(1));
  return std::acos(d);
}

}  // namespace ebr
