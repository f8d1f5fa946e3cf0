#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace ebr {

using Index = Eigen::Index;

template <typename Scalar>
using ComplexMatrix =
    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using RealMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using RealVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Point in the generalized Bloch space of an N-level system.
/// Convention: length N^2-1, pure states on the unit sphere.
template <typename Scalar>
using BlochVector = RealVector<Scalar>;

// Tolerance policy: exact algebraic identities get 1e-12, anything routed
// through an eigensolver gets 1e-10.
inline constexpr double kAlgebraTol = 1e-12;
inline constexpr double kEigenTol = 1e-10;
inline constexpr double kUnitNormTol = 1e-8;
inline constexpr double kDegeneracyGap = 1e-9;

/// Scale factor c_N mapping state traces to Bloch coordinates; chosen so
/// pure states have unit norm for every N.
template <typename Scalar>
Scalar bloch_scale(Index n) {
  return std::sqrt(Scalar(n) / (Scalar(2) * Scalar(n - 1)));
}

template <typename Scalar>
bool is_hermitian(const ComplexMatrix<Scalar>& m, Scalar tol) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

/// N x N complex matrix validated as a quantum state: Hermitian, unit trace,
/// positive semidefinite.
template <typename Scalar = double>
class DensityMatrix {
 public:
  static DensityMatrix from_matrix(const ComplexMatrix<Scalar>& m) {
    if (m.rows() != m.cols() || m.rows() < 2)
      throw std::invalid_argument("DensityMatrix: need square matrix, N >= 2");
    if (!is_hermitian<Scalar>(m, Scalar(kAlgebraTol)))
      throw std::invalid_argument("DensityMatrix: not Hermitian within 1e-12");
    if (std::abs(m.trace() - std::complex<Scalar>(1)) > Scalar(kAlgebraTol))
      throw std::invalid_argument("DensityMatrix: trace != 1 within 1e-12");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix<Scalar>> es(m,
                                                            Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < Scalar(-kEigenTol))
      throw std::invalid_argument(
          "DensityMatrix: negative eigenvalue, not positive semidefinite");
    return DensityMatrix(m);
  }

  /// Rank-1 projector |psi><psi| from a (not necessarily normalized) ket.
  static DensityMatrix pure(const ComplexVector<Scalar>& ket) {
    if (ket.size() < 2) throw std::invalid_argument("DensityMatrix: N >= 2");
    const Scalar nrm = ket.norm();
    if (nrm <= Scalar(0))
      throw std::invalid_argument("DensityMatrix: zero ket");
    ComplexVector<Scalar> k = ket / nrm;
    return DensityMatrix((k * k.adjoint()).eval());
  }

  static DensityMatrix maximally_mixed(Index n) {
    return DensityMatrix(ComplexMatrix<Scalar>::Identity(n, n) / Scalar(n));
  }

  Index dim() const { return mat_.rows(); }
  const ComplexMatrix<Scalar>& matrix() const { return mat_; }

  Scalar purity() const { return (mat_ * mat_).trace().real(); }

 private:
  explicit DensityMatrix(ComplexMatrix<Scalar> m) : mat_(std::move(m)) {}
  ComplexMatrix<Scalar> mat_;
};

using DensityMatrixXd = DensityMatrix<double>;

}  // namespace ebr
