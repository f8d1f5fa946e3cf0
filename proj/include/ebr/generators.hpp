#pragma once

#include <cmath>
#include <vector>

#include "ebr/types.hpp"

namespace ebr {

/// Orthogonal basis of traceless Hermitian generators for N-level systems,
/// normalized to Tr(L_i L_j) = 2 delta_ij.  For N=2 these are the Pauli
/// matrices in (x, y, z) order.
template <typename Scalar = double>
struct GeneratorBasis {
  Index dim = 0;
  std::vector<ComplexMatrix<Scalar>> lambdas;

  Index count() const { return static_cast<Index>(lambdas.size()); }
  Scalar scale() const { return bloch_scale<Scalar>(dim); }
};

/// Generalized Gell-Mann construction.  Ordering is fixed: symmetric pairs,
/// antisymmetric pairs, then diagonal generators, each block lexicographic
/// in (j, k).
template <typename Scalar = double>
GeneratorBasis<Scalar> build_generators(Index n) {
  if (n < 2) throw std::invalid_argument("build_generators: N >= 2 required");

  using C = std::complex<Scalar>;
  GeneratorBasis<Scalar> basis;
  basis.dim = n;
  basis.lambdas.reserve(static_cast<std::size_t>(n * n - 1));

  for (Index j = 0; j < n; ++j) {
    for (Index k = j + 1; k < n; ++k) {
      ComplexMatrix<Scalar> s = ComplexMatrix<Scalar>::Zero(n, n);
      s(j, k) = C(1, 0);
      s(k, j) = C(1, 0);
      basis.lambdas.push_back(std::move(s));
    }
  }
  for (Index j = 0; j < n; ++j) {
    for (Index k = j + 1; k < n; ++k) {
      ComplexMatrix<Scalar> a = ComplexMatrix<Scalar>::Zero(n, n);
      a(j, k) = C(0, -1);
      a(k, j) = C(0, 1);
      basis.lambdas.push_back(std::move(a));
    }
  }
  for (Index l = 1; l < n; ++l) {
    ComplexMatrix<Scalar> d = ComplexMatrix<Scalar>::Zero(n, n);
    const Scalar norm = std::sqrt(Scalar(2) / (Scalar(l) * Scalar(l + 1)));
    for (Index j = 0; j < l; ++j) d(j, j) = C(norm, 0);
    d(l, l) = C(-Scalar(l) * norm, 0);
    basis.lambdas.push_back(std::move(d));
  }
  return basis;
}

}  // namespace ebr
