#pragma once

#include <cmath>

#include "ebr/observable.hpp"
#include "ebr/rng.hpp"
#include "ebr/types.hpp"

namespace ebr {

/// Haar-random pure state: normalized complex Gaussian ket.
template <typename Scalar = double>
DensityMatrix<Scalar> random_pure_state(Index n, RngStream& rng) {
  ComplexVector<Scalar> ket(n);
  for (Index i = 0; i < n; ++i)
    ket[i] = std::complex<Scalar>(Scalar(rng.next_normal()),
                                  Scalar(rng.next_normal()));
  return DensityMatrix<Scalar>::pure(ket);
}

/// Random mixed state rho = G G^dagger / Tr(G G^dagger) (Wishart).
template <typename Scalar = double>
DensityMatrix<Scalar> random_mixed_state(Index n, RngStream& rng) {
  ComplexMatrix<Scalar> g(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      g(i, j) = std::complex<Scalar>(Scalar(rng.next_normal()),
                                     Scalar(rng.next_normal()));
  ComplexMatrix<Scalar> w = g * g.adjoint();
  w /= w.trace().real();
  w = ((w + w.adjoint()) / Scalar(2)).eval();
  return DensityMatrix<Scalar>::from_matrix(w);
}

/// Random GUE-style Hermitian observable, resampled until the spectrum is
/// comfortably nondegenerate.
template <typename Scalar = double>
Observable<Scalar> random_observable(Index n, RngStream& rng,
                                     Scalar min_gap = Scalar(1e-6)) {
  for (int attempt = 0; attempt < 256; ++attempt) {
    ComplexMatrix<Scalar> h(n, n);
    for (Index i = 0; i < n; ++i) {
      h(i, i) = std::complex<Scalar>(Scalar(rng.next_normal()), 0);
      const Scalar root_two = std::sqrt(Scalar(2));
      for (Index j = i + 1; j < n; ++j) {
        const Scalar re = Scalar(rng.next_normal()) / root_two;
        const Scalar im = Scalar(rng.next_normal()) / root_two;
        h(i, j) = std::complex<Scalar>(re, im);
        h(j, i) = std::complex<Scalar>(re, -im);
      }
    }
    Observable<Scalar> obs = Observable<Scalar>::from_matrix(h);
    if (!obs.is_degenerate(min_gap)) return obs;
  }
  throw std::runtime_error("random_observable: could not draw a nondegenerate spectrum");
}

/// Uniform direction on the unit sphere of the Bloch space.
template <typename Scalar = double>
BlochVector<Scalar> random_unit_vector(Index bloch_dim, RngStream& rng) {
  BlochVector<Scalar> v(bloch_dim);
  do {
    for (Index i = 0; i < bloch_dim; ++i) v[i] = Scalar(rng.next_normal());
  } while (v.norm() == Scalar(0));
  return v / v.norm();
}

/// Uniform point in the closed unit ball of the Bloch space.
template <typename Scalar = double>
BlochVector<Scalar> random_ball_vector(Index bloch_dim, RngStream& rng) {
  const Scalar radius =
      std::pow(Scalar(rng.next_double()), Scalar(1) / Scalar(bloch_dim));
  return radius * random_unit_vector<Scalar>(bloch_dim, rng);
}

}  // namespace ebr
