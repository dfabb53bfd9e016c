#pragma once

// Seeded random matrices used by property tests, the acceptance suite and the
// local-search heuristics.

#include <Eigen/QR>

#include <cstdint>
#include <random>

#include "finfactor/matrix_core.hpp"

namespace finfactor {

using Rng = std::mt19937_64;

/// Derive an independent stream seed from a base seed and a stream index.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline Matrix random_complex(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      const double re = g(rng);
      const double im = g(rng);
      m(i, j) = Complex(re, im);
    }
  return m;
}

inline Matrix random_hermitian(Eigen::Index n, Rng& rng) {
  const Matrix a = random_complex(n, rng);
  return 0.5 * (a + a.adjoint());
}

/// Positive semidefinite a*a.
inline Matrix random_psd(Eigen::Index n, Rng& rng) {
  const Matrix a = random_complex(n, rng);
  return a.adjoint() * a;
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of R
/// folded back into Q.
inline Matrix random_unitary(Eigen::Index n, Rng& rng) {
  const Matrix z = random_complex(n, rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex d = r(i, i);
    const double a = std::abs(d);
    if (a > 0.0) q.col(i) *= d / a;
  }
  return q;
}

/// exp(i * eps * H) for a random Hermitian H, a unitary close to the identity.
inline Matrix small_random_unitary(Eigen::Index n, double eps, Rng& rng) {
  const Matrix h = random_hermitian(n, rng);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
  Vector phases(n);
  for (Eigen::Index i = 0; i < n; ++i)
    phases(i) = std::exp(Complex(0.0, eps * eig.eigenvalues()(i)));
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace finfactor
