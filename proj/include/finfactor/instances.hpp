#pragma once

// Seeded random problem instances shared by the property tests, the
// acceptance suite and the CLI.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "finfactor/matrix_core.hpp"
#include "finfactor/matrix_units.hpp"
#include "finfactor/random.hpp"
#include "finfactor/sparsity.hpp"

namespace finfactor::instances {

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Units e_ij (x) I_d of M_k (x) M_d, optionally conjugated by a unitary.
inline MatrixUnitSystem amplified_units(int k, int d, const Matrix* conj = nullptr) {
  const MatrixUnitSystem base = standard_units(k);
  std::vector<Matrix> units;
  for (const auto& e : base.units()) {
    Matrix u = tensor_product(e, identity(d));
    if (conj) u = *conj * u * conj->adjoint();
    units.push_back(std::move(u));
  }
  return {static_cast<Eigen::Index>(k) * d, k, std::move(units)};
}

struct SparseInstance {
  GeneratorTuple tuple;
  MatrixUnitSystem units;
  int blocks = 0;  // total nonzero blocks placed
};

/// A tuple of 1..3 elements whose nonzero blocks against the units number at
/// most (k - 2)^2 / 4 (and at most max_blocks if positive), so that
/// c <= 1/2 - 1/k. Blocks are d x d Gaussian with random scale; with
/// `conjugate` everything is rotated by a Haar unitary.
inline SparseInstance sparse_tuple(int k, int d, Rng& rng, bool conjugate, int max_blocks = 0) {
  int budget = (k - 2) * (k - 2) / 4;
  if (max_blocks > 0) budget = std::min(budget, max_blocks);
  const int blocks = uniform_int(rng, 1, std::max(1, budget));
  const int elements = std::min(blocks, uniform_int(rng, 1, 3));
  const Eigen::Index n = static_cast<Eigen::Index>(k) * d;

  std::vector<int> per(static_cast<std::size_t>(elements), 1);
  for (int b = elements; b < blocks; ++b) ++per[static_cast<std::size_t>(uniform_int(rng, 0, elements - 1))];

  std::vector<Matrix> xs;
  for (int m = 0; m < elements; ++m) {
    std::vector<int> cells(static_cast<std::size_t>(k * k));
    std::iota(cells.begin(), cells.end(), 0);
    std::shuffle(cells.begin(), cells.end(), rng);
    Matrix x = Matrix::Zero(n, n);
    const double scale = uniform_real(rng, 0.2, 3.0);
    for (int c = 0; c < per[static_cast<std::size_t>(m)]; ++c) {
      const int cell = cells[static_cast<std::size_t>(c)];
      x.block((cell / k) * d, (cell % k) * d, d, d) = scale * random_complex(d, rng);
    }
    xs.push_back(std::move(x));
  }
  if (conjugate) {
    const Matrix u = random_unitary(n, rng);
    for (auto& x : xs) x = u * x * u.adjoint();
    return {GeneratorTuple(std::move(xs)), amplified_units(k, d, &u), blocks};
  }
  return {GeneratorTuple(std::move(xs)), amplified_units(k, d), blocks};
}

/// Random element of U (sum_i M_{a_i} (x) I_{m_i}) U*, with the block sizes
/// a_i and multiplicities m_i given as pairs.
inline Matrix structured_element(const std::vector<std::pair<int, int>>& shape, const Matrix& u, Rng& rng) {
  Eigen::Index n = 0;
  for (auto [a, m] : shape) n += static_cast<Eigen::Index>(a) * m;
  Matrix x = Matrix::Zero(n, n);
  Eigen::Index off = 0;
  for (auto [a, m] : shape) {
    const Matrix blk = tensor_product(random_complex(a, rng), identity(m));
    x.block(off, off, blk.rows(), blk.cols()) = blk;
    off += blk.rows();
  }
  return u * x * u.adjoint();
}

/// A random block shape for M_n: list of (block size, multiplicity).
inline std::vector<std::pair<int, int>> random_shape(int n, Rng& rng) {
  std::vector<std::pair<int, int>> shape;
  int left = n;
  while (left > 0) {
    const int a = uniform_int(rng, 1, left);
    const int max_m = left / a;
    const int m = uniform_int(rng, 1, max_m);
    shape.emplace_back(a, m);
    left -= a * m;
  }
  return shape;
}

/// Projection family of groups of columns of `basis`; groups are contiguous
/// after a random shuffle of the columns.
inline ProjectionFamily random_family(const Matrix& basis, int k, Rng& rng) {
  const Eigen::Index n = basis.rows();
  std::vector<int> groups(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) groups[static_cast<std::size_t>(i)] = static_cast<int>(i / (n / k));
  std::shuffle(groups.begin(), groups.end(), rng);
  return grouped_family(basis, groups, k, "random;groups=" + join_groups(groups));
}

/// Element whose coordinates in `basis` vanish outside a random subset of
/// the cells of a `cells` x `cells` grid (cells must divide n).
inline Matrix sparse_in_basis(const Matrix& basis, int cells, double density, Rng& rng) {
  const Eigen::Index n = basis.rows();
  const Eigen::Index w = n / cells;
  Matrix s = Matrix::Zero(n, n);
  std::bernoulli_distribution keep(density);
  for (int a = 0; a < cells; ++a)
    for (int b = 0; b < cells; ++b)
      if (keep(rng)) s.block(a * w, b * w, w, w) = random_complex(w, rng);
  return basis * s * basis.adjoint();
}

}  // namespace finfactor::instances
