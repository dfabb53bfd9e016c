#pragma once

// Systems of matrix units {e_ij}: the standard ones, tensor towers, the
// shift-generator pair, and nested products of subsystems.

#include <algorithm>
#include <utility>
#include <vector>

#include "finfactor/matrix_core.hpp"

namespace finfactor {

/// A (sub)system of matrix units of size k inside M_n. Indices are 0-based.
class MatrixUnitSystem {
 public:
  MatrixUnitSystem(Eigen::Index ambient_dim, int k, std::vector<Matrix> units)
      : n_(ambient_dim), k_(k), units_(std::move(units)) {
    if (k_ < 1) throw Error(ErrorKind::InvalidArgument, "system size must be >= 1");
    if (units_.size() != static_cast<std::size_t>(k_) * static_cast<std::size_t>(k_)) {
      throw Error(ErrorKind::SizeMismatch, "expected k*k units");
    }
    for (const auto& e : units_) {
      if (e.rows() != n_ || e.cols() != n_) {
        throw Error(ErrorKind::DimensionMismatch, "unit does not live in M_" + std::to_string(n_));
      }
    }
    support_ = Matrix::Zero(n_, n_);
    for (int j = 0; j < k_; ++j) support_ += (*this)(j, j);
  }

  Eigen::Index ambient_dim() const { return n_; }
  int size() const { return k_; }
  const Matrix& operator()(int i, int j) const {
    return units_[static_cast<std::size_t>(i) * static_cast<std::size_t>(k_) + static_cast<std::size_t>(j)];
  }
  const std::vector<Matrix>& units() const& { return units_; }
  // By value on temporaries, so `for (auto& e : standard_units(k).units())` is safe.
  std::vector<Matrix> units() && { return std::move(units_); }
  /// p = sum_j e_jj.
  const Matrix& support() const { return support_; }

  std::vector<Matrix> diagonal() const {
    std::vector<Matrix> out;
    for (int j = 0; j < k_; ++j) out.push_back((*this)(j, j));
    return out;
  }

  bool is_full(double tol = 1e-8) const { return (support_ - identity(n_)).norm() < tol; }

  /// Conjugate every unit by a unitary: e_ij -> u e_ij u*.
  MatrixUnitSystem conjugated(const Matrix& u) const {
    std::vector<Matrix> out;
    out.reserve(units_.size());
    for (const auto& e : units_) out.push_back(u * e * u.adjoint());
    return {n_, k_, std::move(out)};
  }

  /// Relabel indices: new e_ij = old e_{perm[i], perm[j]}.
  MatrixUnitSystem relabeled(const std::vector<int>& perm) const {
    std::vector<Matrix> out;
    out.reserve(units_.size());
    for (int i = 0; i < k_; ++i)
      for (int j = 0; j < k_; ++j) out.push_back((*this)(perm[i], perm[j]));
    return {n_, k_, std::move(out)};
  }

 private:
  Eigen::Index n_;
  int k_;
  std::vector<Matrix> units_;
  Matrix support_;
};

/// The canonical system of M_k: e_ij are the elementary matrices.
inline MatrixUnitSystem standard_units(int k) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
  std::vector<Matrix> units;
  units.reserve(static_cast<std::size_t>(k * k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) units.push_back(unit(k, i, j));
  return {k, k, std::move(units)};
}

/// Embed a system through an isometry v (n x m, v* v = I): e_ij -> v e_ij v*.
inline MatrixUnitSystem embed(const MatrixUnitSystem& sys, const Matrix& isometry) {
  if (isometry.cols() != sys.ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "isometry domain does not match the system");
  }
  std::vector<Matrix> units;
  for (const auto& e : sys.units()) units.push_back(isometry * e * isometry.adjoint());
  return {isometry.rows(), sys.size(), std::move(units)};
}

/// Worst residual per axiom of a subsystem of matrix units:
///   (i) every unit is a finite matrix of the ambient algebra,
///   (ii) sum_j e_jj is a projection,
///   (iii) e_ij* = e_ji,
///   (iv) e_il e_lj = e_ij,
/// plus the spread of tau(e_jj) across j.
struct UnitSystemReport {
  bool membership = true;
  double projection_residual = 0.0;
  double adjoint_residual = 0.0;
  double product_residual = 0.0;
  double trace_spread = 0.0;
  bool full = false;
  bool pass = false;
};

inline UnitSystemReport verify(const MatrixUnitSystem& sys, const Tolerances& tol = {}) {
  UnitSystemReport r;
  const int k = sys.size();
  for (const auto& e : sys.units()) r.membership = r.membership && all_finite(e);
  const Matrix& p = sys.support();
  r.projection_residual = std::max((p * p - p).norm(), self_adjoint_residual(p));
  double tmin = 1e300;
  double tmax = -1e300;
  for (int i = 0; i < k; ++i) {
    const double t = normalized_trace(sys(i, i)).real();
    tmin = std::min(tmin, t);
    tmax = std::max(tmax, t);
    for (int j = 0; j < k; ++j) {
      r.adjoint_residual = std::max(r.adjoint_residual, (sys(i, j).adjoint() - sys(j, i)).norm());
      for (int l = 0; l < k; ++l) {
        r.product_residual = std::max(r.product_residual, (sys(i, l) * sys(l, j) - sys(i, j)).norm());
      }
    }
  }
  r.trace_spread = tmax - tmin;
  r.full = (p - identity(sys.ambient_dim())).norm() < tol.structural_tol;
  r.pass = r.membership && r.projection_residual < tol.structural_tol &&
           r.adjoint_residual < tol.structural_tol && r.product_residual < tol.structural_tol &&
           r.trace_spread < tol.structural_tol;
  return r;
}

/// x1 = e_11 and x2 = sum_i (e_{i,i+1} + e_{i,i+1}*), two self-adjoint
/// elements generating the same algebra as the whole system.
inline std::pair<Matrix, Matrix> shift_pair(const MatrixUnitSystem& sys) {
  if (sys.size() < 2) throw Error(ErrorKind::SystemTooSmall, "shift pair needs k >= 2");
  Matrix x2 = Matrix::Zero(sys.ambient_dim(), sys.ambient_dim());
  for (int i = 0; i + 1 < sys.size(); ++i) x2 += sys(i, i + 1) + sys(i, i + 1).adjoint();
  return {sys(0, 0), x2};
}

/// Units e_{(i,s),(j,t)} = a_ij (x) b_st, composite index i * k_b + s.
inline MatrixUnitSystem tensor_units(const MatrixUnitSystem& a, const MatrixUnitSystem& b) {
  const int ka = a.size();
  const int kb = b.size();
  if (a.ambient_dim() * b.ambient_dim() > dim_cap()) {
    throw Error(ErrorKind::DimensionOverflow, "tensor of unit systems exceeds the dimension cap");
  }
  std::vector<Matrix> units(static_cast<std::size_t>(ka * kb * ka * kb));
  const int k = ka * kb;
  for (int i = 0; i < ka; ++i)
    for (int s = 0; s < kb; ++s)
      for (int j = 0; j < ka; ++j)
        for (int t = 0; t < kb; ++t)
          units[static_cast<std::size_t>((i * kb + s) * k + (j * kb + t))] = tensor_product(a(i, j), b(s, t));
  return {a.ambient_dim() * b.ambient_dim(), k, std::move(units)};
}

/// Result of composing a chain of nested subsystems.
struct NestedProduct {
  MatrixUnitSystem system;
  std::vector<Matrix> diagonal_family;  // the diagonal units of `system`
};

/// For a chain where each level after the first is supported on the (2,2)
/// unit of its predecessor, the products
///   e^(1)_{i1,2} ... e^(L-1)_{i_{L-1},2} e^(L)_{s,t} e^(L-1)_{2,j_{L-1}} ... e^(1)_{2,j1}
/// form a system of size m_1 ... m_L. Composite indices are lexicographic in
/// (i1, ..., i_{L-1}, s). Every level must have size >= 2.
inline NestedProduct nested_product(const std::vector<MatrixUnitSystem>& chain,
                                    const Tolerances& tol = {}) {
  if (chain.empty()) throw Error(ErrorKind::InvalidArgument, "empty chain");
  const Eigen::Index n = chain.front().ambient_dim();
  for (std::size_t l = 1; l < chain.size(); ++l) {
    if (chain[l].ambient_dim() != n) {
      throw Error(ErrorKind::DimensionMismatch, "chain levels live in different ambient algebras");
    }
    if (chain[l - 1].size() < 2) {
      throw Error(ErrorKind::SystemTooSmall, "a level followed by another must have size >= 2");
    }
    const double gap = (chain[l].support() - chain[l - 1](1, 1)).norm();
    if (gap > tol.structural_tol) {
      throw Error(ErrorKind::SupportMismatch,
                  "level " + std::to_string(l + 1) + " support differs from e_22 of its predecessor by " +
                      std::to_string(gap));
    }
  }
  if (chain.size() == 1) return {chain.front(), chain.front().diagonal()};

  // Left factors: for each multi-index (i1..i_{L-1}), the partial isometry
  // e^(1)_{i1,2} ... e^(L-1)_{i_{L-1},2}; its adjoint supplies the right factor.
  std::vector<Matrix> left{identity(n)};
  for (std::size_t l = 0; l + 1 < chain.size(); ++l) {
    std::vector<Matrix> next;
    next.reserve(left.size() * static_cast<std::size_t>(chain[l].size()));
    for (const auto& prefix : left)
      for (int i = 0; i < chain[l].size(); ++i) next.push_back(prefix * chain[l](i, 1));
    left = std::move(next);
  }
  const MatrixUnitSystem& last = chain.back();
  const int m = last.size();
  const int k = static_cast<int>(left.size()) * m;
  std::vector<Matrix> units(static_cast<std::size_t>(k) * static_cast<std::size_t>(k));
  for (std::size_t a = 0; a < left.size(); ++a)
    for (int s = 0; s < m; ++s)
      for (std::size_t b = 0; b < left.size(); ++b)
        for (int t = 0; t < m; ++t) {
          const std::size_t row = a * static_cast<std::size_t>(m) + static_cast<std::size_t>(s);
          const std::size_t col = b * static_cast<std::size_t>(m) + static_cast<std::size_t>(t);
          units[row * static_cast<std::size_t>(k) + col] = left[a] * last(s, t) * left[b].adjoint();
        }
  MatrixUnitSystem sys(n, k, std::move(units));
  auto diag = sys.diagonal();
  return {std::move(sys), std::move(diag)};
}

}  // namespace finfactor
