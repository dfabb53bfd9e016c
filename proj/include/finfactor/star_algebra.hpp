#pragma once

// Unital *-algebras generated by finite sets of matrices, commutants, and
// span-level equality of algebras. At finite dimension the generated
// *-algebra is the von Neumann algebra A'' of the set, so these routines are
// the numerical meaning of every "generates as a von Neumann algebra" claim.

#include <Eigen/SVD>

#include <cmath>
#include <utility>
#include <vector>

#include "finfactor/matrix_core.hpp"

namespace finfactor {

namespace detail {

inline Vector vec(const Matrix& x) { return Eigen::Map<const Vector>(x.data(), x.size()); }

inline Matrix unvec(const Eigen::Ref<const Vector>& v, Eigen::Index n) {
  return Eigen::Map<const Matrix>(v.data(), n, n);
}

/// Orthonormal columns (Euclidean on vec(x), i.e. Frobenius) grown one
/// candidate at a time with classical Gram-Schmidt plus one full
/// re-orthogonalization pass.
class SpanBuilder {
 public:
  explicit SpanBuilder(Eigen::Index n) : n_(n), q_(n * n, 0) {}

  Eigen::Index size() const { return q_.cols(); }
  Eigen::Index capacity() const { return n_ * n_; }
  const Matrix& columns() const { return q_; }

  /// Residual vector of v after projecting out the current span.
  Vector residual(const Vector& v) const {
    if (q_.cols() == 0) return v;
    Vector r = v - q_ * (q_.adjoint() * v);
    r -= q_ * (q_.adjoint() * r);
    return r;
  }

  /// Admits x iff its residual exceeds rel_tol * |x|_F.
  bool add(const Matrix& x, double rel_tol) {
    if (size() >= capacity()) return false;
    const Vector v = vec(x);
    const double norm = v.norm();
    if (norm == 0.0) return false;
    Vector r = residual(v);
    const double rn = r.norm();
    if (rn <= rel_tol * norm) return false;
    q_.conservativeResize(Eigen::NoChange, q_.cols() + 1);
    q_.col(q_.cols() - 1) = r / rn;
    return true;
  }

 private:
  Eigen::Index n_;
  Matrix q_;
};

}  // namespace detail

/// A unital *-subalgebra of M_n stored as an orthonormal basis for the inner
/// product <a, b> = tau(b* a).
class AlgebraBasis {
 public:
  AlgebraBasis(Eigen::Index ambient_dim, Matrix columns)
      : n_(ambient_dim), q_(std::move(columns)) {}

  Eigen::Index ambient_dim() const { return n_; }
  Eigen::Index dim() const { return q_.cols(); }

  /// Basis element i, normalized so that tau(b* b) = 1.
  Matrix element(Eigen::Index i) const {
    return detail::unvec(q_.col(i), n_) * std::sqrt(static_cast<double>(n_));
  }

  std::vector<Matrix> elements() const {
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(dim()));
    for (Eigen::Index i = 0; i < dim(); ++i) out.push_back(element(i));
    return out;
  }

  /// Frobenius distance from x to the span.
  double residual(const Matrix& x) const {
    require_dim(x);
    const Vector v = detail::vec(x);
    if (q_.cols() == 0) return v.norm();
    Vector r = v - q_ * (q_.adjoint() * v);
    r -= q_ * (q_.adjoint() * r);
    return r.norm();
  }

  /// Orthogonal projection of x onto the span.
  Matrix project(const Matrix& x) const {
    require_dim(x);
    const Vector v = detail::vec(x);
    return detail::unvec(q_ * (q_.adjoint() * v), n_);
  }

  const Matrix& columns() const { return q_; }

 private:
  void require_dim(const Matrix& x) const {
    if (x.rows() != n_ || x.cols() != n_) {
      throw Error(ErrorKind::DimensionMismatch, "element does not live in M_" + std::to_string(n_));
    }
  }

  Eigen::Index n_;
  Matrix q_;  // n^2 x dim, Euclidean-orthonormal columns
};

namespace detail {

inline Eigen::Index common_dim(const std::vector<Matrix>& gens, Eigen::Index ambient_dim) {
  Eigen::Index n = ambient_dim;
  for (const auto& g : gens) {
    require_square(g, "generator");
    if (n == 0) n = g.rows();
    if (g.rows() != n) {
      throw Error(ErrorKind::DimensionMismatch, "generators do not share one ambient dimension");
    }
  }
  if (n == 0) {
    throw Error(ErrorKind::InvalidArgument, "ambient dimension unknown for an empty generator list");
  }
  return n;
}

/// Generators together with those adjoints that are not already (numerically)
/// the generator itself.
inline std::vector<Matrix> with_adjoints(const std::vector<Matrix>& gens, double tol) {
  std::vector<Matrix> out;
  out.reserve(2 * gens.size());
  for (const auto& g : gens) {
    out.push_back(g);
    if (self_adjoint_residual(g) > tol * std::max(1.0, g.norm())) out.push_back(g.adjoint());
  }
  return out;
}

}  // namespace detail

/// Smallest unital *-algebra containing the generators. An empty list yields
/// the scalars of M_{ambient_dim}.
///
/// The span is seeded with I and the generators (and adjoints), then closed
/// under left multiplication by every generator and adjoint: each admitted
/// basis element b contributes the candidates g b. A subspace containing I and
/// stable under left multiplication by G u G* contains every word in them, so
/// the fixed point is the generated algebra.
inline AlgebraBasis generate(const std::vector<Matrix>& generators, const Tolerances& tol = {},
                             Eigen::Index ambient_dim = 0) {
  const Eigen::Index n = detail::common_dim(generators, ambient_dim);
  const std::vector<Matrix> mult = detail::with_adjoints(generators, tol.span_tol);

  detail::SpanBuilder span(n);
  span.add(identity(n), tol.span_tol);
  for (const auto& g : mult) span.add(g, tol.span_tol);

  for (Eigen::Index next = 0; next < span.size() && span.size() < span.capacity(); ++next) {
    const Matrix b = detail::unvec(span.columns().col(next), n);
    for (const auto& g : mult) {
      span.add(g * b, tol.span_tol);
      if (span.size() == span.capacity()) break;
    }
  }
  return AlgebraBasis(n, span.columns());
}

/// All x with xg = gx and xg* = g*x for every generator g, as the joint null
/// space of the maps x -> xg - gx on the n^2-dimensional matrix space. Null
/// vectors are found by successive restriction: the null space of the first
/// map is computed by SVD, and each further map is only solved on what
/// survives.
inline AlgebraBasis commutant(const std::vector<Matrix>& generators, const Tolerances& tol = {},
                             Eigen::Index ambient_dim = 0) {
  const Eigen::Index n = detail::common_dim(generators, ambient_dim);
  const Eigen::Index n2 = n * n;
  const std::vector<Matrix> maps = detail::with_adjoints(generators, tol.span_tol);

  Matrix null = Matrix::Identity(n2, n2);
  const Matrix id = identity(n);
  for (const auto& g : maps) {
    if (null.cols() <= 1) break;  // only the scalars remain
    // vec(xg - gx) = (g^T (x) I - I (x) g) vec(x) in column-major order.
    Matrix lg(n2, n2);
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b)
        lg.block(a * n, b * n, n, n) = g(b, a) * id - (a == b ? g : Matrix::Zero(n, n));
    const Matrix restricted = lg * null;
    // JacobiSVD rather than BDCSVD: the divide-and-conquer path returned NaN
    // right vectors for maps with many repeated singular values.
    Eigen::JacobiSVD<Matrix> svd(restricted, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    // The cut is relative to the whole map (|L_g| <= 2 |g|), not to what is
    // left of it: a map that already vanishes on the survivors must not have
    // its rounding noise read as rank.
    const double cut = tol.span_tol * std::max(1.0, 2.0 * g.norm());
    // Columns of V beyond the numerical rank span the restricted null space.
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > cut) ++rank;
    const Matrix v_null = svd.matrixV().rightCols(null.cols() - rank);
    null = null * v_null;
  }
  return AlgebraBasis(n, null);
}

inline AlgebraBasis commutant(const AlgebraBasis& a, const Tolerances& tol = {}) {
  return commutant(a.elements(), tol, a.ambient_dim());
}

struct Membership {
  bool contained = false;
  double residual = 0.0;
};

/// Membership of x in span(a): residual < span_tol * max(1, |x|_F).
inline Membership contains(const AlgebraBasis& a, const Matrix& x, const Tolerances& tol = {}) {
  const double r = a.residual(x);
  return {r < tol.span_tol * std::max(1.0, x.norm()), r};
}

/// Same dimension and mutual span containment.
inline bool equal(const AlgebraBasis& a, const AlgebraBasis& b, const Tolerances& tol = {}) {
  if (a.ambient_dim() != b.ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "algebras live in different ambient dimensions");
  }
  if (a.dim() != b.dim()) return false;
  for (Eigen::Index i = 0; i < a.dim(); ++i)
    if (!contains(b, a.element(i), tol).contained) return false;
  for (Eigen::Index i = 0; i < b.dim(); ++i)
    if (!contains(a, b.element(i), tol).contained) return false;
  return true;
}

}  // namespace finfactor
