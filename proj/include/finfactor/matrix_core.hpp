#pragma once

// Dense complex matrices, the normalized trace, and Hermitian functional
// calculus. Everything else in the library is built on these few routines.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <string>

#include "finfactor/error.hpp"

namespace finfactor {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr Eigen::Index kDefaultDimCap = 256;

/// Ambient-dimension cap; FINFACTOR_DIM_CAP overrides the default of 256.
inline Eigen::Index dim_cap() {
  if (const char* env = std::getenv("FINFACTOR_DIM_CAP")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<Eigen::Index>(v);
  }
  return kDefaultDimCap;
}

struct Tolerances {
  double zero_block_eta = 1e-10;  // relative Frobenius threshold for a zero block
  double structural_tol = 1e-8;   // projection / unitary / self-adjoint residuals
  double span_tol = 1e-8;         // span membership residual

  void validate() const {
    auto in_unit = [](double v) { return v > 0.0 && v < 1.0; };
    if (!in_unit(zero_block_eta) || !in_unit(structural_tol) || !in_unit(span_tol)) {
      throw Error(ErrorKind::InvalidArgument, "tolerances must lie strictly between 0 and 1");
    }
  }
};

inline void require_square(const Matrix& x, const char* what = "matrix") {
  if (x.rows() != x.cols() || x.rows() < 1) {
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + " must be square with dim >= 1");
  }
}

inline void require_same_dim(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::DimensionMismatch,
                "dimension " + std::to_string(a.rows()) + " vs " + std::to_string(b.rows()));
  }
}

inline bool all_finite(const Matrix& x) {
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      if (!std::isfinite(x(i, j).real()) || !std::isfinite(x(i, j).imag())) return false;
  return true;
}

/// tau(x) = Tr(x) / n.
inline Complex normalized_trace(const Matrix& x) {
  return x.trace() / static_cast<double>(x.rows());
}

inline Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

/// Elementary matrix unit e_ij (0-based indices).
inline Matrix unit(Eigen::Index n, Eigen::Index i, Eigen::Index j) {
  Matrix e = Matrix::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

inline double frobenius(const Matrix& x) { return x.norm(); }

inline double self_adjoint_residual(const Matrix& x) { return (x - x.adjoint()).norm(); }

/// Largest singular value.
inline double operator_norm(const Matrix& x) {
  if (x.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(x);
  return svd.singularValues()(0);
}

/// f(x) for self-adjoint x via its spectral decomposition. Small drift from
/// self-adjointness (within structural_tol relative to max(1, |x|_F)) is
/// removed by symmetrizing first.
inline Matrix hermitian_function(const Matrix& x, const std::function<double(double)>& f,
                                 const Tolerances& tol = {}) {
  require_square(x);
  const double residual = self_adjoint_residual(x);
  if (residual > tol.structural_tol * std::max(1.0, frobenius(x))) {
    throw Error(ErrorKind::NotSelfAdjoint, "residual " + std::to_string(residual));
  }
  const Matrix h = 0.5 * (x + x.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericalFailure, "eigendecomposition did not converge");
  }
  Eigen::VectorXd fv(eig.eigenvalues().size());
  for (Eigen::Index i = 0; i < fv.size(); ++i) fv(i) = f(eig.eigenvalues()(i));
  const Matrix& v = eig.eigenvectors();
  Matrix out = v * fv.cast<Complex>().asDiagonal() * v.adjoint();
  return 0.5 * (out + out.adjoint());
}

/// Ascending eigenvalues of a self-adjoint matrix (symmetrized first).
inline Eigen::VectorXd hermitian_spectrum(const Matrix& x) {
  const Matrix h = 0.5 * (x + x.adjoint());
  return Eigen::SelfAdjointEigenSolver<Matrix>(h, Eigen::EigenvaluesOnly).eigenvalues();
}

/// Kronecker product a (x) b; index (i, s) maps to i * dim(b) + s.
inline Matrix tensor_product(const Matrix& a, const Matrix& b) {
  const Eigen::Index n = a.rows() * b.rows();
  if (n > dim_cap()) {
    throw Error(ErrorKind::DimensionOverflow,
                "tensor dimension " + std::to_string(n) + " exceeds cap " + std::to_string(dim_cap()));
  }
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Block-diagonal a (+) b.
inline Matrix direct_sum(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

struct StructuralFlags {
  bool self_adjoint = false;
  bool projection = false;
  bool unitary = false;
  double self_adjoint_residual = 0.0;
  double idempotent_residual = 0.0;
  double unitary_residual = 0.0;
};

inline StructuralFlags structural_checks(const Matrix& x, const Tolerances& tol = {}) {
  require_square(x);
  StructuralFlags f;
  f.self_adjoint_residual = self_adjoint_residual(x);
  f.idempotent_residual = (x * x - x).norm();
  f.unitary_residual = (x.adjoint() * x - identity(x.rows())).norm();
  f.self_adjoint = f.self_adjoint_residual < tol.structural_tol;
  f.projection = f.self_adjoint && f.idempotent_residual < tol.structural_tol;
  f.unitary = f.unitary_residual < tol.structural_tol;
  return f;
}

}  // namespace finfactor
