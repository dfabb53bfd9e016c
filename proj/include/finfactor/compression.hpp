#pragma once

// Cut-and-paste compression of a sparse generator tuple into one projection,
// synthesis of a self-adjoint generator pair from that projection, and fusion
// of the pair into a single generator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "finfactor/matrix_core.hpp"
#include "finfactor/matrix_units.hpp"
#include "finfactor/rational.hpp"
#include "finfactor/sparsity.hpp"
#include "finfactor/star_algebra.hpp"

namespace finfactor {

/// Triple (p, i, j) of a nonzero block e_ii x_p e_jj and the target (s, t)
/// it is moved to. All indices 0-based.
struct BlockAssignment {
  int p = 0;
  int i = 0;
  int j = 0;
  int s = 0;
  int t = 0;
};

struct CutPasteResult {
  Matrix q;
  Matrix y;  // assembled self-adjoint element after rescaling
  std::vector<BlockAssignment> assignment;
  int k = 0;
  int block_count = 0;  // |T| = c^2 k^2
  int rect = 0;         // floor(c k); rows 0..rect, columns rect+1..2 rect+1
  double c = 0.0;
  Rational index;
  Rational support_trace;
  double norm_rescale = 1.0;
  double projection_residual = 0.0;
  std::size_t tuple_size = 0;
  std::vector<std::string> labels;
  Eigen::Index dim_before = 0;  // dim of the algebra generated by xs and the units
  Eigen::Index dim_after = 0;   // dim of the algebra generated by q and the units
};

namespace detail {

inline std::int64_t isqrt(std::int64_t v) {
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

/// c <= 1/2 - 1/k with c^2 = count / k^2, i.e. 4 count <= (k - 2)^2.
inline bool index_admissible(std::int64_t count, std::int64_t k) {
  return k >= 2 && 4 * count <= (k - 2) * (k - 2);
}

/// support_count / k <= 2c + 2/k, i.e. support_count - 2 <= 2 sqrt(count).
inline bool support_bound_holds(std::int64_t support_count, std::int64_t count) {
  const std::int64_t lhs = support_count - 2;
  return lhs <= 0 || lhs * lhs <= 4 * count;
}

/// The units enter generation through their shift pair, which generates the
/// same algebra as the whole system and keeps the closure cheap.
inline std::vector<Matrix> with_units(std::vector<Matrix> gens, const MatrixUnitSystem& sys) {
  if (sys.size() >= 2) {
    auto [e11, shift] = shift_pair(sys);
    gens.push_back(std::move(e11));
    gens.push_back(std::move(shift));
  } else {
    gens.push_back(sys(0, 0));
  }
  return gens;
}

inline void require_full(const MatrixUnitSystem& sys, const Tolerances& tol) {
  const UnitSystemReport rep = verify(sys, tol);
  if (!rep.pass || !rep.full) {
    throw Error(ErrorKind::InvalidArgument, "a full system of matrix units (sum e_jj = I) is required");
  }
}

}  // namespace detail

/// Relocate every nonzero block e_ii x_p e_jj to e_{s i} x_p e_{j t} inside the
/// rectangle s <= floor(ck), floor(ck) + 1 <= t <= 2 floor(ck) + 1, assemble
/// the self-adjoint y, rescale to |y| <= 1 and form
///   q = 1/2 q1 (1 + (1 - y^2)^{1/2}) q1 + 1/2 y + 1/2 q2 (1 - (1 - y^2)^{1/2}) q2.
/// Triples are ordered by (p, i, j) and fill targets row-major. The result is
/// checked to be a projection within the support bound that generates, with
/// the units, the same algebra as the tuple.
inline CutPasteResult cut_and_paste(const GeneratorTuple& xs, const MatrixUnitSystem& sys,
                                    const Tolerances& tol = {}) {
  detail::require_full(sys, tol);
  if (xs.size() > 0 && xs.ambient_dim() != sys.ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "tuple and units live in different dimensions");
  }
  const Eigen::Index n = sys.ambient_dim();
  const int k = sys.size();
  const ProjectionFamily fam = unit_family(sys, tol);
  const SparsityReport rep = interaction_index(xs, fam, tol);

  CutPasteResult res;
  res.k = k;
  res.block_count = rep.count;
  res.index = rep.index;
  res.c = std::sqrt(static_cast<double>(rep.count)) / k;
  res.tuple_size = xs.size();
  res.labels = xs.labels;
  if (!detail::index_admissible(rep.count, k)) {
    throw Error(ErrorKind::IndexTooLarge, "index " + rep.index.str() + " gives c = " + std::to_string(res.c) +
                                              " > 1/2 - 1/" + std::to_string(k));
  }
  res.rect = static_cast<int>(detail::isqrt(rep.count));
  const int side = res.rect + 1;

  Matrix y = Matrix::Zero(n, n);
  int slot = 0;
  for (std::size_t p = 0; p < xs.size(); ++p)
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        if (!rep.patterns[p](i, j)) continue;
        const BlockAssignment a{static_cast<int>(p), i, j, slot / side, side + slot % side};
        ++slot;
        const Matrix piece = sys(a.s, i) * xs.elements[p] * sys(j, a.t);
        y += piece + piece.adjoint();
        res.assignment.push_back(a);
      }

  res.norm_rescale = std::max(1.0, operator_norm(y));
  y /= res.norm_rescale;

  Matrix q1 = Matrix::Zero(n, n);
  Matrix q2 = Matrix::Zero(n, n);
  for (int s = 0; s < side; ++s) q1 += sys(s, s);
  for (int t = side; t < 2 * side; ++t) q2 += sys(t, t);
  const Matrix root = hermitian_function(y, [](double v) { return std::sqrt(std::max(0.0, 1.0 - v * v)); }, tol);
  const Matrix id = identity(n);
  Matrix q = 0.5 * q1 * (id + root) * q1 + 0.5 * y + 0.5 * q2 * (id - root) * q2;

  const StructuralFlags flags = structural_checks(q, tol);
  res.projection_residual = std::max(flags.idempotent_residual, flags.self_adjoint_residual);
  if (!flags.projection) {
    throw Error(ErrorKind::NumericalFailure, "q is not a projection; residual " +
                                                 std::to_string(res.projection_residual));
  }
  const SupportResult supp = support(q, fam, tol);
  res.support_trace = supp.trace;
  const auto support_count = std::count(supp.members.begin(), supp.members.end(), true);
  if (!detail::support_bound_holds(support_count, rep.count)) {
    throw Error(ErrorKind::NumericalFailure, "support trace " + supp.trace.str() + " exceeds 2c + 2/k");
  }

  const AlgebraBasis before = generate(detail::with_units(xs.elements, sys), tol, n);
  const AlgebraBasis after = generate(detail::with_units({q}, sys), tol, n);
  res.dim_before = before.dim();
  res.dim_after = after.dim();
  if (!equal(before, after, tol)) {
    throw Error(ErrorKind::NumericalFailure, "algebra generated by q and the units (dim " +
                                                 std::to_string(after.dim()) + ") differs from the input's (dim " +
                                                 std::to_string(before.dim()) + ")");
  }

  res.q = std::move(q);
  res.y = std::move(y);
  return res;
}

/// Undo the relocation: 2 q1 q q2 = q1 y q2 holds every moved block at its
/// target; e_{i s} (.) e_{t j} moves it back, and the recorded rescale factor
/// restores the original scale.
inline GeneratorTuple recover_elements(const CutPasteResult& res, const MatrixUnitSystem& sys) {
  const int k = sys.size();
  const int side = res.rect + 1;
  if (res.k != k || res.q.rows() != sys.ambient_dim()) {
    throw Error(ErrorKind::InconsistentAssignment, "result was produced for a different unit system");
  }
  std::set<std::pair<int, int>> targets;
  for (const auto& a : res.assignment) {
    const bool in_range = a.p >= 0 && static_cast<std::size_t>(a.p) < res.tuple_size && a.i >= 0 && a.i < k &&
                          a.j >= 0 && a.j < k && a.s >= 0 && a.s < side && a.t >= side && a.t < 2 * side &&
                          2 * side <= k;
    if (!in_range) throw Error(ErrorKind::InconsistentAssignment, "assignment entry outside its ranges");
    if (!targets.insert({a.s, a.t}).second) {
      throw Error(ErrorKind::InconsistentAssignment, "assignment is not injective");
    }
  }
  const Eigen::Index n = sys.ambient_dim();
  Matrix q1 = Matrix::Zero(n, n);
  Matrix q2 = Matrix::Zero(n, n);
  for (int s = 0; s < side && s < k; ++s) q1 += sys(s, s);
  for (int t = side; t < 2 * side && t < k; ++t) q2 += sys(t, t);
  const Matrix moved = 2.0 * q1 * res.q * q2;

  std::vector<Matrix> xs(res.tuple_size, Matrix::Zero(n, n));
  for (const auto& a : res.assignment) {
    xs[static_cast<std::size_t>(a.p)] += res.norm_rescale * sys(a.i, a.s) * moved * sys(a.t, a.j);
  }
  return GeneratorTuple(std::move(xs), res.labels);
}

struct GeneratorPair {
  Matrix x1;  // e_11 + 2q in the relabeled system
  Matrix x2;  // shift of the relabeled system
  MatrixUnitSystem units;
  int free_block = 0;  // original index moved to position 0
  Rational support_trace;
};

/// x1 = e_11 + 2q and x2 = sum_i (e_{i,i+1} + h.c.) after cyclically relabeling
/// the system so that the first diagonal unit disjoint from q's support sits
/// at index 0. The spectral projections of x1 at 1 and 2 are e_11 and q.
inline GeneratorPair single_generator_pair(const Matrix& q, const MatrixUnitSystem& sys,
                                           const Tolerances& tol = {}) {
  detail::require_full(sys, tol);
  require_square(q, "q");
  if (q.rows() != sys.ambient_dim()) throw Error(ErrorKind::DimensionMismatch, "q and units differ in dimension");
  if (sys.size() < 2) throw Error(ErrorKind::SystemTooSmall, "need k >= 2");
  if (!structural_checks(q, tol).projection) throw Error(ErrorKind::InvalidArgument, "q is not a projection");
  const ProjectionFamily fam = unit_family(sys, tol);
  const SupportResult supp = support(q, fam, tol);
  const int k = sys.size();
  int free_block = -1;
  for (int j = 0; j < k && free_block < 0; ++j)
    if (!supp.members[static_cast<std::size_t>(j)]) free_block = j;
  if (free_block < 0) {
    throw Error(ErrorKind::SupportTooLarge, "support of q (trace " + supp.trace.str() + ") meets every diagonal unit");
  }
  std::vector<int> perm(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) perm[static_cast<std::size_t>(i)] = (i + free_block) % k;
  MatrixUnitSystem relabeled = sys.relabeled(perm);
  auto [e11, shift] = shift_pair(relabeled);
  Matrix x1 = e11 + 2.0 * q;
  return {std::move(x1), std::move(shift), std::move(relabeled), free_block, supp.trace};
}

/// a = x1 + i x2; then x1 = (a + a*)/2 and x2 = (a - a*)/(2i).
inline Matrix fuse(const Matrix& x1, const Matrix& x2, const Tolerances& tol = {}) {
  require_same_dim(x1, x2);
  for (const Matrix* x : {&x1, &x2}) {
    if (!structural_checks(*x, tol).self_adjoint) {
      throw Error(ErrorKind::NotSelfAdjoint, "fuse needs self-adjoint inputs");
    }
  }
  return x1 + Complex(0.0, 1.0) * x2;
}

struct StageReport {
  std::string name;
  double c = 0.0;
  double limit = 0.0;
  Rational support_trace;
  Eigen::Index dim_before = 0;
  Eigen::Index dim_after = 0;
  bool ok = false;
  std::string note;
};

struct PipelineReport {
  std::vector<StageReport> stages;
  Matrix final_element;
  std::optional<CutPasteResult> compression;
  std::optional<GeneratorPair> pair;
  bool ok = false;
};

/// Compression, synthesis and fusion in sequence with every bound and algebra
/// dimension recorded. Stage failures are rethrown with the stage name.
inline PipelineReport pipeline(const GeneratorTuple& xs, const MatrixUnitSystem& sys, const Tolerances& tol = {}) {
  PipelineReport rep;
  const int k = sys.size();
  std::string stage = "compress";
  try {
    CutPasteResult cut = cut_and_paste(xs, sys, tol);
    StageReport s1{stage, cut.c, 0.5 - 1.0 / k, cut.support_trace, cut.dim_before, cut.dim_after, true,
                   "2c + 2/k = " + std::to_string(2.0 * cut.c + 2.0 / k)};
    rep.stages.push_back(s1);

    stage = "synthesize";
    GeneratorPair pair = single_generator_pair(cut.q, sys, tol);
    const AlgebraBasis with_q = generate(detail::with_units({cut.q}, sys), tol, sys.ambient_dim());
    const AlgebraBasis from_pair = generate({pair.x1, pair.x2}, tol, sys.ambient_dim());
    // tau(S(q)) < 1 - 1/k  <=>  support_count < k - 1
    const bool slack = pair.support_trace < Rational(k - 1, k);
    StageReport s2{stage, cut.c, 1.0 - 1.0 / k, pair.support_trace, with_q.dim(), from_pair.dim(),
                   equal(with_q, from_pair, tol),
                   std::string("tau(S(q)) < 1 - 1/k: ") + (slack ? "yes" : "no") +
                       "; free block " + std::to_string(pair.free_block + 1)};
    rep.stages.push_back(s2);
    if (!s2.ok) throw Error(ErrorKind::NumericalFailure, "synthesized pair does not generate the algebra of q and units");

    stage = "fuse";
    Matrix a = fuse(pair.x1, pair.x2, tol);
    const AlgebraBasis single = generate({a}, tol, sys.ambient_dim());
    StageReport s3{stage, cut.c, 0.0, pair.support_trace, from_pair.dim(), single.dim(),
                   equal(from_pair, single, tol), "a = x1 + i x2"};
    rep.stages.push_back(s3);
    if (!s3.ok) throw Error(ErrorKind::NumericalFailure, "fused element does not generate the pair's algebra");

    rep.final_element = std::move(a);
    rep.compression = std::move(cut);
    rep.pair = std::move(pair);
    rep.ok = true;
  } catch (const Error& e) {
    throw Error(e.kind(), "stage " + stage + ": " + e.detail());
  }
  return rep;
}

}  // namespace finfactor
