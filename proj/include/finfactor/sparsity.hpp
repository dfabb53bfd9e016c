#pragma once

// Block-interaction sparsity of generator tuples relative to families of
// equal-trace orthogonal projections: block patterns, the interaction index
// (fraction of nonzero blocks, summed over the tuple), supports, refinement,
// heuristic minimization over families, direct-sum combination, family
// alignment and the truncated hyperfinite generator pair.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "finfactor/matrix_core.hpp"
#include "finfactor/matrix_units.hpp"
#include "finfactor/random.hpp"
#include "finfactor/rational.hpp"

namespace finfactor {

/// k mutually orthogonal projections of normalized trace 1/k summing to I.
class ProjectionFamily {
 public:
  explicit ProjectionFamily(std::vector<Matrix> projections, std::string id = "custom",
                            const Tolerances& tol = {})
      : projections_(std::move(projections)), id_(std::move(id)) {
    if (projections_.empty()) throw Error(ErrorKind::InvalidArgument, "empty projection family");
    n_ = projections_.front().rows();
    const int k = size();
    Matrix sum = Matrix::Zero(n_, n_);
    for (int i = 0; i < k; ++i) {
      const Matrix& p = projections_[static_cast<std::size_t>(i)];
      require_square(p, "family member");
      if (p.rows() != n_) throw Error(ErrorKind::DimensionMismatch, "family members differ in dimension");
      if (!structural_checks(p, tol).projection) {
        throw Error(ErrorKind::InvalidArgument, "family member " + std::to_string(i + 1) + " is not a projection");
      }
      if (std::abs(normalized_trace(p).real() - 1.0 / k) > tol.structural_tol) {
        throw Error(ErrorKind::RankMismatch, "family member " + std::to_string(i + 1) + " does not have trace 1/k");
      }
      sum += p;
    }
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j)
        if ((projections_[static_cast<std::size_t>(i)] * projections_[static_cast<std::size_t>(j)]).norm() >
            tol.structural_tol) {
          throw Error(ErrorKind::InvalidArgument, "family members are not mutually orthogonal");
        }
    if ((sum - identity(n_)).norm() > tol.structural_tol) {
      throw Error(ErrorKind::InvalidArgument, "family does not sum to the identity");
    }
  }

  int size() const { return static_cast<int>(projections_.size()); }
  Eigen::Index ambient_dim() const { return n_; }
  const Matrix& operator[](int j) const { return projections_[static_cast<std::size_t>(j)]; }
  const std::vector<Matrix>& projections() const { return projections_; }
  const std::string& id() const { return id_; }

 private:
  std::vector<Matrix> projections_;
  Eigen::Index n_ = 0;
  std::string id_;
};

/// Projections onto basis columns grouped by `groups[i]` in {0..k-1}.
inline ProjectionFamily grouped_family(const Matrix& basis, const std::vector<int>& groups, int k,
                                       std::string id, const Tolerances& tol = {}) {
  const Eigen::Index n = basis.rows();
  std::vector<Matrix> ps(static_cast<std::size_t>(k), Matrix::Zero(n, n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector w = basis.col(i);
    ps[static_cast<std::size_t>(groups[static_cast<std::size_t>(i)])] += w * w.adjoint();
  }
  return ProjectionFamily(std::move(ps), std::move(id), tol);
}

inline std::string join_groups(const std::vector<int>& groups) {
  std::string s;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(groups[i]);
  }
  return s;
}

/// Contiguous coordinate blocks of size n/k: p_j = sum of e_ii over block j.
inline ProjectionFamily diagonal_family(Eigen::Index n, int k) {
  if (k < 1 || n % k != 0) {
    throw Error(ErrorKind::NotDivisible, "k=" + std::to_string(k) + " does not divide n=" + std::to_string(n));
  }
  std::vector<int> groups(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) groups[static_cast<std::size_t>(i)] = static_cast<int>(i / (n / k));
  return grouped_family(identity(n), groups, k, "standard;groups=" + join_groups(groups));
}

/// The diagonal units of a full matrix-unit system as a family.
inline ProjectionFamily unit_family(const MatrixUnitSystem& sys, const Tolerances& tol = {}) {
  return ProjectionFamily(sys.diagonal(), "units", tol);
}

struct GeneratorTuple {
  std::vector<Matrix> elements;
  std::vector<std::string> labels;

  GeneratorTuple() = default;
  explicit GeneratorTuple(std::vector<Matrix> xs, std::vector<std::string> names = {})
      : elements(std::move(xs)), labels(std::move(names)) {
    if (labels.empty())
      for (std::size_t i = 0; i < elements.size(); ++i) labels.push_back("x" + std::to_string(i + 1));
    if (labels.size() != elements.size()) throw Error(ErrorKind::SizeMismatch, "one label per element");
    for (const auto& x : elements) {
      require_square(x, "tuple element");
      if (x.rows() != elements.front().rows()) {
        throw Error(ErrorKind::DimensionMismatch, "tuple elements differ in dimension");
      }
    }
  }

  std::size_t size() const { return elements.size(); }
  Eigen::Index ambient_dim() const { return elements.empty() ? 0 : elements.front().rows(); }
};

/// Bit (i, j) set iff p_i x p_j is nonzero at the threshold.
class BlockPattern {
 public:
  explicit BlockPattern(int k) : k_(k), bits_(static_cast<std::size_t>(k * k), 0) {}

  int size() const { return k_; }
  bool operator()(int i, int j) const { return bits_[index(i, j)] != 0; }
  void set(int i, int j, bool v = true) { bits_[index(i, j)] = v ? 1 : 0; }
  int count() const { return static_cast<int>(std::count(bits_.begin(), bits_.end(), 1)); }

  BlockPattern transposed() const {
    BlockPattern t(k_);
    for (int i = 0; i < k_; ++i)
      for (int j = 0; j < k_; ++j) t.set(j, i, (*this)(i, j));
    return t;
  }

  bool is_diagonal() const {
    for (int i = 0; i < k_; ++i)
      for (int j = 0; j < k_; ++j)
        if (i != j && (*this)(i, j)) return false;
    return true;
  }

  std::vector<std::string> rows() const {
    std::vector<std::string> out;
    for (int i = 0; i < k_; ++i) {
      std::string r;
      for (int j = 0; j < k_; ++j) r += (*this)(i, j) ? '1' : '0';
      out.push_back(std::move(r));
    }
    return out;
  }

  friend bool operator==(const BlockPattern&, const BlockPattern&) = default;

 private:
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i * k_ + j); }
  int k_;
  std::vector<std::uint8_t> bits_;
};

namespace detail {

inline void require_family_dim(const Matrix& x, const ProjectionFamily& fam) {
  if (x.rows() != fam.ambient_dim() || x.cols() != fam.ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "element and family live in different dimensions");
  }
}

}  // namespace detail

/// Nonzero means |p_i x p_j|_F > zero_block_eta * |x|_F; the zero matrix has
/// the empty pattern.
inline BlockPattern block_pattern(const Matrix& x, const ProjectionFamily& fam, const Tolerances& tol = {}) {
  detail::require_family_dim(x, fam);
  const int k = fam.size();
  BlockPattern pat(k);
  const double scale = x.norm();
  if (scale == 0.0) return pat;
  const double cut = tol.zero_block_eta * scale;
  for (int j = 0; j < k; ++j) {
    const Matrix xp = x * fam[j];
    for (int i = 0; i < k; ++i) pat.set(i, j, (fam[i] * xp).norm() > cut);
  }
  return pat;
}

struct SupportResult {
  Matrix projection;
  std::vector<bool> members;  // which family projections are included
  Rational trace;
};

/// Join of the family projections p_j with p_j x != 0 or x p_j != 0.
inline SupportResult support(const Matrix& x, const ProjectionFamily& fam, const Tolerances& tol = {}) {
  detail::require_family_dim(x, fam);
  const int k = fam.size();
  SupportResult s{Matrix::Zero(x.rows(), x.cols()), std::vector<bool>(static_cast<std::size_t>(k), false), {}};
  const double scale = x.norm();
  int count = 0;
  if (scale > 0.0) {
    const double cut = tol.zero_block_eta * scale;
    for (int j = 0; j < k; ++j) {
      if ((fam[j] * x).norm() > cut || (x * fam[j]).norm() > cut) {
        s.members[static_cast<std::size_t>(j)] = true;
        s.projection += fam[j];
        ++count;
      }
    }
  }
  s.trace = Rational(count, k);
  return s;
}

struct SparsityReport {
  std::vector<BlockPattern> patterns;
  std::vector<std::string> labels;
  int count = 0;       // total nonzero blocks over the tuple
  int k = 0;
  Rational index;      // count / k^2
  Rational support_trace;
  std::vector<bool> support_members;
  std::string family_id;
  double eta = 0.0;
};

/// I(x_1..x_n; F) = sum_m |pattern(x_m)| / k^2, exact.
inline SparsityReport interaction_index(const GeneratorTuple& xs, const ProjectionFamily& fam,
                                        const Tolerances& tol = {}) {
  SparsityReport r;
  r.k = fam.size();
  r.labels = xs.labels;
  r.family_id = fam.id();
  r.eta = tol.zero_block_eta;
  r.support_members.assign(static_cast<std::size_t>(r.k), false);
  for (const auto& x : xs.elements) {
    r.patterns.push_back(block_pattern(x, fam, tol));
    r.count += r.patterns.back().count();
    const SupportResult s = support(x, fam, tol);
    for (int j = 0; j < r.k; ++j)
      if (s.members[static_cast<std::size_t>(j)]) r.support_members[static_cast<std::size_t>(j)] = true;
  }
  r.index = Rational(r.count, static_cast<std::int64_t>(r.k) * r.k);
  r.support_trace = Rational(std::count(r.support_members.begin(), r.support_members.end(), true), r.k);
  return r;
}

inline Rational interaction_index(const Matrix& x, const ProjectionFamily& fam, const Tolerances& tol = {}) {
  const int k = fam.size();
  return Rational(block_pattern(x, fam, tol).count(), static_cast<std::int64_t>(k) * k);
}

namespace detail {

inline int projection_rank(const Matrix& p) {
  return static_cast<int>(std::lround(p.trace().real()));
}

/// Orthonormal basis of the range of a projection: pivoted Gram-Schmidt on
/// its columns, always taking the column with the largest remaining norm
/// (ties go to the lowest column index). For coordinate projections this
/// returns the coordinate vectors in increasing order.
inline Matrix range_basis(const Matrix& p) {
  const int rank = projection_rank(p);
  const Eigen::Index n = p.rows();
  Matrix basis(n, rank);
  Matrix work = p;
  for (int r = 0; r < rank; ++r) {
    Eigen::Index best = 0;
    double best_norm = -1.0;
    for (Eigen::Index c = 0; c < n; ++c) {
      const double cn = work.col(c).norm();
      if (cn > best_norm * (1.0 + 1e-12)) {
        best_norm = cn;
        best = c;
      }
    }
    if (best_norm <= 1e-12) throw Error(ErrorKind::NumericalFailure, "projection rank deficient");
    Vector v = work.col(best) / best_norm;
    for (int s = 0; s < r; ++s) v -= basis.col(s) * (basis.col(s).dot(v));
    v /= v.norm();
    basis.col(r) = v;
    work -= v * (v.adjoint() * work);
  }
  return basis;
}

}  // namespace detail

/// Split every p_j into r orthogonal subprojections of equal trace; the
/// children of p_j occupy positions j*r .. j*r + r - 1.
inline ProjectionFamily refine(const ProjectionFamily& fam, int r, const Tolerances& tol = {}) {
  if (r < 1) throw Error(ErrorKind::InvalidArgument, "refinement factor must be >= 1");
  if (r == 1) return fam;
  std::vector<Matrix> children;
  for (int j = 0; j < fam.size(); ++j) {
    const int rank = detail::projection_rank(fam[j]);
    if (rank % r != 0) {
      throw Error(ErrorKind::NotDivisible,
                  "rank " + std::to_string(rank) + " of member " + std::to_string(j + 1) +
                      " is not divisible by " + std::to_string(r));
    }
    const Matrix basis = detail::range_basis(fam[j]);
    const int chunk = rank / r;
    for (int c = 0; c < r; ++c) {
      const Matrix v = basis.middleCols(c * chunk, chunk);
      children.push_back(v * v.adjoint());
    }
  }
  return ProjectionFamily(std::move(children), fam.id() + ";refined=" + std::to_string(r), tol);
}

// ---------------------------------------------------------------------------
// Heuristic minimization of the index over equal-trace families.

enum class Strategy { DiagonalGrouping, UnitaryLocalSearch, Combined };

inline Strategy parse_strategy(std::string_view s) {
  if (s == "diagonal_grouping") return Strategy::DiagonalGrouping;
  if (s == "unitary_local_search") return Strategy::UnitaryLocalSearch;
  if (s == "combined") return Strategy::Combined;
  throw Error(ErrorKind::UnknownStrategy, std::string(s));
}

inline std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::DiagonalGrouping: return "diagonal_grouping";
    case Strategy::UnitaryLocalSearch: return "unitary_local_search";
    case Strategy::Combined: return "combined";
  }
  return "";
}

struct MinimizeOptions {
  Strategy strategy = Strategy::DiagonalGrouping;
  int restarts = 16;
  std::uint64_t seed = 1;
  int perturbation_steps = 64;
};

struct MinimizeResult {
  ProjectionFamily family;
  SparsityReport report;
  std::vector<int> groups;  // grouping of the basis columns that produced `family`
  Matrix basis;             // unitary whose columns were grouped
};

namespace detail {

/// Block counts of a tuple for groupings of a fixed orthonormal basis. In that
/// basis |p_a x p_b|_F^2 is the sum of |x_ij|^2 over i in a, j in b.
class GroupingObjective {
 public:
  GroupingObjective(const GeneratorTuple& xs, const Matrix& basis, int k, double eta) : k_(k) {
    n_ = basis.rows();
    for (const auto& x : xs.elements) {
      const Matrix rotated = basis.adjoint() * x * basis;
      weights_.push_back(rotated.cwiseAbs2());
      const double scale = x.norm();
      cuts_.push_back(scale == 0.0 ? -1.0 : eta * eta * scale * scale);
    }
  }

  int count(const std::vector<int>& groups) const {
    int total = 0;
    Eigen::MatrixXd sums(k_, k_);
    for (std::size_t m = 0; m < weights_.size(); ++m) {
      if (cuts_[m] < 0.0) continue;
      sums.setZero();
      const Eigen::MatrixXd& w = weights_[m];
      for (Eigen::Index j = 0; j < n_; ++j) {
        const int gj = groups[static_cast<std::size_t>(j)];
        if (gj < 0) continue;
        for (Eigen::Index i = 0; i < n_; ++i) {
          const int gi = groups[static_cast<std::size_t>(i)];
          if (gi >= 0) sums(gi, gj) += w(i, j);
        }
      }
      total += static_cast<int>((sums.array() > cuts_[m]).count());
    }
    return total;
  }

  int k() const { return k_; }
  Eigen::Index n() const { return n_; }

 private:
  int k_;
  Eigen::Index n_ = 0;
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<double> cuts_;
};

/// Relabel groups in order of first appearance.
inline std::vector<int> canonical(const std::vector<int>& groups, int k) {
  std::vector<int> map(static_cast<std::size_t>(k), -1);
  std::vector<int> out(groups.size());
  int next = 0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    int& m = map[static_cast<std::size_t>(groups[i])];
    if (m < 0) m = next++;
    out[i] = m;
  }
  return out;
}

inline std::vector<int> contiguous_groups(Eigen::Index n, int k) {
  std::vector<int> g(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = static_cast<int>(i / (n / k));
  return g;
}

inline std::vector<int> random_groups(Eigen::Index n, int k, Rng& rng) {
  std::vector<int> g = contiguous_groups(n, k);
  std::shuffle(g.begin(), g.end(), rng);
  return g;
}

/// Each index in turn joins the non-full group that adds the fewest blocks
/// among the indices placed so far.
inline std::vector<int> greedy_groups(const GroupingObjective& obj) {
  const Eigen::Index n = obj.n();
  const int k = obj.k();
  const Eigen::Index cap = n / k;
  std::vector<Eigen::Index> fill(static_cast<std::size_t>(k), 0);
  std::vector<int> placed(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    int best_group = -1;
    int best_count = 0;
    for (int g = 0; g < k; ++g) {
      if (fill[static_cast<std::size_t>(g)] >= cap) continue;
      placed[static_cast<std::size_t>(i)] = g;
      const int c = obj.count(placed);
      if (best_group < 0 || c < best_count) {
        best_group = g;
        best_count = c;
      }
    }
    placed[static_cast<std::size_t>(i)] = best_group;
    ++fill[static_cast<std::size_t>(best_group)];
  }
  return placed;
}

/// First-improvement pairwise swaps until no swap lowers the count.
inline int swap_descent(const GroupingObjective& obj, std::vector<int>& groups) {
  int current = obj.count(groups);
  const std::size_t n = groups.size();
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t a = 0; a < n && !improved; ++a)
      for (std::size_t b = a + 1; b < n && !improved; ++b) {
        if (groups[a] == groups[b]) continue;
        std::swap(groups[a], groups[b]);
        const int c = obj.count(groups);
        if (c < current) {
          current = c;
          improved = true;
        } else {
          std::swap(groups[a], groups[b]);
        }
      }
  }
  return current;
}

struct Candidate {
  int count = 0;
  int basis_rank = 0;  // position of the basis in the seed list; earlier wins ties
  std::vector<int> groups;
  Matrix basis;
  std::string basis_name;

  bool better_than(const Candidate& o) const {
    if (count != o.count) return count < o.count;
    if (basis_rank != o.basis_rank) return basis_rank < o.basis_rank;
    return groups < o.groups;
  }
};

inline Matrix eigenbasis(const Matrix& h) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (h + h.adjoint())).eigenvectors();
}

}  // namespace detail

/// Certified upper bound for the infimum of the index over rank-(n/k)
/// families. The standard contiguous family is always a seed, so the result
/// never exceeds its index. Deterministic for a fixed seed.
inline MinimizeResult minimize_index(const GeneratorTuple& xs, int k, const MinimizeOptions& opt = {},
                                     const Tolerances& tol = {}) {
  const Eigen::Index n = xs.ambient_dim();
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "empty tuple");
  if (k < 1 || n % k != 0) {
    throw Error(ErrorKind::NotDivisible, "k=" + std::to_string(k) + " does not divide n=" + std::to_string(n));
  }
  Rng rng(opt.seed);

  std::vector<std::pair<std::string, Matrix>> bases{{"standard", identity(n)}};
  if (opt.strategy != Strategy::DiagonalGrouping) {
    for (std::size_t m = 0; m < xs.size(); ++m) {
      const Matrix& x = xs.elements[m];
      bases.emplace_back("eig(re " + xs.labels[m] + ")", detail::eigenbasis(x));
      const Matrix im = (x - x.adjoint()) / Complex(0.0, 2.0);
      if (im.norm() > tol.structural_tol * std::max(1.0, x.norm())) {
        bases.emplace_back("eig(im " + xs.labels[m] + ")", detail::eigenbasis(im));
      }
    }
  }

  detail::Candidate best;
  bool have_best = false;
  auto consider = [&](detail::Candidate c) {
    c.groups = detail::canonical(c.groups, k);
    if (!have_best || c.better_than(best)) {
      best = std::move(c);
      have_best = true;
    }
  };

  const bool search_groups = opt.strategy != Strategy::UnitaryLocalSearch;
  for (std::size_t b = 0; b < bases.size(); ++b) {
    const auto& [name, basis] = bases[b];
    const detail::GroupingObjective obj(xs, basis, k, tol.zero_block_eta);
    std::vector<int> seed_groups = detail::contiguous_groups(n, k);
    consider({obj.count(seed_groups), static_cast<int>(b), seed_groups, basis, name});
    if (!search_groups) continue;
    std::vector<std::vector<int>> starts{seed_groups, detail::greedy_groups(obj)};
    for (int r = 0; r < opt.restarts; ++r) starts.push_back(detail::random_groups(n, k, rng));
    for (auto& g : starts) {
      const int c = detail::swap_descent(obj, g);
      consider({c, static_cast<int>(b), g, basis, name});
    }
  }

  if (opt.strategy != Strategy::DiagonalGrouping) {
    // Small random unitary moves applied to the best basis so far, keeping
    // its grouping; only strict improvements are accepted.
    static constexpr double kScales[] = {0.3, 0.1, 0.03};
    detail::Candidate current = best;
    for (int step = 0; step < opt.perturbation_steps; ++step) {
      const double eps = kScales[step % 3];
      const Matrix trial_basis = current.basis * small_random_unitary(n, eps, rng);
      const detail::GroupingObjective obj(xs, trial_basis, k, tol.zero_block_eta);
      std::vector<int> g = current.groups;
      const int c = search_groups ? detail::swap_descent(obj, g) : obj.count(g);
      if (c < current.count) {
        current = {c, static_cast<int>(bases.size()) + step, g, trial_basis,
                   "perturbed#" + std::to_string(step)};
      }
    }
    consider(current);
  }

  ProjectionFamily fam = grouped_family(best.basis, best.groups, k,
                                        best.basis_name + ";groups=" + join_groups(best.groups), tol);
  SparsityReport rep = interaction_index(xs, fam, tol);
  return {std::move(fam), std::move(rep), best.groups, best.basis};
}

// ---------------------------------------------------------------------------

/// Members p_j (+) q_j of M_{n_a} (+) M_{n_b}.
inline ProjectionFamily direct_sum_family(const ProjectionFamily& a, const ProjectionFamily& b,
                                          const Tolerances& tol = {}) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::SizeMismatch,
                "families of sizes " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  std::vector<Matrix> ps;
  for (int j = 0; j < a.size(); ++j) ps.push_back(direct_sum(a[j], b[j]));
  return ProjectionFamily(std::move(ps), "(" + a.id() + ")+(" + b.id() + ")", tol);
}

/// The tuple x_1 (+) 0, ..., x_n (+) 0, 0 (+) y_1, ..., 0 (+) y_m.
inline GeneratorTuple direct_sum_tuple(const GeneratorTuple& a, const GeneratorTuple& b) {
  const Eigen::Index na = a.ambient_dim();
  const Eigen::Index nb = b.ambient_dim();
  std::vector<Matrix> xs;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < a.size(); ++i) {
    xs.push_back(direct_sum(a.elements[i], Matrix::Zero(nb, nb)));
    labels.push_back(a.labels[i]);
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    xs.push_back(direct_sum(Matrix::Zero(na, na), b.elements[i]));
    labels.push_back(b.labels[i]);
  }
  return GeneratorTuple(std::move(xs), std::move(labels));
}

/// Unitaries w1, w2 with w1* e_j w1 = w2* f_j w2 = p_j, p_j the standard
/// contiguous family. Whenever u* e_j u = f_j for all j, w1* u w2 commutes with
/// every p_j.
inline std::pair<Matrix, Matrix> align_families(const ProjectionFamily& e, const ProjectionFamily& f) {
  if (e.size() != f.size()) throw Error(ErrorKind::SizeMismatch, "families differ in size");
  if (e.ambient_dim() != f.ambient_dim()) throw Error(ErrorKind::DimensionMismatch, "families differ in dimension");
  const Eigen::Index n = e.ambient_dim();
  const int k = e.size();
  if (n % k != 0) throw Error(ErrorKind::RankMismatch, "k does not divide the ambient dimension");
  const int rank = static_cast<int>(n / k);
  auto build = [&](const ProjectionFamily& fam) {
    Matrix w(n, n);
    for (int j = 0; j < k; ++j) {
      if (detail::projection_rank(fam[j]) != rank) {
        throw Error(ErrorKind::RankMismatch, "member " + std::to_string(j + 1) + " has the wrong rank");
      }
      w.middleCols(j * rank, rank) = detail::range_basis(fam[j]);
    }
    return w;
  };
  return {build(e), build(f)};
}

// ---------------------------------------------------------------------------

struct HyperfinitePair {
  Matrix x1;
  Matrix x2;
  std::vector<MatrixUnitSystem> tower;  // factor l embedded as I (x) e^(l) (x) I
  ProjectionFamily first_factor_family;
};

/// Truncation to M_{n_1} (x) ... (x) M_{n_m} of
///   x1 = e11^(1) + sum_k w_k e22^(1)...e22^(k) e11^(k+1)
///   x2 = sum_j (e_{j-1,j}^(1) + h.c.) + sum_k w_k e22^(1)...e22^(k) (sum_j e_{j-1,j}^(k+1) + h.c.)
/// with default weights w_k = 2^-k. Every factor must have n_i >= 3.
inline HyperfinitePair hyperfinite_pair(const std::vector<int>& dims, std::vector<double> weights = {}) {
  if (dims.empty()) throw Error(ErrorKind::InvalidArgument, "need at least one factor");
  std::int64_t total = 1;
  for (int d : dims) {
    if (d < 3) throw Error(ErrorKind::FactorTooSmall, "factor size " + std::to_string(d) + " < 3");
    total *= d;
    if (total > dim_cap()) {
      throw Error(ErrorKind::DimensionOverflow, "product dimension exceeds cap " + std::to_string(dim_cap()));
    }
  }
  const std::size_t m = dims.size();
  if (weights.empty()) {
    double w = 1.0;
    for (std::size_t k = 1; k < m; ++k) weights.push_back(w *= 0.5);
  }
  if (weights.size() + 1 < m) throw Error(ErrorKind::SizeMismatch, "need one weight per factor after the first");

  const auto n = static_cast<Eigen::Index>(total);
  std::vector<MatrixUnitSystem> tower;
  Eigen::Index before = 1;
  for (std::size_t l = 0; l < m; ++l) {
    const Eigen::Index after = n / (before * dims[l]);
    const MatrixUnitSystem local = standard_units(dims[l]);
    std::vector<Matrix> units;
    for (const auto& e : local.units())
      units.push_back(tensor_product(tensor_product(identity(before), e), identity(after)));
    tower.emplace_back(n, dims[l], std::move(units));
    before *= dims[l];
  }

  auto shift = [](const MatrixUnitSystem& s) { return shift_pair(s).second; };
  Matrix x1 = tower[0](0, 0);
  Matrix x2 = shift(tower[0]);
  Matrix chain = identity(n);  // e22^(1) ... e22^(k)
  for (std::size_t k = 1; k < m; ++k) {
    chain = chain * tower[k - 1](1, 1);
    x1 += weights[k - 1] * chain * tower[k](0, 0);
    x2 += weights[k - 1] * chain * shift(tower[k]);
  }
  ProjectionFamily fam(tower[0].diagonal(), "first-factor");
  return {std::move(x1), std::move(x2), std::move(tower), std::move(fam)};
}

}  // namespace finfactor
