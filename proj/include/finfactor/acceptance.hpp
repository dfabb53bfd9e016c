#pragma once

// The acceptance suite: each criterion is run at its pinned tolerance and
// reported as one pass/fail line. Shared by the acceptance test binary and
// `finfactor verify-all`.

#include <algorithm>
#include <chrono>
#include <iterator>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "finfactor/compression.hpp"
#include "finfactor/instances.hpp"
#include "finfactor/matrix_units.hpp"
#include "finfactor/sparsity.hpp"
#include "finfactor/star_algebra.hpp"

namespace finfactor::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Nonzero first-factor blocks counted straight from the entries: block (a, b)
/// of an N x N matrix under the family e_aa (x) I is the coordinate square of
/// side N / n1 at (a, b).
inline int entry_block_count(const Matrix& x, int n1, double eta) {
  const Eigen::Index w = x.rows() / n1;
  const double cut = eta * x.norm();
  int count = 0;
  for (int a = 0; a < n1; ++a)
    for (int b = 0; b < n1; ++b)
      if (x.block(a * w, b * w, w, w).norm() > cut) ++count;
  return count;
}

struct CompressionRun {
  int k = 0;
  bool ok = false;
  bool projection_ok = false;
  bool support_ok = false;
  bool algebra_ok = false;
  bool pair_applicable = false;
  bool pair_ok = false;
  bool roundtrip_ok = false;
  double roundtrip_error = 0.0;
  std::string error;
};

/// Compression instances shared by criteria 3, 4 and 10.
inline std::vector<CompressionRun> compression_runs(std::uint64_t seed, const Tolerances& base) {
  Tolerances tol = base;
  tol.span_tol = 1e-6;
  tol.structural_tol = 1e-8;
  std::vector<CompressionRun> runs;
  for (int k : {8, 12}) {
    for (int r = 0; r < 20; ++r) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(1000 * k + r)));
      const auto inst = instances::sparse_tuple(k, 1, rng, r % 2 == 1);
      CompressionRun run;
      run.k = k;
      try {
        const CutPasteResult res = cut_and_paste(inst.tuple, inst.units, tol);
        const StructuralFlags f = structural_checks(res.q, tol);
        run.projection_ok = f.projection && f.idempotent_residual < 1e-8 && f.self_adjoint_residual < 1e-8;
        // tau(S(q)) <= 2c + 2/k over integers
        const std::int64_t sc = res.support_trace.num() * (k / res.support_trace.den());
        const std::int64_t lhs = sc - 2;
        run.support_ok = lhs <= 0 || lhs * lhs <= 4LL * res.block_count;
        run.algebra_ok = res.dim_before == res.dim_after;  // equality itself is enforced inside

        const GeneratorTuple back = recover_elements(res, inst.units);
        for (std::size_t p = 0; p < inst.tuple.size(); ++p) {
          const Matrix& x = inst.tuple.elements[p];
          const double err = (back.elements[p] - x).norm() / std::max(1.0, x.norm());
          run.roundtrip_error = std::max(run.roundtrip_error, err);
        }
        run.roundtrip_ok = run.roundtrip_error < 1e-8;

        run.pair_applicable = res.support_trace < Rational(k - 1, k);
        if (run.pair_applicable) {
          const GeneratorPair pair = single_generator_pair(res.q, inst.units, tol);
          const auto full = static_cast<Eigen::Index>(k) * k;
          const bool pair_full = generate({pair.x1, pair.x2}, tol).dim() == full;
          const bool single_full = generate({fuse(pair.x1, pair.x2, tol)}, tol).dim() == full;
          run.pair_ok = pair_full && single_full;
        }
        run.ok = true;
      } catch (const Error& e) {
        run.error = e.what();
      }
      runs.push_back(std::move(run));
    }
  }
  return runs;
}

}  // namespace detail

inline std::vector<CriterionResult> run_all(std::uint64_t seed = 1, const Tolerances& base = {}) {
  using detail::Clock;
  std::vector<CriterionResult> out;

  // 1. Shift pair generates M_k.
  {
    const auto t0 = Clock::now();
    Tolerances tol = base;
    bool pass = true;
    std::ostringstream d;
    for (int k = 2; k <= 8; ++k) {
      const MatrixUnitSystem sys = standard_units(k);
      auto [x1, x2] = shift_pair(sys);
      const AlgebraBasis a = generate({x1, x2}, tol);
      const bool ok = a.dim() == k * k && equal(a, generate(sys.units(), tol), tol);
      pass = pass && ok;
      d << "k=" << k << ":" << a.dim() << (ok ? "" : "!") << " ";
    }
    const double s = detail::seconds_since(t0);
    pass = pass && s < 5.0;
    out.push_back({1, "shift pair generates M_k for k=2..8 (< 5 s)", pass, d.str(), s});
  }

  // 2. Truncated hyperfinite pair: full generation and index <= 3/n1.
  {
    const auto t0 = Clock::now();
    Tolerances tol = base;
    bool pass = true;
    std::ostringstream d;
    for (const std::vector<int>& dims :
         std::vector<std::vector<int>>{{3, 3}, {4, 3}, {5, 3}, {3, 3, 3}}) {
      const HyperfinitePair hp = hyperfinite_pair(dims);
      const int n1 = dims.front();
      const Eigen::Index big = hp.x1.rows();
      const Eigen::Index dim = generate({hp.x1, hp.x2}, tol).dim();
      const SparsityReport rep = interaction_index(GeneratorTuple({hp.x1, hp.x2}), hp.first_factor_family, tol);
      const int oracle = detail::entry_block_count(hp.x1, n1, tol.zero_block_eta) +
                         detail::entry_block_count(hp.x2, n1, tol.zero_block_eta);
      const Rational expected(2 * n1 + 1, static_cast<std::int64_t>(n1) * n1);
      const bool ok = dim == big * big && rep.count == oracle && rep.index == expected &&
                      rep.index <= Rational(3, n1);
      pass = pass && ok;
      d << "[";
      for (std::size_t i = 0; i < dims.size(); ++i) d << (i ? "," : "") << dims[i];
      d << "] dim " << dim << " index " << rep.index << " <= 3/" << n1 << (ok ? "" : "!") << "; ";
    }
    const double s = detail::seconds_since(t0);
    pass = pass && s < 60.0;
    out.push_back({2, "hyperfinite pair generates and has index <= 3/n1 (< 60 s)", pass, d.str(), s});
  }

  // 3, 4, 10 share the compression instances.
  {
    const auto t0 = Clock::now();
    const auto runs = detail::compression_runs(seed, base);
    const double s = detail::seconds_since(t0);

    int proj = 0, supp = 0, alg = 0, applicable = 0, pair = 0, rt = 0;
    double worst_rt = 0.0;
    std::string first_error;
    for (const auto& r : runs) {
      proj += r.ok && r.projection_ok;
      supp += r.ok && r.support_ok;
      alg += r.ok && r.algebra_ok;
      applicable += r.ok && r.pair_applicable;
      pair += r.ok && r.pair_applicable && r.pair_ok;
      rt += r.ok && r.roundtrip_ok;
      worst_rt = std::max(worst_rt, r.roundtrip_error);
      if (!r.ok && first_error.empty()) first_error = r.error;
    }
    const int total = static_cast<int>(runs.size());
    std::ostringstream d3;
    d3 << "runs " << total << ": projection " << proj << ", support bound " << supp << ", algebra equality " << alg;
    if (!first_error.empty()) d3 << "; first error: " << first_error;
    const bool p3 = proj == total && supp == total && alg == total && s < 120.0;
    out.push_back({3, "cut-and-paste projection, support <= 2c + 2/k, algebra preserved (< 120 s)", p3, d3.str(), s});

    std::ostringstream d4;
    d4 << "applicable " << applicable << " of " << total << ", full generation " << pair;
    const bool p4 = applicable > 0 && pair == applicable && first_error.empty();
    out.push_back({4, "synthesized pair and fused element generate M_k", p4, d4.str(), 0.0});

    std::ostringstream d10;
    d10 << "round trips " << rt << " of " << total << ", worst relative error " << worst_rt;
    out.push_back({10, "recover_elements inverts cut_and_paste within 1e-8", rt == total, d10.str(), 0.0});
  }

  // 5. Direct-sum additivity.
  {
    const auto t0 = Clock::now();
    const Tolerances tol = base;
    int hits = 0;
    const int total = 10;
    for (int r = 0; r < total; ++r) {
      Rng rng(derive_seed(seed, 5000 + static_cast<std::uint64_t>(r)));
      const int k = (r % 2 == 0) ? 2 : 4;
      auto component = [&](Rng& g) {
        const Matrix w = random_unitary(4, g);
        ProjectionFamily fam = grouped_family(w, finfactor::detail::contiguous_groups(4, k), k, "component");
        std::vector<Matrix> xs;
        const int m = instances::uniform_int(g, 1, 2);
        for (int i = 0; i < m; ++i) xs.push_back(instances::sparse_in_basis(w, 4, 0.4, g));
        return std::make_pair(std::move(fam), GeneratorTuple(std::move(xs)));
      };
      const auto [fa, ta] = component(rng);
      const auto [fb, tb] = component(rng);
      const Rational ia = interaction_index(ta, fa, tol).index;
      const Rational ib = interaction_index(tb, fb, tol).index;
      const Rational joint = interaction_index(direct_sum_tuple(ta, tb), direct_sum_family(fa, fb, tol), tol).index;
      hits += joint == ia + ib;
    }
    std::ostringstream d;
    d << hits << " of " << total << " exact";
    out.push_back({5, "direct-sum family index equals the sum of component indices", hits == total, d.str(),
                   detail::seconds_since(t0)});
  }

  // 6. Refinement never increases the index.
  {
    const auto t0 = Clock::now();
    const Tolerances tol = base;
    struct Shape {
      int n, k, r;
    };
    static constexpr Shape kShapes[] = {{4, 2, 2},  {6, 3, 2},  {8, 2, 2},  {8, 2, 4},  {8, 4, 2},  {9, 3, 3},
                                        {12, 2, 2}, {12, 2, 3}, {12, 3, 2}, {12, 2, 6}, {12, 6, 2}, {16, 2, 2},
                                        {16, 4, 2}, {16, 2, 4}, {16, 2, 8}, {16, 8, 2}, {16, 4, 4}};
    int hits = 0;
    int strict = 0;
    const int total = 100;
    for (int i = 0; i < total; ++i) {
      Rng rng(derive_seed(seed, 6000 + static_cast<std::uint64_t>(i)));
      const Shape sh = kShapes[static_cast<std::size_t>(i) % std::size(kShapes)];
      const Matrix w = (i % 3 == 0) ? identity(sh.n) : random_unitary(sh.n, rng);
      const ProjectionFamily fam =
          grouped_family(w, finfactor::detail::contiguous_groups(sh.n, sh.k), sh.k, "random");
      const Matrix x = instances::sparse_in_basis(w, sh.k * sh.r, 0.3, rng);
      const Rational coarse = interaction_index(x, fam, tol);
      const Rational fine = interaction_index(x, refine(fam, sh.r, tol), tol);
      hits += fine <= coarse;
      strict += fine < coarse;
    }
    std::ostringstream d;
    d << hits << " of " << total << " monotone (" << strict << " strictly smaller)";
    out.push_back({6, "refinement monotonicity", hits == total, d.str(), detail::seconds_since(t0)});
  }

  // 7. Bicommutant equals generated algebra.
  {
    const auto t0 = Clock::now();
    Tolerances tol = base;
    tol.span_tol = 1e-8;
    int hits = 0;
    const int total = 50;
    std::string first_fail;
    for (int i = 0; i < total; ++i) {
      Rng rng(derive_seed(seed, 7000 + static_cast<std::uint64_t>(i)));
      const int n = 2 + i % 4;
      const auto shape = (i % 5 == 0) ? std::vector<std::pair<int, int>>{{n, 1}} : instances::random_shape(n, rng);
      const Matrix u = random_unitary(n, rng);
      std::vector<Matrix> gens;
      const int m = instances::uniform_int(rng, 1, 2);
      for (int g = 0; g < m; ++g) gens.push_back(instances::structured_element(shape, u, rng));
      const AlgebraBasis a = generate(gens, tol);
      const AlgebraBasis bicomm = commutant(commutant(gens, tol), tol);
      const bool ok = equal(a, bicomm, tol);
      hits += ok;
      if (!ok && first_fail.empty()) {
        first_fail = "n=" + std::to_string(n) + " dims " + std::to_string(a.dim()) + " vs " + std::to_string(bicomm.dim());
      }
    }
    std::ostringstream d;
    d << hits << " of " << total << " equal";
    if (!first_fail.empty()) d << "; first failure " << first_fail;
    out.push_back({7, "bicommutant equals the generated algebra", hits == total, d.str(), detail::seconds_since(t0)});
  }

  // 8. Aligned intertwiners are block diagonal.
  {
    const auto t0 = Clock::now();
    const Tolerances tol = base;
    static constexpr std::pair<int, int> kShapes[] = {{4, 2}, {4, 4}, {6, 2}, {6, 3}, {8, 4}, {9, 3}, {12, 4}, {12, 6}};
    int hits = 0;
    const int total = 20;
    double worst = 0.0;
    for (int i = 0; i < total; ++i) {
      Rng rng(derive_seed(seed, 8000 + static_cast<std::uint64_t>(i)));
      const auto [n, k] = kShapes[static_cast<std::size_t>(i) % std::size(kShapes)];
      const Matrix a = random_unitary(n, rng);
      const ProjectionFamily e = grouped_family(a, finfactor::detail::contiguous_groups(n, k), k, "E");
      const Matrix u = random_unitary(n, rng);
      std::vector<Matrix> fs;
      for (const auto& p : e.projections()) fs.push_back(u.adjoint() * p * u);
      const ProjectionFamily f(std::move(fs), "F");
      const auto [w1, w2] = align_families(e, f);
      const ProjectionFamily std_fam = diagonal_family(n, k);
      for (int j = 0; j < k; ++j) {
        worst = std::max(worst, (w1.adjoint() * e[j] * w1 - std_fam[j]).norm());
        worst = std::max(worst, (w2.adjoint() * f[j] * w2 - std_fam[j]).norm());
      }
      const Matrix z = w1.adjoint() * u * w2;
      const BlockPattern pat = block_pattern(z, std_fam, tol);
      hits += pat.is_diagonal() && pat.count() == k && interaction_index(z, std_fam, tol) == Rational(1, k);
    }
    std::ostringstream d;
    d << hits << " of " << total << " diagonal, worst alignment residual " << worst;
    out.push_back({8, "aligned intertwiner is block diagonal and adds 1/k", hits == total && worst < 1e-10, d.str(),
                   detail::seconds_since(t0)});
  }

  // 9. Nested product of a two-level chain.
  {
    const auto t0 = Clock::now();
    Tolerances tol = base;
    tol.structural_tol = 1e-10;
    bool pass = true;
    std::ostringstream d;
    Rng rng(derive_seed(seed, 9000));
    for (const auto& [m1, m2] : {std::pair{2, 3}, std::pair{3, 4}}) {
      for (bool conj : {false, true}) {
        const Eigen::Index n = static_cast<Eigen::Index>(m1) * m2;
        const Matrix u = conj ? random_unitary(n, rng) : identity(n);
        const MatrixUnitSystem outer = instances::amplified_units(m1, m2, &u);
        std::vector<Matrix> inner_units;
        for (const auto& e : standard_units(m2).units())
          inner_units.push_back(u * tensor_product(unit(m1, 1, 1), e) * u.adjoint());
        const MatrixUnitSystem inner(n, m2, std::move(inner_units));
        const NestedProduct np = nested_product({outer, inner}, tol);
        const UnitSystemReport rep = verify(np.system, tol);
        Matrix sum = Matrix::Zero(n, n);
        double spread = 0.0;
        for (const auto& p : np.diagonal_family) {
          sum += p;
          spread = std::max(spread, std::abs(normalized_trace(p).real() - 1.0 / static_cast<double>(n)));
        }
        const bool ok = rep.pass && rep.full && np.system.size() == m1 * m2 &&
                        (sum - identity(n)).norm() < 1e-10 && spread < 1e-10;
        pass = pass && ok;
        d << "(" << m1 << "," << m2 << (conj ? ",rotated" : "") << ") size " << np.system.size() << " worst axiom "
          << std::max({rep.projection_residual, rep.adjoint_residual, rep.product_residual}) << (ok ? "" : "!")
          << "; ";
      }
    }
    out.push_back({9, "nested product is a full system of size m1*m2", pass, d.str(), detail::seconds_since(t0)});
  }

  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

}  // namespace finfactor::acceptance
