#include <gtest/gtest.h>

#include <set>

#include "finfactor/instances.hpp"
#include "finfactor/sparsity.hpp"
#include "finfactor/star_algebra.hpp"
#include "oracle.hpp"

using namespace finfactor;

namespace {

std::vector<int> contiguous(int n, int k) {
  std::vector<int> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = i / (n / k);
  return g;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(ProjectionFamily, DiagonalFamilyIsValid) {
  const ProjectionFamily f = diagonal_family(6, 3);
  EXPECT_EQ(f.size(), 3);
  EXPECT_EQ(f[1], unit(6, 2, 2) + unit(6, 3, 3));
}

TEST(ProjectionFamily, RejectsUnequalTraces) {
  EXPECT_EQ(kind_of([] { ProjectionFamily({unit(3, 0, 0), unit(3, 1, 1) + unit(3, 2, 2)}); }),
            ErrorKind::RankMismatch);
}

TEST(ProjectionFamily, RejectsIncompleteFamily) {
  EXPECT_EQ(kind_of([] { ProjectionFamily({unit(3, 0, 0), unit(3, 1, 1)}); }), ErrorKind::RankMismatch);
  EXPECT_THROW(ProjectionFamily({unit(2, 0, 0), unit(2, 0, 0)}), Error);
}

TEST(ProjectionFamily, NotDivisible) {
  EXPECT_EQ(kind_of([] { diagonal_family(5, 2); }), ErrorKind::NotDivisible);
}

TEST(BlockPattern, ShiftInM4) {
  // x2 = e12 + e21 + e23 + e32 + e34 + e43 has six off-diagonal bits; e11 one.
  auto [x1, x2] = shift_pair(standard_units(4));
  const ProjectionFamily f = diagonal_family(4, 4);
  const BlockPattern p2 = block_pattern(x2, f);
  EXPECT_EQ(p2.count(), 6);
  EXPECT_EQ(p2.rows(), (std::vector<std::string>{"0100", "1010", "0101", "0010"}));
  EXPECT_EQ(interaction_index(GeneratorTuple({x1, x2}), f).index, Rational(7, 16));
}

TEST(BlockPattern, ZeroMatrixIsEmpty) {
  EXPECT_EQ(block_pattern(Matrix::Zero(4, 4), diagonal_family(4, 2)).count(), 0);
}

TEST(BlockPattern, IdentityIsDiagonal) {
  const BlockPattern p = block_pattern(identity(6), diagonal_family(6, 3));
  EXPECT_TRUE(p.is_diagonal());
  EXPECT_EQ(p.count(), 3);
}

TEST(BlockPattern, AdjointTransposesPattern) {
  Rng rng(51);
  for (int t = 0; t < 30; ++t) {
    const int k = 2 + t % 4;
    const Matrix basis = random_unitary(2 * k, rng);
    const ProjectionFamily f = instances::random_family(basis, k, rng);
    const Matrix x = instances::sparse_in_basis(basis, 2 * k, 0.4, rng);
    EXPECT_EQ(block_pattern(x.adjoint(), f), block_pattern(x, f).transposed());
  }
}

TEST(BlockPattern, MatchesCoordinateOracle) {
  Rng rng(52);
  for (int t = 0; t < 40; ++t) {
    const int k = 2 + t % 3;
    const int n = k * (1 + t % 3);
    Matrix x = Matrix::Zero(n, n);
    std::bernoulli_distribution keep(0.3);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (keep(rng)) x(i, j) = Complex(1.0 + i, -j);
    std::vector<int> groups = contiguous(n, k);
    std::shuffle(groups.begin(), groups.end(), rng);
    const ProjectionFamily f = grouped_family(identity(n), groups, k, "g");
    EXPECT_EQ(block_pattern(x, f).count(), oracle::coordinate_block_count(x, groups, k, 1e-10)) << "case " << t;
  }
}

TEST(InteractionIndex, UnitaryInvariance) {
  Rng rng(53);
  for (int t = 0; t < 20; ++t) {
    const int k = 2 + t % 3;
    const int n = 2 * k;
    const Matrix x = instances::sparse_in_basis(identity(n), n, 0.3, rng);
    const ProjectionFamily f = diagonal_family(n, k);
    const Matrix u = random_unitary(n, rng);
    std::vector<Matrix> rotated;
    for (const auto& p : f.projections()) rotated.push_back(u * p * u.adjoint());
    const ProjectionFamily g(rotated, "rotated");
    EXPECT_EQ(interaction_index(u * x * u.adjoint(), g), interaction_index(x, f));
  }
}

TEST(InteractionIndex, AdditiveOverTuple) {
  Rng rng(54);
  const ProjectionFamily f = diagonal_family(6, 3);
  for (int t = 0; t < 10; ++t) {
    const Matrix a = instances::sparse_in_basis(identity(6), 6, 0.3, rng);
    const Matrix b = instances::sparse_in_basis(identity(6), 6, 0.3, rng);
    EXPECT_EQ(interaction_index(GeneratorTuple({a, b}), f).index, interaction_index(a, f) + interaction_index(b, f));
  }
}

TEST(InteractionIndex, ThresholdIsRelative) {
  Matrix x = identity(4);
  x(0, 3) = 1e-12;
  const ProjectionFamily f = diagonal_family(4, 2);
  EXPECT_EQ(block_pattern(x, f).count(), 2);
  EXPECT_EQ(block_pattern(1e6 * x, f).count(), 2);
  Tolerances tight;
  tight.zero_block_eta = 1e-14;
  EXPECT_EQ(block_pattern(x, f, tight).count(), 3);
}

TEST(InteractionIndex, DemoShiftK5) {
  auto [x1, x2] = shift_pair(standard_units(5));
  const SparsityReport r = interaction_index(GeneratorTuple({x1, x2}), diagonal_family(5, 5));
  EXPECT_EQ(r.index, Rational(9, 25));
  EXPECT_EQ(r.count, 9);
  EXPECT_EQ(r.support_trace, Rational(1, 1));
}

TEST(Support, CountsTouchedProjections) {
  const ProjectionFamily f = diagonal_family(6, 3);
  const SupportResult s = support(unit(6, 0, 2), f);
  EXPECT_EQ(s.trace, Rational(2, 3));
  EXPECT_EQ(s.projection, f[0] + f[1]);
  EXPECT_EQ(support(Matrix::Zero(6, 6), f).trace, Rational(0, 1));
}

TEST(Refine, SplitsDiagonalFamily) {
  const ProjectionFamily f = refine(diagonal_family(8, 2), 2);
  EXPECT_EQ(f.size(), 4);
  EXPECT_EQ(f[0], unit(8, 0, 0) + unit(8, 1, 1));
  EXPECT_EQ(f[3], unit(8, 6, 6) + unit(8, 7, 7));
}

TEST(Refine, FactorOneIsIdentity) {
  const ProjectionFamily f = diagonal_family(4, 2);
  EXPECT_EQ(refine(f, 1).projections(), f.projections());
}

TEST(Refine, IndivisibleRankRejected) {
  EXPECT_EQ(kind_of([] { refine(diagonal_family(6, 2), 2); }), ErrorKind::NotDivisible);
}

TEST(Refine, ChildrenSumToParents) {
  Rng rng(55);
  for (int t = 0; t < 15; ++t) {
    const Matrix basis = random_unitary(12, rng);
    const ProjectionFamily f = instances::random_family(basis, 3, rng);
    const int r = (t % 2 == 0) ? 2 : 4;
    const ProjectionFamily g = refine(f, r);
    ASSERT_EQ(g.size(), 3 * r);
    for (int j = 0; j < 3; ++j) {
      Matrix sum = Matrix::Zero(12, 12);
      for (int c = 0; c < r; ++c) sum += g[j * r + c];
      EXPECT_LT((sum - f[j]).norm(), 1e-9);
    }
  }
}

TEST(Refine, NeverRaisesIndex) {
  Rng rng(56);
  for (int t = 0; t < 30; ++t) {
    const Matrix basis = random_unitary(12, rng);
    const ProjectionFamily f = instances::random_family(basis, 3, rng);
    const Matrix x = instances::sparse_in_basis(basis, 12, 0.3, rng);
    const ProjectionFamily g = refine(f, 2);
    EXPECT_LE(interaction_index(x, g), interaction_index(x, f)) << "case " << t;
  }
}

TEST(Strategy, ParseRoundTrip) {
  for (auto s : {Strategy::DiagonalGrouping, Strategy::UnitaryLocalSearch, Strategy::Combined})
    EXPECT_EQ(parse_strategy(to_string(s)), s);
  EXPECT_EQ(kind_of([] { parse_strategy("annealing"); }), ErrorKind::UnknownStrategy);
}

TEST(Minimize, ShiftPairInM4FindsExhaustiveMinimum) {
  auto [x1, x2] = shift_pair(standard_units(4));
  const GeneratorTuple xs({x1, x2});
  // Exhaustive oracle over every balanced coordinate grouping.
  int best = 1 << 20;
  oracle::for_each_balanced_partition(4, 2, [&](const std::vector<int>& g) {
    best = std::min(best, oracle::coordinate_block_count(x1, g, 2, 1e-10) +
                              oracle::coordinate_block_count(x2, g, 2, 1e-10));
  });
  EXPECT_EQ(best, 3);
  const MinimizeResult r = minimize_index(xs, 2);
  EXPECT_EQ(r.report.index, Rational(3, 4));
  EXPECT_EQ(r.report.index, Rational(best, 4));
}

TEST(Minimize, DiagonalGroupingMatchesExhaustiveSearch) {
  Rng rng(57);
  for (int t = 0; t < 12; ++t) {
    const int k = (t % 2 == 0) ? 2 : 3;
    const int n = 6;
    std::vector<Matrix> xs;
    for (int m = 0; m < 2; ++m) {
      Matrix x = Matrix::Zero(n, n);
      std::bernoulli_distribution keep(0.2);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (keep(rng)) x(i, j) = 1.0;
      xs.push_back(x);
    }
    int best = 1 << 20;
    oracle::for_each_balanced_partition(n, k, [&](const std::vector<int>& g) {
      int c = 0;
      for (const auto& x : xs) c += oracle::coordinate_block_count(x, g, k, 1e-10);
      best = std::min(best, c);
    });
    const MinimizeResult r = minimize_index(GeneratorTuple(xs), k);
    EXPECT_EQ(r.report.count, best) << "case " << t;
  }
}

TEST(Minimize, NeverWorseThanStandardFamily) {
  Rng rng(58);
  for (int t = 0; t < 10; ++t) {
    const int k = 2 + t % 2;
    const int n = 6;
    const GeneratorTuple xs({random_hermitian(n, rng), instances::sparse_in_basis(identity(n), n, 0.3, rng)});
    const Rational baseline = interaction_index(xs, diagonal_family(n, k)).index;
    for (auto s : {Strategy::DiagonalGrouping, Strategy::UnitaryLocalSearch, Strategy::Combined}) {
      MinimizeOptions opt;
      opt.strategy = s;
      opt.restarts = 4;
      opt.perturbation_steps = 12;
      const MinimizeResult r = minimize_index(xs, k, opt);
      EXPECT_LE(r.report.index, baseline);
      EXPECT_EQ(r.report.index, interaction_index(xs, r.family).index);
    }
  }
}

TEST(Minimize, FindsHiddenRotation) {
  // x is block diagonal in a random basis; the eigenbases of x's parts are
  // seeds, so the rotated strategies see through the conjugation.
  Rng rng(59);
  const Matrix u = random_unitary(4, rng);
  const Matrix h = direct_sum(random_hermitian(2, rng) + 5.0 * identity(2), random_hermitian(2, rng) - 5.0 * identity(2));
  const GeneratorTuple xs({u * h * u.adjoint()});
  MinimizeOptions opt;
  opt.strategy = Strategy::Combined;
  const MinimizeResult r = minimize_index(xs, 2, opt);
  EXPECT_EQ(r.report.count, 2);
  MinimizeOptions plain;
  EXPECT_EQ(minimize_index(xs, 2, plain).report.count, 4);
}

TEST(Minimize, DeterministicForSeed) {
  Rng rng(60);
  const GeneratorTuple xs({random_complex(6, rng)});
  MinimizeOptions opt;
  opt.strategy = Strategy::Combined;
  opt.seed = 7;
  const MinimizeResult a = minimize_index(xs, 3, opt);
  const MinimizeResult b = minimize_index(xs, 3, opt);
  EXPECT_EQ(a.groups, b.groups);
  EXPECT_EQ(a.family.id(), b.family.id());
  EXPECT_EQ(a.report.index, b.report.index);
}

TEST(Minimize, RejectsNonDividingK) {
  EXPECT_EQ(kind_of([] { minimize_index(GeneratorTuple({identity(5)}), 2); }), ErrorKind::NotDivisible);
}

TEST(DirectSum, IndexAddsUp) {
  Rng rng(61);
  for (int t = 0; t < 10; ++t) {
    const int k = 2 + t % 2;
    const ProjectionFamily fa = diagonal_family(2 * k, k);
    const ProjectionFamily fb = instances::random_family(random_unitary(k, rng), k, rng);
    const GeneratorTuple a({instances::sparse_in_basis(identity(2 * k), 2 * k, 0.4, rng)});
    const GeneratorTuple b({random_complex(k, rng), random_hermitian(k, rng)});
    const ProjectionFamily f = direct_sum_family(fa, fb);
    const GeneratorTuple ab = direct_sum_tuple(a, b);
    EXPECT_EQ(ab.size(), 3u);
    EXPECT_EQ(interaction_index(ab, f).index, interaction_index(a, fa).index + interaction_index(b, fb).index);
  }
}

TEST(DirectSum, SizeMismatch) {
  EXPECT_EQ(kind_of([] { direct_sum_family(diagonal_family(4, 2), diagonal_family(3, 3)); }), ErrorKind::SizeMismatch);
}

TEST(AlignFamilies, ConjugatesToStandard) {
  Rng rng(62);
  for (int t = 0; t < 10; ++t) {
    const int k = 2 + t % 3;
    const int n = 2 * k;
    const ProjectionFamily e = instances::random_family(random_unitary(n, rng), k, rng);
    const ProjectionFamily f = instances::random_family(random_unitary(n, rng), k, rng);
    auto [w1, w2] = align_families(e, f);
    const ProjectionFamily p = diagonal_family(n, k);
    EXPECT_LT((w1.adjoint() * w1 - identity(n)).norm(), 1e-9);
    EXPECT_LT((w2.adjoint() * w2 - identity(n)).norm(), 1e-9);
    for (int j = 0; j < k; ++j) {
      EXPECT_LT((w1.adjoint() * e[j] * w1 - p[j]).norm(), 1e-9);
      EXPECT_LT((w2.adjoint() * f[j] * w2 - p[j]).norm(), 1e-9);
    }
  }
}

TEST(AlignFamilies, IntertwinerBecomesBlockDiagonal) {
  Rng rng(63);
  const int k = 3;
  const int n = 6;
  const ProjectionFamily e = instances::random_family(random_unitary(n, rng), k, rng);
  const Matrix u = random_unitary(n, rng);
  std::vector<Matrix> fs;
  for (const auto& p : e.projections()) fs.push_back(u.adjoint() * p * u);
  const ProjectionFamily f(fs, "f");
  auto [w1, w2] = align_families(e, f);
  const Matrix v = w1.adjoint() * u * w2;
  const ProjectionFamily p = diagonal_family(n, k);
  for (int j = 0; j < k; ++j) EXPECT_LT((v * p[j] - p[j] * v).norm(), 1e-9);
}

TEST(Hyperfinite, Index33) {
  const HyperfinitePair h = hyperfinite_pair({3, 3});
  const SparsityReport r = interaction_index(GeneratorTuple({h.x1, h.x2}), h.first_factor_family);
  EXPECT_EQ(r.index, Rational(7, 9));
  EXPECT_EQ(generate({h.x1, h.x2}).dim(), 81);
}

TEST(Hyperfinite, Index43) {
  const HyperfinitePair h = hyperfinite_pair({4, 3});
  const SparsityReport r = interaction_index(GeneratorTuple({h.x1, h.x2}), h.first_factor_family);
  EXPECT_EQ(r.index, Rational(9, 16));
  EXPECT_LE(r.index.value(), 3.0 / 4.0);
}

TEST(Hyperfinite, SingleFactorIsShiftPair) {
  const HyperfinitePair h = hyperfinite_pair({3});
  auto [x1, x2] = shift_pair(standard_units(3));
  EXPECT_EQ(h.x1, x1);
  EXPECT_EQ(h.x2, x2);
  EXPECT_EQ(interaction_index(GeneratorTuple({h.x1, h.x2}), h.first_factor_family).index, Rational(5, 9));
}

TEST(Hyperfinite, PatternsAgainstOracle) {
  for (const std::vector<int>& dims : {std::vector<int>{3, 3}, {5, 3}, {3, 4}, {3, 3, 3}}) {
    const HyperfinitePair h = hyperfinite_pair(dims);
    const int n1 = dims.front();
    int n = 1;
    for (int d : dims) n *= d;
    std::vector<int> groups(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) groups[static_cast<std::size_t>(i)] = i / (n / n1);
    const int expected = oracle::coordinate_block_count(h.x1, groups, n1, 1e-10) +
                         oracle::coordinate_block_count(h.x2, groups, n1, 1e-10);
    const SparsityReport r = interaction_index(GeneratorTuple({h.x1, h.x2}), h.first_factor_family);
    EXPECT_EQ(r.count, expected);
    EXPECT_EQ(r.index, Rational(2 * n1 + 1, n1 * n1));
  }
}

TEST(Hyperfinite, CustomWeights) {
  const HyperfinitePair h = hyperfinite_pair({3, 3}, {0.25});
  EXPECT_EQ(generate({h.x1, h.x2}).dim(), 81);
}

TEST(Hyperfinite, Errors) {
  EXPECT_EQ(kind_of([] { hyperfinite_pair({2, 3}); }), ErrorKind::FactorTooSmall);
  EXPECT_EQ(kind_of([] { hyperfinite_pair({7, 7, 7}); }), ErrorKind::DimensionOverflow);
}
