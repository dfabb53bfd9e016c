#include <gtest/gtest.h>

#include "finfactor/instances.hpp"
#include "finfactor/matrix_units.hpp"
#include "finfactor/random.hpp"
#include "finfactor/star_algebra.hpp"
#include "oracle.hpp"

using namespace finfactor;

TEST(StandardUnits, PassVerification) {
  for (int k = 1; k <= 6; ++k) {
    const UnitSystemReport r = verify(standard_units(k));
    EXPECT_TRUE(r.pass) << "k=" << k;
    EXPECT_TRUE(r.full);
    EXPECT_EQ(r.product_residual, 0.0);
  }
}

TEST(Verify, DetectsBrokenProducts) {
  auto units = standard_units(3).units();
  units[1] *= 2.0;  // e_12
  const UnitSystemReport r = verify(MatrixUnitSystem(3, 3, units));
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.product_residual, 0.5);
  EXPECT_GT(r.adjoint_residual, 0.5);
}

TEST(Verify, SubsystemIsNotFull) {
  // M_2 sitting in the top-left corner of M_3.
  Matrix v = Matrix::Zero(3, 2);
  v(0, 0) = 1.0;
  v(1, 1) = 1.0;
  const UnitSystemReport r = verify(embed(standard_units(2), v));
  EXPECT_TRUE(r.pass);
  EXPECT_FALSE(r.full);
}

TEST(Verify, SurvivesConjugation) {
  Rng rng(41);
  const Matrix u = random_unitary(4, rng);
  EXPECT_TRUE(verify(standard_units(4).conjugated(u)).pass);
}

TEST(MatrixUnitSystem, WrongCountThrows) {
  try {
    MatrixUnitSystem(2, 2, {identity(2)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SizeMismatch);
  }
}

TEST(ShiftPair, ExplicitFormInM3) {
  auto [x1, x2] = shift_pair(standard_units(3));
  EXPECT_EQ(x1, unit(3, 0, 0));
  Matrix expected = Matrix::Zero(3, 3);
  expected(0, 1) = expected(1, 0) = expected(1, 2) = expected(2, 1) = 1.0;
  EXPECT_EQ(x2, expected);
}

TEST(ShiftPair, SelfAdjointAndGenerating) {
  Rng rng(42);
  for (int k = 2; k <= 8; ++k) {
    const Matrix u = random_unitary(k, rng);
    const MatrixUnitSystem sys = standard_units(k).conjugated(u);
    auto [x1, x2] = shift_pair(sys);
    EXPECT_TRUE(structural_checks(x1).self_adjoint);
    EXPECT_TRUE(structural_checks(x2).self_adjoint);
    EXPECT_EQ(generate({x1, x2}).dim(), k * k);
    EXPECT_EQ(oracle::closure_dim({x1, x2}, k), k * k);
  }
}

TEST(ShiftPair, NeedsTwoUnits) {
  try {
    shift_pair(standard_units(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SystemTooSmall);
  }
}

TEST(ShiftPair, AmplifiedSystemGeneratesTensorFactor) {
  const MatrixUnitSystem sys = instances::amplified_units(3, 2);
  auto [x1, x2] = shift_pair(sys);
  EXPECT_EQ(generate({x1, x2}).dim(), 9);
  EXPECT_EQ(commutant({x1, x2}).dim(), 4);
}

TEST(TensorUnits, LexicographicIndexing) {
  const MatrixUnitSystem t = tensor_units(standard_units(2), standard_units(3));
  EXPECT_EQ(t.size(), 6);
  EXPECT_TRUE(verify(t).pass);
  // (i, s) = (1, 2) -> 5, (j, t) = (0, 1) -> 1
  EXPECT_EQ(t(5, 1), tensor_product(unit(2, 1, 0), unit(3, 2, 1)));
  EXPECT_EQ(t(5, 1), unit(6, 5, 1));
}

TEST(NestedProduct, TwoLevelsInM4) {
  // Outer M_2 = e_ij (x) I_2; inner M_2 lives in the corner e_22 (x) M_2.
  const MatrixUnitSystem outer = instances::amplified_units(2, 2);
  std::vector<Matrix> inner_units;
  for (const auto& f : standard_units(2).units()) inner_units.push_back(tensor_product(unit(2, 1, 1), f));
  const MatrixUnitSystem inner(4, 2, inner_units);
  const NestedProduct np = nested_product({outer, inner});
  EXPECT_EQ(np.system.size(), 4);
  EXPECT_TRUE(verify(np.system).pass);
  EXPECT_TRUE(np.system.is_full());
  EXPECT_EQ(np.diagonal_family.size(), 4u);
  for (const auto& p : np.diagonal_family) EXPECT_NEAR(normalized_trace(p).real(), 0.25, 1e-12);
  auto [x1, x2] = shift_pair(np.system);
  EXPECT_EQ(generate({x1, x2}).dim(), 16);
}

TEST(NestedProduct, ThreeLevelTower) {
  // M_2 (x) M_3 (x) M_2 chain: each level is the next factor placed under
  // e_22 of all previous factors.
  const Eigen::Index n = 12;
  std::vector<Matrix> u1;
  for (const auto& e : standard_units(2).units()) u1.push_back(tensor_product(e, identity(6)));
  const MatrixUnitSystem l1(n, 2, u1);
  // Second level: e_22 (x) M_3 (x) I_2.
  std::vector<Matrix> u2;
  for (const auto& e : standard_units(3).units())
    u2.push_back(tensor_product(tensor_product(unit(2, 1, 1), e), identity(2)));
  const MatrixUnitSystem l2(n, 3, u2);
  // Third level: e_22 (x) e_22 (x) M_2.
  std::vector<Matrix> u3;
  for (const auto& e : standard_units(2).units())
    u3.push_back(tensor_product(tensor_product(unit(2, 1, 1), unit(3, 1, 1)), e));
  const MatrixUnitSystem l3(n, 2, u3);
  const NestedProduct np = nested_product({l1, l2, l3});
  EXPECT_EQ(np.system.size(), 12);
  EXPECT_TRUE(verify(np.system).pass);
  EXPECT_TRUE(np.system.is_full());
}

TEST(NestedProduct, SupportMismatchDetected) {
  const MatrixUnitSystem outer = instances::amplified_units(2, 2);
  std::vector<Matrix> inner_units;
  for (const auto& f : standard_units(2).units()) inner_units.push_back(tensor_product(unit(2, 0, 0), f));
  try {
    nested_product({outer, MatrixUnitSystem(4, 2, inner_units)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SupportMismatch);
  }
}

TEST(NestedProduct, SingleLevelIsIdentityOperation) {
  const MatrixUnitSystem s = standard_units(3);
  const NestedProduct np = nested_product({s});
  EXPECT_EQ(np.system.units(), s.units());
}

TEST(NestedProduct, RandomConjugatedChainsStayValid) {
  Rng rng(43);
  for (int t = 0; t < 10; ++t) {
    const int a = instances::uniform_int(rng, 2, 3);
    const int b = instances::uniform_int(rng, 2, 3);
    const Eigen::Index n = static_cast<Eigen::Index>(a) * b;
    const Matrix u = random_unitary(n, rng);
    const MatrixUnitSystem outer = instances::amplified_units(a, b, &u);
    std::vector<Matrix> inner;
    for (const auto& f : standard_units(b).units())
      inner.push_back(u * tensor_product(unit(a, 1, 1), f) * u.adjoint());
    const NestedProduct np = nested_product({outer, MatrixUnitSystem(n, b, inner)});
    EXPECT_TRUE(verify(np.system).pass);
    EXPECT_TRUE(np.system.is_full());
  }
}
