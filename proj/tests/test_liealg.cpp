#include "holoforge/liealg.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace holoforge;
using namespace holoforge::test;

namespace {

std::vector<GroupSpec> instances() {
  return {GroupSpec(Family::SO, 5),    GroupSpec(Family::SO, 7),   GroupSpec(Family::U, 2),
          GroupSpec(Family::U, 3),     GroupSpec(Family::SU, 3),   GroupSpec(Family::SU, 4),
          GroupSpec(Family::Sp, 2),    GroupSpec(Family::Sp, 3),   GroupSpec(Family::SpU1, 2),
          GroupSpec(Family::SpSp1, 2), GroupSpec(Family::G2),      GroupSpec(Family::Spin7),
          GroupSpec(Family::Spin9)};
}

// Classical dimension formulas, restated here as the oracle.
Index classical_dim(const GroupSpec& s) {
  const Index n = s.n();
  switch (s.family()) {
    case Family::SO: return n * (n - 1) / 2;
    case Family::U: return n * n;
    case Family::SU: return n * n - 1;
    case Family::Sp: return n * (2 * n + 1);
    case Family::SpU1: return n * (2 * n + 1) + 1;
    case Family::SpSp1: return n * (2 * n + 1) + 3;
    case Family::G2: return 14;
    case Family::Spin7: return 21;
    case Family::Spin9: return 36;
  }
  return -1;
}

}  // namespace

TEST(AlgebraBasis, DimensionsMatchClassicalFormulas) {
  for (const auto& s : instances()) EXPECT_EQ(algebra_basis(s).dim(), classical_dim(s)) << s.name();
}

TEST(AlgebraBasis, G2DimensionAgainstExtendedPrecisionRank) {
  // derivation constraints A.phi = 0 assembled from the coefficient table in long double
  using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const int phi[7][3] = {{0, 1, 2}, {0, 3, 4}, {0, 5, 6}, {1, 3, 5}, {1, 4, 6}, {2, 3, 6}, {2, 4, 5}};
  const int sign[7] = {1, 1, -1, 1, 1, 1, -1};
  const auto eval = [&](const LMatrix& u) {  // u: 7 x 3 arguments
    long double sum = 0;
    for (int t = 0; t < 7; ++t) {
      LMatrix m(3, 3);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) m(a, b) = u(phi[t][a], b);
      sum += sign[t] * m.determinant();
    }
    return sum;
  };
  std::vector<std::array<int, 3>> triples;
  for (int i = 0; i < 7; ++i)
    for (int j = i + 1; j < 7; ++j)
      for (int k = j + 1; k < 7; ++k) triples.push_back({i, j, k});
  LMatrix c(35, 21);
  int col = 0;
  for (int p = 0; p < 7; ++p)
    for (int q = p + 1; q < 7; ++q, ++col) {
      LMatrix a = LMatrix::Zero(7, 7);
      a(p, q) = 1;
      a(q, p) = -1;
      for (int r = 0; r < 35; ++r) {
        long double v = 0;
        for (int slot = 0; slot < 3; ++slot) {
          LMatrix u = LMatrix::Zero(7, 3);
          for (int s = 0; s < 3; ++s) {
            if (s == slot) u.col(s) = a.col(triples[r][s]);
            else u(triples[r][s], s) = 1;
          }
          v -= eval(u);
        }
        c(r, col) = v;
      }
    }
  Eigen::FullPivLU<LMatrix> lu(c);
  lu.setThreshold(1e-15L);
  EXPECT_EQ(21 - lu.rank(), 14);
  EXPECT_EQ(algebra_basis(GroupSpec(Family::G2)).dim(), 21 - lu.rank());
}

TEST(AlgebraBasis, ClosureAntisymmetryIndependence) {
  for (const auto& s : instances()) {
    auto alg = algebra_basis(s);
    EXPECT_LT(bracket_closure_residual(alg), 1e-8) << s.name();
    EXPECT_LT(antisymmetry_defect(alg), 1e-9) << s.name();
    Matrix gram(alg.dim(), alg.dim());
    for (Index i = 0; i < alg.dim(); ++i)
      for (Index j = 0; j < alg.dim(); ++j) gram(i, j) = alg.elements[i].cwiseProduct(alg.elements[j]).sum();
    EXPECT_LT((gram - Matrix::Identity(alg.dim(), alg.dim())).cwiseAbs().maxCoeff(), 1e-9) << s.name();
  }
}

TEST(AlgebraBasis, ExponentialsAreMembers) {
  std::mt19937_64 rng(21);
  for (const auto& s : instances()) {
    auto pack = build_structures(s);
    auto alg = algebra_basis(pack);
    for (int t = 0; t < 20; ++t)
      ASSERT_LT(membership_residual(pack, exp_element(random_element(alg, rng))), 1e-8) << s.name();
  }
}

TEST(AlgebraBasis, SpecialUnitaryTraceMatchesDeterminant) {
  // exponentials of u(3) elements outside su(3) fail the complex determinant test
  auto su = build_structures(GroupSpec(Family::SU, 3));
  Operator a = 0.3 * su.op("I");
  EXPECT_TRUE(is_member(GroupSpec(Family::U, 3), exp_element(a)));
  EXPECT_FALSE(is_member(su, exp_element(a)));
}

TEST(AlgebraBasis, DerivationSignMatchesFiniteDifference) {
  auto alg = algebra_basis(GroupSpec(Family::SO, 7));
  std::mt19937_64 rng(22);
  Operator a = random_element(alg, rng);
  const double h = 1e-5;
  // d/dt at t = 0 of the pullback by exp(tA)^{-1} = exp(tA)^T
  Vector fd = (g2_form().pulled_back_values(exp_element(a, h).transpose()) -
               g2_form().pulled_back_values(exp_element(a, -h).transpose())) / (2 * h);
  EXPECT_LT((fd - g2_form().derivation_values(a)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(PointwiseStabilizer, SU3Line) {
  EXPECT_EQ(pointwise_stabilizer_algebra(GroupSpec(Family::SU, 3), span_of({e(6, 0)})).dim(), 3);
}

TEST(PointwiseStabilizer, G2RandomLine) {
  std::mt19937_64 rng(23);
  EXPECT_EQ(pointwise_stabilizer_algebra(GroupSpec(Family::G2), span_of({unit(7, rng)})).dim(), 8);
}

TEST(PointwiseStabilizer, WholeSpace) {
  EXPECT_EQ(pointwise_stabilizer_algebra(GroupSpec(Family::SO, 3), SubspaceBasis::full(3)).dim(), 0);
}

TEST(PointwiseStabilizer, DimensionMismatch) {
  EXPECT_THROW(pointwise_stabilizer_algebra(GroupSpec(Family::SO, 3), span_of({e(4, 0)})), std::invalid_argument);
}

TEST(SetwiseStabilizer, SO5Plane) {
  EXPECT_EQ(setwise_stabilizer_algebra(GroupSpec(Family::SO, 5), span_of({e(5, 0), e(5, 1)})).dim(), 4);
}

TEST(SetwiseStabilizer, U2Line) {
  // A x in span{x} forces A x = 0 for antisymmetric A, so the setwise and
  // pointwise algebras of a line coincide: u(1) on the complex complement.
  std::mt19937_64 rng(24);
  const auto p = span_of({unit(4, rng)});
  auto set = setwise_stabilizer_algebra(GroupSpec(Family::U, 2), p);
  auto point = pointwise_stabilizer_algebra(GroupSpec(Family::U, 2), p);
  EXPECT_EQ(set.dim(), 1);
  EXPECT_EQ(point.dim(), 1);
  EXPECT_EQ(algebra_basis(GroupSpec(Family::U, 2)).dim() - 3, set.dim());  // orbit S^3 has dim 3
}

TEST(SetwiseStabilizer, Spin9Line) {
  std::mt19937_64 rng(25);
  EXPECT_EQ(setwise_stabilizer_algebra(GroupSpec(Family::Spin9), span_of({unit(16, rng)})).dim(), 21);
}

TEST(Stabilizers, PointwiseInsideSetwise) {
  std::mt19937_64 rng(26);
  for (const auto& s : instances()) {
    const Index n = s.ambient_dim();
    const auto p = span_of({unit(n, rng), unit(n, rng)});
    auto alg = algebra_basis(s);
    auto point = pointwise_stabilizer_algebra(alg, p);
    auto set = setwise_stabilizer_algebra(alg, p);
    for (const auto& a : point.elements) EXPECT_LT(span_projection_residual(set, a), 1e-8) << s.name();
  }
}

TEST(Stabilizers, ConjugationEquivariance) {
  std::mt19937_64 rng(27);
  for (const auto& s : {GroupSpec(Family::SpSp1, 2), GroupSpec(Family::G2), GroupSpec(Family::Spin9)}) {
    const Index n = s.ambient_dim();
    auto alg = algebra_basis(s);
    const auto p = span_of({unit(n, rng), unit(n, rng)});
    const Operator g = exp_element(random_element(alg, rng));
    const auto gp = orthonormalize(Matrix(g * p.matrix()));
    EXPECT_EQ(pointwise_stabilizer_algebra(alg, p).dim(), pointwise_stabilizer_algebra(alg, gp).dim());
    EXPECT_EQ(setwise_stabilizer_algebra(alg, p).dim(), setwise_stabilizer_algebra(alg, gp).dim());
  }
}

TEST(Stabilizers, SpSp1LineFixesOnlyItself) {
  std::mt19937_64 rng(28);
  const auto p = span_of({unit(8, rng)});
  auto h = pointwise_stabilizer_algebra(GroupSpec(Family::SpSp1, 2), p);
  EXPECT_TRUE(same_subspace(fixed_subspace(h.elements, 8), p));
}

TEST(Exp, ZeroAndQuarterTurn) {
  EXPECT_TRUE(exp_element(Operator::Zero(3, 3)).isApprox(Matrix::Identity(3, 3)));
  Operator r = exp_element(rotation_generator(3, 0, 1), M_PI / 2);
  EXPECT_LT((r * e(3, 0) - e(3, 1)).norm(), 1e-14);
}

TEST(Exp, OrthogonalToMachinePrecision) {
  std::mt19937_64 rng(29);
  auto alg = algebra_basis(GroupSpec(Family::SO, 9));
  Operator g = exp_element(random_element(alg, rng, 3.0));
  EXPECT_LT((g.transpose() * g - Matrix::Identity(9, 9)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Exp, RejectsNonAntisymmetric) {
  EXPECT_THROW(exp_element(Matrix::Identity(3, 3)), std::invalid_argument);
}
