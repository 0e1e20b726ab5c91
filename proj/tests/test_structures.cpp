#include "holoforge/liealg.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>

using namespace holoforge;
using namespace holoforge::test;

namespace {

// Signed coefficient tables written out independently of the library.
const std::vector<std::pair<std::vector<int>, int>> kPhi = {
    {{1, 2, 3}, 1}, {{1, 4, 5}, 1}, {{1, 6, 7}, -1}, {{2, 4, 6}, 1},
    {{2, 5, 7}, 1}, {{3, 4, 7}, 1}, {{3, 5, 6}, -1}};
const std::vector<std::pair<std::vector<int>, int>> kTheta = {
    {{1, 2, 3, 4}, 1}, {{1, 2, 5, 6}, 1},  {{1, 2, 7, 8}, -1}, {{1, 3, 5, 7}, 1}, {{1, 3, 6, 8}, 1},
    {{1, 4, 5, 8}, 1}, {{1, 4, 6, 7}, -1}, {{5, 6, 7, 8}, 1},  {{3, 4, 5, 6}, -1}, {{2, 4, 5, 7}, 1},
    {{2, 3, 5, 8}, -1}, {{2, 3, 6, 7}, 1}, {{3, 4, 7, 8}, 1},  {{2, 4, 6, 8}, 1}};

std::map<std::vector<int>, double> table_of(const AlternatingForm& f) {
  std::map<std::vector<int>, double> m;
  for (const auto& t : f.terms()) {
    std::vector<int> idx;
    for (int i : t.indices) idx.push_back(i + 1);
    m[idx] += t.coefficient;
  }
  return m;
}

}  // namespace

TEST(GroupSpec, AmbientDimensions) {
  EXPECT_EQ(GroupSpec(Family::SO, 5).ambient_dim(), 5);
  EXPECT_EQ(GroupSpec(Family::U, 3).ambient_dim(), 6);
  EXPECT_EQ(GroupSpec(Family::SU, 3).ambient_dim(), 6);
  EXPECT_EQ(GroupSpec(Family::Sp, 2).ambient_dim(), 8);
  EXPECT_EQ(GroupSpec(Family::SpU1, 2).ambient_dim(), 8);
  EXPECT_EQ(GroupSpec(Family::SpSp1, 3).ambient_dim(), 12);
  EXPECT_EQ(GroupSpec(Family::G2).ambient_dim(), 7);
  EXPECT_EQ(GroupSpec(Family::Spin7).ambient_dim(), 8);
  EXPECT_EQ(GroupSpec(Family::Spin9).ambient_dim(), 16);
}

TEST(GroupSpec, ParameterRanges) {
  EXPECT_THROW(GroupSpec(Family::U, 1), std::invalid_argument);
  EXPECT_THROW(GroupSpec(Family::SU, 2), std::invalid_argument);
  EXPECT_THROW(GroupSpec(Family::SpU1, 1), std::invalid_argument);
  EXPECT_THROW(GroupSpec(Family::SpSp1, 1), std::invalid_argument);
  EXPECT_NO_THROW(GroupSpec(Family::SU, 3));
  EXPECT_NO_THROW(GroupSpec(Family::Sp, 1));
}

TEST(GroupSpec, TokensRoundTrip) {
  for (Family f : kAllFamilies) EXPECT_EQ(parse_family(family_token(f)), f);
  EXPECT_FALSE(parse_family("e8").has_value());
}

TEST(Structures, ComplexStructureSquaresToMinusOne) {
  auto pack = build_structures(GroupSpec(Family::U, 2));
  const Operator& i = pack.op("I");
  EXPECT_EQ(i * i, -Matrix::Identity(4, 4));
  EXPECT_EQ(i * e(4, 0), e(4, 1));
}

TEST(Structures, QuaternionRelationsExact) {
  auto pack = build_structures(GroupSpec(Family::Sp, 2));
  const Operator &i = pack.op("I"), &j = pack.op("J"), &k = pack.op("K");
  const Matrix id = Matrix::Identity(8, 8);
  EXPECT_EQ(i * i, -id);
  EXPECT_EQ(j * j, -id);
  EXPECT_EQ(k * k, -id);
  EXPECT_EQ(i * j, k);
  EXPECT_EQ(j * k, i);
  EXPECT_EQ(k * i, j);
  EXPECT_EQ(i * j, -(j * i));
}

TEST(Structures, CliffordRelationsExact) {
  auto pack = build_structures(GroupSpec(Family::Spin9));
  ASSERT_EQ(pack.operators.size(), 9u);
  const Matrix id = Matrix::Identity(16, 16);
  Matrix gram(9, 9);
  for (int a = 0; a < 9; ++a) {
    const Operator& ia = pack.operators[a].matrix;
    EXPECT_EQ(ia, ia.transpose());
    for (int b = 0; b < 9; ++b) {
      const Operator& ib = pack.operators[b].matrix;
      EXPECT_EQ(ia * ib + ib * ia, (a == b ? 2.0 : 0.0) * id);
      gram(a, b) = (ia.cwiseProduct(ib)).sum();
    }
  }
  EXPECT_EQ(Eigen::FullPivLU<Matrix>(gram).rank(), 9);
}

TEST(Structures, RelationCountsAndPass) {
  std::map<Family, std::size_t> expected{{Family::U, 2}, {Family::Sp, 9}, {Family::Spin9, 54}, {Family::G2, 1}};
  for (auto [f, count] : expected) {
    GroupSpec s(f, f == Family::U || f == Family::Sp ? 2 : 0);
    auto rel = structure_relations(build_structures(s));
    EXPECT_EQ(rel.size(), count);
    for (const auto& c : rel) EXPECT_TRUE(c.passed) << c.name;
  }
  auto rel9 = structure_relations(build_structures(GroupSpec(Family::Spin9)));
  auto anti = std::count_if(rel9.begin(), rel9.end(), [](const RelationCheck& c) {
    return c.name.find("= -") != std::string::npos;
  });
  EXPECT_EQ(anti, 36);
}

TEST(Forms, PhiTableMatches) {
  const auto pack = build_structures(GroupSpec(Family::G2));
  const auto& phi = pack.form("phi");
  auto t = table_of(phi);
  ASSERT_EQ(t.size(), 7u);
  for (const auto& [idx, c] : kPhi) EXPECT_EQ(t.at(idx), c);
}

TEST(Forms, ThetaTableMatches) {
  const auto pack = build_structures(GroupSpec(Family::Spin7));
  const auto& theta = pack.form("theta");
  auto t = table_of(theta);
  ASSERT_EQ(t.size(), 14u);
  for (const auto& [idx, c] : kTheta) EXPECT_EQ(t.at(idx), c);
  EXPECT_EQ(theta.terms()[0].indices, (std::vector<int>{0, 1, 2, 3}));
  EXPECT_EQ(theta.terms()[2].coefficient, -1.0);
}

TEST(Forms, EvaluationOnBasisTuplesReproducesTables) {
  for (const auto& [form, table] : {std::pair{&g2_form(), &kPhi}, std::pair{&spin7_form(), &kTheta}}) {
    std::map<std::vector<int>, int> ref(table->begin(), table->end());
    const Index n = form->ambient_dim();
    for (const auto& tuple : form->increasing_tuples()) {
      std::vector<Vector> args;
      std::vector<int> one_based;
      for (int i : tuple) {
        args.push_back(e(n, i));
        one_based.push_back(i + 1);
      }
      const double v = form->evaluate(std::span<const Vector>(args));
      auto it = ref.find(one_based);
      EXPECT_EQ(v, it == ref.end() ? 0.0 : it->second);
    }
  }
}

TEST(Forms, Alternating) {
  std::mt19937_64 rng(2);
  Vector x = gaussian(7, rng), y = gaussian(7, rng), z = gaussian(7, rng);
  EXPECT_NEAR(g2_form().evaluate({x, y, z}), -g2_form().evaluate({y, x, z}), 1e-12);
  EXPECT_NEAR(g2_form().evaluate({x, y, z}), g2_form().evaluate({y, z, x}), 1e-12);
}

TEST(CrossProduct, BasisValue) { EXPECT_EQ(cross_product(e(7, 0), e(7, 1)), e(7, 2)); }

TEST(CrossProduct, AlternatingAndOrthogonal) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    Vector x = gaussian(7, rng), y = gaussian(7, rng);
    EXPECT_LT(cross_product(x, x).norm(), 1e-14);
    EXPECT_NEAR(cross_product(x, y).dot(x), 0.0, 1e-12);
    EXPECT_NEAR(cross_product(x, y).squaredNorm(), x.squaredNorm() * y.squaredNorm() - std::pow(x.dot(y), 2),
                1e-9);
  }
}

TEST(TripleCross, BasisValueAndAlternation) {
  EXPECT_EQ(triple_cross(e(8, 0), e(8, 1), e(8, 2)), e(8, 3));
  std::mt19937_64 rng(4);
  Vector x = gaussian(8, rng), y = gaussian(8, rng), z = gaussian(8, rng);
  EXPECT_LT(triple_cross(x, y, 2.0 * x - y).norm(), 1e-12);
  EXPECT_NEAR(triple_cross(x, y, z).dot(y), 0.0, 1e-12);
}

TEST(ThetaPointCross, CircleLoopValue) {
  Vector base = Vector::Zero(8), x = Vector::Zero(8), y = Vector::Zero(8);
  base << 0.6, 0, 0, 0.8, 0, 0, 0, 0;
  x(1) = 0.6;
  y(2) = 0.36;
  y(5) = -0.48;
  Vector expected(8);
  expected << -0.1728, 0, 0, 0.1296, 0.1728, 0, 0, 0.2304;
  EXPECT_LT((theta_point_cross(base, x, y) - expected).cwiseAbs().maxCoeff(), 1e-15);
  // the closed form in r
  const double r = 0.6, s = std::sqrt(1 - r * r);
  Vector z0(8);
  z0 << -r * r * r * s, 0, 0, std::pow(r, 4), r * r * r * s, 0, 0, r * r * (1 - r * r);
  EXPECT_LT((expected - z0).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ThetaPointCross, DegenerateArguments) {
  std::mt19937_64 rng(5);
  Vector base = unit(8, rng), x = gaussian(8, rng), y = gaussian(8, rng);
  EXPECT_NEAR(theta_point_cross(base, base, y).dot(base), 0.0, 1e-12);
  EXPECT_LT(theta_point_cross(base, x, x).norm(), 1e-12);
  EXPECT_THROW(theta_point_cross(2.0 * base, x, y), std::invalid_argument);
}

TEST(Membership, IdentityIsEverywhere) {
  for (Family f : kAllFamilies) {
    GroupSpec s(f, f == Family::SU ? 3 : 2);
    EXPECT_TRUE(is_member(s, Matrix::Identity(s.ambient_dim(), s.ambient_dim()))) << s.name();
  }
}

TEST(Membership, ReflectionIsNotInG2OrSpin7) {
  for (Family f : {Family::G2, Family::Spin7}) {
    const auto pack = build_structures(GroupSpec(f));
    const Index n = pack.spec.ambient_dim();
    Operator d = Operator::Identity(n, n);
    d(0, 0) = -1;
    EXPECT_FALSE(is_member(pack, d));
    // the first coefficient of the pulled-back form changes sign
    const auto& form = pack.forms.front().form;
    EXPECT_EQ(form.pulled_back_values(d)(0), -form.basis_values()(0));
  }
}

TEST(Membership, ProductsOfMembersAreMembers) {
  std::mt19937_64 rng(6);
  for (const auto& s : {GroupSpec(Family::SU, 3), GroupSpec(Family::SpU1, 2), GroupSpec(Family::G2),
                        GroupSpec(Family::Spin9)}) {
    auto pack = build_structures(s);
    auto alg = algebra_basis(pack);
    for (int t = 0; t < 100; ++t) {
      Operator g1 = exp_element(random_element(alg, rng)), g2 = exp_element(random_element(alg, rng));
      ASSERT_TRUE(is_member(pack, g1 * g2)) << s.name();
    }
  }
}

TEST(Membership, UnitaryButNotSpecial) {
  auto pack = build_structures(GroupSpec(Family::SU, 3));
  // complex multiplication by e^{i t} on the first coordinate only
  Operator g = Operator::Identity(6, 6);
  const double t = 0.7;
  g(0, 0) = g(1, 1) = std::cos(t);
  g(1, 0) = std::sin(t);
  g(0, 1) = -std::sin(t);
  EXPECT_TRUE(is_member(GroupSpec(Family::U, 3), g));
  EXPECT_FALSE(is_member(pack, g));
}

TEST(Membership, DimensionMismatchThrows) {
  EXPECT_THROW(is_member(GroupSpec(Family::G2), Matrix::Identity(8, 8)), std::invalid_argument);
}
