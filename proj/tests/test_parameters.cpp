#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "isowalk/parameters.hpp"

using namespace isowalk;

namespace {

std::shared_ptr<const RootSystem> rs(Family f, int n) { return std::make_shared<const RootSystem>(f, n); }

std::size_t root_index(const RootSystem& R, RatVec v) { return *R.find_root(v); }

}  // namespace

TEST(BuildingMap, Table) {
  EXPECT_EQ(root_system_for_building(AffineType::A, 1, false), Family::BC);
  EXPECT_EQ(root_system_for_building(AffineType::A, 1, true), Family::A);
  EXPECT_EQ(root_system_for_building(AffineType::C, 2, true), Family::C);
  EXPECT_EQ(root_system_for_building(AffineType::C, 3, false), Family::BC);
  EXPECT_EQ(root_system_for_building(AffineType::A, 2, false), Family::A);
  EXPECT_EQ(root_system_for_building(AffineType::G, 2, true), Family::G);
}

TEST(Tau, ReducedEqualsQ) {
  ParameterSystem P(rs(Family::C, 2), {2, 3, 2});
  const RootSystem& R = P.roots();
  for (std::size_t a = 0; a < R.num_roots(); ++a) EXPECT_DOUBLE_EQ(P.tau(a), P.q_root(a));
  // long roots 2e_i carry q_0 = q_2, short roots e_1 ± e_2 carry q_1
  EXPECT_DOUBLE_EQ(P.tau(root_index(R, {Rat(2), Rat(0)})), 2.0);
  EXPECT_DOUBLE_EQ(P.tau(root_index(R, {Rat(1), Rat(-1)})), 3.0);
}

TEST(Tau, BC1Table) {
  ParameterSystem P(rs(Family::BC, 1), {3, 2});
  const RootSystem& R = P.roots();
  EXPECT_DOUBLE_EQ(P.tau(root_index(R, {Rat(2)})), 3.0);
  EXPECT_NEAR(P.tau(root_index(R, {Rat(1)})), 2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(P.tau_ambient({Rat(5)}), 1.0);
  EXPECT_TRUE(P.exceptional());
}

TEST(Tau, ThicknessProduct) {
  ParameterSystem P(rs(Family::BC, 3), {4, 2, 2, 3});
  const RootSystem& R = P.roots();
  for (std::size_t a : R.positive_R2()) EXPECT_GT(P.tau(a) * std::pow(P.tau_double(a), 2), 1.0);
}

TEST(R, Examples) {
  ParameterSystem A1(rs(Family::A, 1), {3.0});
  EXPECT_DOUBLE_EQ(A1.log_r({0}), 0.0);
  EXPECT_NEAR(A1.r({1}), std::sqrt(3.0), 1e-14);
  for (auto [f, n, q] : std::vector<std::tuple<Family, int, std::vector<double>>>{
           {Family::A, 2, {2}}, {Family::C, 3, {2, 3, 3, 2}}, {Family::BC, 2, {5, 2, 3}}, {Family::G, 2, {2, 3, 2}},
           {Family::B, 3, {2, 2, 2, 3}}, {Family::F, 4, {2, 2, 2, 3, 3}}}) {
    ParameterSystem P(rs(f, n), q);
    Coweight c(n);
    for (int j = 0; j < n; ++j) c[j] = 2 * j - 1;
    EXPECT_NEAR(P.log_r(c), P.log_r_product(c), 1e-12 * std::max(1.0, std::abs(P.log_r(c)))) << P.roots().name();
    EXPECT_NEAR(P.log_r(P.weyl().apply(P.weyl().longest(), c)), -P.log_r(c), 1e-12);
  }
}

TEST(R, StrictlyMonotoneInDominance) {
  ParameterSystem P(rs(Family::C, 2), {2, 3, 2});
  const RootSystem& R = P.roots();
  Coweight lam{2, 2};
  for (const Coweight& mu : R.dominant_below(lam))
    if (mu != lam) {
      EXPECT_LT(P.log_r(mu), P.log_r(lam));
    }
}

TEST(N, A1Closed) {
  for (double q : {2.0, 3.0, 5.0}) {
    ParameterSystem P(rs(Family::A, 1), {q});
    EXPECT_NEAR(P.N({0}), 1.0, 1e-12);
    for (int k = 1; k <= 6; ++k) EXPECT_NEAR(P.N({k}), (q + 1) * std::pow(q, k - 1), 1e-9);
  }
}

TEST(N, A2Counts) {
  ParameterSystem P(rs(Family::A, 2), {2.0});
  EXPECT_NEAR(P.N({1, 0}), 7.0, 1e-12);
  EXPECT_NEAR(P.N({0, 1}), 7.0, 1e-12);
  EXPECT_NEAR(P.N({1, 1}), 3.0 * 7.0 * 2.0, 1e-10);
}

TEST(N, StarSymmetricAndIntegral) {
  for (auto [f, n, q] : std::vector<std::tuple<Family, int, std::vector<double>>>{
           {Family::A, 2, {3}}, {Family::C, 2, {2, 3, 2}}, {Family::BC, 2, {4, 2, 3}}, {Family::G, 2, {2, 3, 2}},
           {Family::BC, 1, {4, 2}}, {Family::B, 2, {2, 2, 3}}}) {
    ParameterSystem P(rs(f, n), q);
    for (int a = 0; a <= 3; ++a)
      for (int b = 0; b <= 3; ++b) {
        Coweight c = n == 1 ? Coweight{a} : Coweight{a, b};
        double N = P.N(c);
        EXPECT_NEAR(N, P.N(P.weyl().star(c)), 1e-9 * N);
        EXPECT_GE(N, 1.0);
        EXPECT_NEAR(N, std::round(N), 1e-7 * N) << P.roots().name();
      }
  }
}

TEST(Poincare, A1AndSubsets) {
  ParameterSystem P(rs(Family::A, 1), {2.0});
  EXPECT_NEAR(P.poincare(), 1.5, 1e-15);
  EXPECT_NEAR(P.poincare(P.weyl().stabilizer({0})), 1.5, 1e-15);
  EXPECT_NEAR(P.poincare(P.weyl().stabilizer({1})), 1.0, 1e-15);
}

TEST(Validation, RejectsBadParameters) {
  EXPECT_THROW(ParameterSystem(rs(Family::A, 2), {1.0}), ValidationError);
  EXPECT_THROW(ParameterSystem(rs(Family::A, 2), {2, 3}), ValidationError);
  EXPECT_THROW(ParameterSystem(rs(Family::A, 2), {2, 2, 3}), ValidationError);
  EXPECT_THROW(ParameterSystem(rs(Family::C, 2), {2, 3, 4}), ValidationError);
  EXPECT_THROW(ParameterSystem(rs(Family::BC, 3), {4, 2, 3, 2}), ValidationError);
  // q_1 b = 1.1 * sqrt(2/9) < 1
  EXPECT_THROW(ParameterSystem(rs(Family::BC, 2), {9, 1.1, 2}), ValidationError);
  EXPECT_NO_THROW(ParameterSystem(rs(Family::BC, 2), {4, 2, 3}));
  EXPECT_NO_THROW(ParameterSystem(rs(Family::C, 2), {2, 3, 2}));
  EXPECT_THROW(ParameterSystem(rs(Family::A, 1), {std::nan("")}), ValidationError);
}

TEST(Validation, ExceptionalFlag) {
  EXPECT_TRUE(ParameterSystem(rs(Family::BC, 2), {4, 2, 3}).exceptional());
  EXPECT_FALSE(ParameterSystem(rs(Family::BC, 2), {3, 2, 4}).exceptional());
  EXPECT_FALSE(ParameterSystem(rs(Family::C, 2), {2, 3, 2}).exceptional());
}

TEST(Validation, RealParametersAcceptedAndFlagged) {
  ParameterSystem P(rs(Family::A, 2), {2.5});
  EXPECT_FALSE(P.integral_parameters());
  EXPECT_TRUE(ParameterSystem(rs(Family::A, 2), {2.0}).integral_parameters());
}

TEST(Validation, WeylCapDeferred) {
  ParameterSystem P(rs(Family::E, 8), {2.0});
  EXPECT_FALSE(P.has_weyl());
  EXPECT_THROW(P.poincare(), BudgetError);
  EXPECT_NEAR(P.r({1, 0, 0, 0, 0, 0, 0, 0}), std::exp(P.log_r({1, 0, 0, 0, 0, 0, 0, 0})), 1e-12);
}
