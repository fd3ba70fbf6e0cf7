#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>

#include "isowalk/plancherel.hpp"

using namespace isowalk;

namespace {

std::shared_ptr<const Spherical> make(Family f, int n, std::vector<double> q) {
  auto rs = std::make_shared<const RootSystem>(f, n);
  auto ps = std::make_shared<const ParameterSystem>(rs, std::move(q));
  return std::make_shared<const Spherical>(ps);
}

std::vector<Coweight> box(int n, int bound) {
  std::vector<Coweight> out;
  Coweight c(n, 0);
  for (;;) {
    out.push_back(c);
    int j = n - 1;
    while (j >= 0 && ++c[j] > bound) c[j--] = 0;
    if (j < 0) break;
  }
  return out;
}

int grid(const Spherical& S) { return Plancherel::grid_size_for(12, S); }

double orthogonality_error(const Plancherel& pl, const Spherical& S, int bound, bool with_exc) {
  double worst = 0;
  for (const Coweight& a : box(S.rank(), bound))
    for (const Coweight& b : box(S.rank(), bound)) {
      cplx v = pl.inner(a, b, with_exc);
      double expected = a == b ? 1.0 / S.params().N(a) : 0.0;
      worst = std::max(worst, std::abs(v - expected));
    }
  return worst;
}

}  // namespace

TEST(Plancherel, StandardOrthogonality) {
  struct Case {
    Family f;
    int n;
    std::vector<double> q;
  };
  for (const Case& c : std::vector<Case>{{Family::A, 1, {2}}, {Family::A, 2, {2}}, {Family::C, 2, {2, 3, 2}},
                                         {Family::BC, 2, {3, 2, 5}}, {Family::G, 2, {2, 3, 2}}}) {
    auto S = make(c.f, c.n, c.q);
    Plancherel pl(S, grid(*S));
    EXPECT_LT(orthogonality_error(pl, *S, 2, true), 1e-10) << S->roots().name();
    EXPECT_LT(pl.max_imaginary_residue(), 1e-10);
  }
}

TEST(Plancherel, A1Example) {
  auto S = make(Family::A, 1, {2});
  Plancherel pl(S, grid(*S));
  EXPECT_NEAR(pl.inner({1}, {1}).real(), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(pl.integrate([](const Character&) { return cplx(1.0); }).real(), 1.0, 1e-12);
}

TEST(Plancherel, ExceptionalAtomRestoresOrthogonality) {
  auto S = make(Family::BC, 1, {4, 2});
  Plancherel pl(S, grid(*S));
  EXPECT_GT(orthogonality_error(pl, *S, 3, false), 1e-2);
  EXPECT_LT(orthogonality_error(pl, *S, 3, true), 1e-10);
  ASSERT_EQ(pl.exceptional_points().size(), 1u);
  EXPECT_GT(pl.exceptional_phi()[0], 0.0);
  cplx mass = pl.integrate([](const Character&) { return cplx(1.0); });
  EXPECT_NEAR(mass.real(), 1.0, 1e-12);
}

TEST(Plancherel, ExceptionalComponentRankTwo) {
  auto S = make(Family::BC, 2, {4, 2, 3});
  Plancherel pl(S, grid(*S));
  EXPECT_GT(orthogonality_error(pl, *S, 2, false), 1e-3);
  EXPECT_LT(orthogonality_error(pl, *S, 2, true), 1e-10);
  for (double phi : pl.exceptional_phi()) {
    EXPECT_TRUE(std::isfinite(phi));
    EXPECT_GT(phi, 0.0);
  }
}

TEST(Plancherel, ExceptionalOnlyWhenFlagged) {
  auto S = make(Family::C, 2, {2, 3, 2});
  Plancherel pl(S, grid(*S));
  EXPECT_FALSE(pl.exceptional());
  EXPECT_TRUE(pl.exceptional_points().empty());
  EXPECT_THROW(pl.integrate_exceptional([](const Character&) { return cplx(1.0); }), ValidationError);
}

TEST(Plancherel, GridDoublingStable) {
  auto S = make(Family::C, 2, {2, 3, 2});
  Plancherel a(S, grid(*S)), b(S, 2 * grid(*S));
  for (const Coweight& l : box(2, 2))
    for (const Coweight& m : box(2, 2)) EXPECT_LT(std::abs(a.inner(l, m) - b.inner(l, m)), 1e-9);
}

TEST(Plancherel, HermitianPositivity) {
  auto S = make(Family::A, 2, {2});
  Plancherel pl(S, grid(*S));
  std::mt19937_64 g(3);
  std::normal_distribution<double> d;
  for (int t = 0; t < 10; ++t) {
    std::map<Coweight, cplx> f;
    for (int k = 0; k < 6; ++k) f[{static_cast<int>(g() % 7) - 3, static_cast<int>(g() % 7) - 3}] = cplx(d(g), d(g));
    cplx v = pl.integrate([&](const Character& z) {
      cplx s = 0;
      for (const auto& [mu, c] : f) s += c * character_power(z, mu);
      return cplx(std::norm(s));
    });
    EXPECT_GE(v.real(), 0.0);
  }
}

TEST(KStep, Examples) {
  auto S = make(Family::A, 1, {2});
  WalkTerms walk{{{1}, 1.0}};
  Plancherel pl(S, grid(*S));
  auto t = pl.kstep_table(walk, {{0}, {1}, {2}}, 2);
  EXPECT_NEAR(t[0][0], 1.0, 1e-12);
  EXPECT_NEAR(t[0][1], 0.0, 1e-12);
  EXPECT_NEAR(t[1][1], 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(t[1][0], 0.0, 1e-12);
  EXPECT_NEAR(t[2][0], 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(t[2][2], 2.0 / 3.0 / 6.0, 1e-12);
}

TEST(KStep, SingleStepIsUniformOnSphere) {
  auto S = make(Family::C, 2, {2, 3, 2});
  WalkTerms walk{{{1, 1}, 1.0}};
  Plancherel pl(S, grid(*S));
  auto lams = box(2, 2);
  auto t = pl.kstep_table(walk, lams, 1);
  for (std::size_t i = 0; i < lams.size(); ++i)
    EXPECT_NEAR(t[1][i], (lams[i] == Coweight{1, 1} ? 1.0 / S->params().N({1, 1}) : 0.0), 1e-12);
}

TEST(KStep, ExceptionalCaseConservesMass) {
  auto S = make(Family::BC, 1, {4, 2});
  WalkTerms walk{{{1}, 0.5}, {{2}, 0.5}};
  std::vector<Coweight> lams;
  for (int k = 0; k <= 12; ++k) lams.push_back({k});
  Plancherel pl(S, Plancherel::grid_size_for(24, *S));
  auto t = pl.kstep_table(walk, lams, 6);
  for (int k = 0; k <= 6; ++k) {
    double total = 0;
    double scale = 0;
    for (std::size_t i = 0; i < lams.size(); ++i) {
      total += t[k][i] * S->params().N(lams[i]);
      scale = std::max(scale, S->params().N(lams[i]));
    }
    // N_λ reaches 1e10 here, so quadrature rounding is amplified by it
    EXPECT_NEAR(total, 1.0, 1e-15 * scale);
  }
}

TEST(Offsets, ClearOfSingularLocus) {
  for (auto [f, n] : std::vector<std::pair<Family, int>>{{Family::A, 2}, {Family::A, 3}, {Family::G, 2}, {Family::D, 4}}) {
    RootSystem R(f, n);
    EXPECT_GT(offset_clearance(R, choose_offsets(R)), 0.05) << R.name();
  }
}

TEST(Dft, RecoversTrigonometricPolynomial) {
  OffsetGrid g;
  g.n = 2;
  g.M = 9;
  g.offset = {0.3, 0.7};
  std::map<Coweight, cplx> f{{{1, -2}, {2.0, 1.0}}, {{-4, 4}, {0.5, 0}}, {{0, 0}, {-1, 0}}};
  std::vector<cplx> v(g.size());
  for (std::size_t p = 0; p < v.size(); ++p) {
    Character z = torus_point(g.point(p));
    for (const auto& [mu, c] : f) v[p] += c * character_power(z, mu);
  }
  std::vector<int> lo{-4, -4};
  auto c = forward_dft(g, v, lo);
  for (std::size_t p = 0; p < c.size(); ++p) {
    Coweight mu = dft_index_to_coweight(g, p, lo);
    cplx expected = f.count(mu) ? f[mu] : cplx(0);
    EXPECT_LT(std::abs(c[p] - expected), 1e-12);
  }
}
