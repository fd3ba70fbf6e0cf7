#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "isowalk/walk.hpp"
#include "oracles.hpp"

using namespace isowalk;

namespace {

std::shared_ptr<const Spherical> make(Family f, int n, std::vector<double> q) {
  auto rs = std::make_shared<const RootSystem>(f, n);
  auto ps = std::make_shared<const ParameterSystem>(rs, std::move(q));
  return std::make_shared<const Spherical>(ps);
}

WalkAnalysis analysis(std::shared_ptr<const Spherical> S, WalkTerms t) {
  WalkSpec w(S->roots(), t);
  return WalkAnalysis(std::move(S), std::move(w));
}

Coweight unit(int n, int j) {
  Coweight c(n, 0);
  c[j] = 1;
  return c;
}

}  // namespace

TEST(WalkSpec, NormalisesAndMerges) {
  RootSystem R(Family::A, 2);
  WalkSpec w(R, {{{1, 0}, 2.0}, {{0, 1}, 1.0}, {{1, 0}, 1.0}, {{0, 0}, 0.0}});
  ASSERT_EQ(w.terms().size(), 2u);
  EXPECT_NEAR(w.weight({1, 0}), 0.75, 1e-15);
  EXPECT_NEAR(w.weight({0, 1}), 0.25, 1e-15);
  EXPECT_EQ(w.designated(), (Coweight{0, 1}));
}

TEST(WalkSpec, Rejects) {
  RootSystem R(Family::A, 2);
  EXPECT_THROW(WalkSpec(R, {{{0, 0}, 1.0}}), ValidationError);
  EXPECT_THROW(WalkSpec(R, {{{-1, 1}, 1.0}}), ValidationError);
  EXPECT_THROW(WalkSpec(R, {{{1}, 1.0}}), ValidationError);
  EXPECT_THROW(WalkSpec(R, {{{1, 0}, -0.5}, {{0, 1}, 1.5}}), ValidationError);
  EXPECT_THROW(WalkSpec(R, {{{1, 0}, std::nan("")}}), ValidationError);
  EXPECT_THROW(WalkSpec(R, {}), ValidationError);
}

TEST(AHat, ValueAtROneAndSpectralRadius) {
  auto S = make(Family::A, 1, {2});
  auto A = analysis(S, {{{1}, 1.0}});
  EXPECT_NEAR(A.a_hat_one(), 2.0 * std::sqrt(2.0) / 3.0, 1e-12);
  EXPECT_NEAR(std::abs(A.a_hat(r_character(S->params())) - 1.0), 0.0, 1e-12);

  auto S2 = make(Family::C, 2, {2, 3, 2});
  auto B = analysis(S2, {{{1, 0}, 0.3}, {{1, 1}, 0.5}, {{0, 0}, 0.2}});
  EXPECT_NEAR(std::abs(B.a_hat(r_character(S2->params())) - 1.0), 0.0, 1e-10);
  EXPECT_NEAR(std::abs(B.a_hat(r_character(S2->params(), -1)) - 1.0), 0.0, 1e-10);
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> d(0, 2 * std::numbers::pi);
  for (int t = 0; t < 50; ++t) EXPECT_LE(std::abs(B.a_hat(torus_point({d(g), d(g)}))), B.a_hat_one() + 1e-12);
}

TEST(SymmetryGroup, Examples) {
  auto S = make(Family::A, 1, {2});
  auto nn = analysis(S, {{{1}, 1.0}});
  EXPECT_EQ(nn.symmetry_group().size(), 2u);
  EXPECT_EQ(nn.period(), 2);
  EXPECT_TRUE(nn.irreducible());
  EXPECT_FALSE(nn.aperiodic());
  EXPECT_TRUE(nn.congruent({0}, 4));
  EXPECT_FALSE(nn.congruent({0}, 5));
  EXPECT_TRUE(nn.congruent({1}, 5));

  auto lazy = analysis(S, {{{0}, 0.5}, {{1}, 0.5}});
  EXPECT_EQ(lazy.symmetry_group().size(), 1u);
  EXPECT_TRUE(lazy.aperiodic());

  auto bc = analysis(make(Family::BC, 1, {4, 2}), {{{2}, 1.0}});
  EXPECT_EQ(bc.symmetry_group().size(), 1u);
  EXPECT_TRUE(bc.aperiodic());
  EXPECT_TRUE(bc.irreducible());

  auto a2 = analysis(make(Family::A, 2, {2}), {{{1, 0}, 1.0}});
  EXPECT_EQ(a2.symmetry_group().size(), 3u);
  EXPECT_EQ(a2.period(), 3);
  auto a2q = analysis(make(Family::A, 2, {2}), {{{1, 1}, 1.0}});
  EXPECT_EQ(a2q.period(), 1);
  EXPECT_EQ(a2q.symmetry_group().size(), 3u);
  EXPECT_FALSE(a2q.irreducible());
}

TEST(SymmetryGroup, LazyWalksAreAperiodic) {
  for (auto [f, n, q] : std::vector<std::tuple<Family, int, std::vector<double>>>{
           {Family::A, 2, {2}}, {Family::A, 3, {3}}, {Family::D, 4, {2}}, {Family::C, 2, {2, 3, 2}}}) {
    auto S = make(f, n, q);
    auto A = analysis(S, {{Coweight(n, 0), 0.25}, {unit(n, 0), 0.75}});
    EXPECT_TRUE(A.aperiodic()) << S->roots().name();
  }
}

TEST(Horocycle, A1TwoPointLaw) {
  for (double q : {2.0, 3.0, 7.0}) {
    auto A = analysis(make(Family::A, 1, {q}), {{{1}, 1.0}});
    auto d = A.horocycle_distribution({1});
    ASSERT_EQ(d.mass.size(), 2u);
    EXPECT_NEAR(d.mass.at({1}), 1.0 / (q + 1), 1e-13);
    EXPECT_NEAR(d.mass.at({-1}), q / (q + 1), 1e-13);
    auto d0 = A.horocycle_distribution({0});
    ASSERT_EQ(d0.mass.size(), 1u);
    EXPECT_NEAR(d0.mass.at({0}), 1.0, 1e-15);
  }
}

TEST(Horocycle, ProbabilityInPiLambda) {
  auto S = make(Family::G, 2, {2, 3, 2});
  auto A = analysis(S, {{{1, 0}, 1.0}});
  for (const Coweight& lam : std::vector<Coweight>{{1, 0}, {0, 1}, {2, 1}}) {
    auto d = A.horocycle_distribution(lam);
    EXPECT_NEAR(d.total(), 1.0, 1e-10);
    auto sat = S->roots().saturated_set(lam);
    for (const auto& [mu, p] : d.mass) {
      EXPECT_GE(p, 0.0);
      EXPECT_TRUE(std::find(sat.begin(), sat.end(), mu) != sat.end());
    }
  }
}

TEST(Horocycle, MeanIsMinusStarDrift) {
  auto S = make(Family::A, 2, {2});
  const WeylGroup& W = S->params().weyl();
  for (const Coweight& lam : std::vector<Coweight>{{1, 0}, {2, 1}, {0, 3}}) {
    auto A = analysis(S, {{lam, 1.0}});
    auto m = A.horocycle_distribution(lam).mean();
    auto g = A.drift();
    for (int j = 0; j < 2; ++j) {
      // mean expressed in coweight coordinates: <m,α_j> = -γ_{j*}
      EXPECT_NEAR(m[j], -g[W.star_index(j)], 1e-10);
    }
  }
}

TEST(Drift, A1Closed) {
  for (double q : {2.0, 3.0, 5.0}) {
    auto A = analysis(make(Family::A, 1, {q}), {{{1}, 1.0}});
    EXPECT_NEAR(A.drift()[0], (q - 1) / (q + 1), 1e-13);
    EXPECT_NEAR(A.second_moment()[0][0], 1.0, 1e-13);
    EXPECT_NEAR(A.covariance()[0][0], 4 * q / ((q + 1) * (q + 1)), 1e-13);
  }
}

TEST(Drift, A2Value) {
  auto A = analysis(make(Family::A, 2, {2}), {{{1, 0}, 1.0}});
  auto g = A.drift();
  EXPECT_NEAR(g[0], 2.0 / 7.0, 1e-12);
  EXPECT_NEAR(g[1], 1.0 / 7.0, 1e-12);
}

TEST(Drift, TwoFormsAndStarSymmetry) {
  for (auto [f, n, q] : std::vector<std::tuple<Family, int, std::vector<double>>>{
           {Family::A, 2, {2}}, {Family::A, 3, {3}}, {Family::C, 2, {2, 3, 2}}, {Family::G, 2, {2, 3, 2}},
           {Family::BC, 2, {4, 2, 3}}, {Family::D, 4, {2}}}) {
    auto S = make(f, n, q);
    const WeylGroup& W = S->params().weyl();
    auto A = analysis(S, {{unit(n, 0), 1.0}});
    std::vector<Coweight> lams{unit(n, 0), unit(n, n - 1)};
    Coweight mix(n, 0);
    mix[0] = 2;
    mix[n - 1] += 1;
    lams.push_back(mix);
    for (const Coweight& lam : lams) {
      auto a = A.drift_lambda(lam), b = A.drift_lambda_star_form(lam);
      auto s = A.drift_lambda(W.star(lam));
      for (int j = 0; j < n; ++j) {
        EXPECT_NEAR(a[j], b[j], 1e-9) << S->roots().name();
        EXPECT_NEAR(s[j], a[W.star_index(j)], 1e-9) << S->roots().name();
      }
    }
  }
}

TEST(Drift, PositiveOnRandomWalks) {
  std::mt19937_64 g(11);
  for (auto [f, q] : std::vector<std::pair<Family, std::vector<double>>>{
           {Family::A, {2}}, {Family::C, {2, 3, 2}}, {Family::G, {2, 3, 2}}, {Family::BC, {4, 2, 3}}}) {
    auto S = make(f, 2, q);
    for (int t = 0; t < 5; ++t) {
      WalkTerms terms{{{static_cast<int>(g() % 3) + 1, static_cast<int>(g() % 3)}, 0.5}};
      for (int s = 0; s < 3; ++s)
        terms.push_back({{static_cast<int>(g() % 3), static_cast<int>(g() % 3)}, 0.1 + (g() % 100) / 100.0});
      auto A = analysis(S, terms);
      for (double gj : A.drift()) EXPECT_GT(gj, 0.0) << S->roots().name();
    }
  }
}

TEST(Drift, DeviationFromLambdaBounded) {
  for (auto [f, q] : std::vector<std::pair<Family, std::vector<double>>>{{Family::A, {2}}, {Family::C, {2, 3, 2}}}) {
    auto S = make(f, 2, q);
    auto A = analysis(S, {{{1, 0}, 1.0}});
    std::vector<double> dev;
    for (int k = 1; k <= 20; ++k) {
      auto gk = A.drift_lambda({k, 0});
      double d = 0;
      for (int j = 0; j < 2; ++j) d = std::max(d, std::abs(gk[j] - (j == 0 ? k : 0)));
      dev.push_back(d);
    }
    // deviations settle to a constant rather than growing with k
    EXPECT_LT(std::abs(dev[19] - dev[18]), 1e-3);
    for (double d : dev) EXPECT_LE(d, 2.0 * dev.back() + 1.0);
  }
}

TEST(Covariance, PositiveDefinite) {
  std::mt19937_64 g(2);
  std::normal_distribution<double> nd;
  for (auto [f, n, q] : std::vector<std::tuple<Family, int, std::vector<double>>>{
           {Family::A, 2, {2}}, {Family::C, 2, {2, 3, 2}}, {Family::G, 2, {2, 3, 2}}, {Family::BC, 2, {4, 2, 3}},
           {Family::B, 3, {2, 2, 2, 3}}}) {
    auto S = make(f, n, q);
    auto A = analysis(S, {{unit(n, 0), 0.6}, {unit(n, n - 1), 0.4}});
    auto G = A.covariance();
    Eigen::MatrixXd M(n, n);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) M(j, k) = G[j][k];
    EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(M).info(), Eigen::Success) << S->roots().name();
    for (int t = 0; t < 10; ++t) {
      Eigen::VectorXd th(n);
      for (int j = 0; j < n; ++j) th(j) = nd(g);
      EXPECT_GT(th.dot(M * th), 0.0);
    }
  }
}

TEST(Covariance, BProportional) {
  for (auto [f, n, q] : std::vector<std::tuple<Family, int, std::vector<double>>>{
           {Family::A, 1, {2}}, {Family::A, 2, {2}}, {Family::C, 2, {2, 3, 2}}, {Family::BC, 1, {4, 2}},
           {Family::G, 2, {2, 3, 2}}, {Family::A, 3, {2}}}) {
    auto S = make(f, n, q);
    auto A = analysis(S, {{unit(n, 0), 0.7}, {unit(n, n - 1), 0.3}});
    auto [b, res] = A.b_proportionality();
    EXPECT_GT(b, 0.0);
    EXPECT_LT(res, 1e-9) << S->roots().name();
  }
}

TEST(Llt, JClosedForms) {
  EXPECT_NEAR(WalkAnalysis::j_integral(RootSystem(Family::B, 2)), 12 * std::numbers::pi, 1e-9);
  EXPECT_NEAR(WalkAnalysis::j_integral(RootSystem(Family::C, 2)), 3 * std::numbers::pi / 8, 1e-10);
  for (auto [f, n] : std::vector<std::pair<Family, int>>{
           {Family::B, 2}, {Family::B, 3}, {Family::C, 2}, {Family::C, 3}, {Family::BC, 2}, {Family::D, 4}}) {
    RootSystem R(f, n);
    double closed = *j_closed_form(R);
    EXPECT_NEAR(WalkAnalysis::j_integral(R) / closed, 1.0, 1e-6) << R.name();
  }
  EXPECT_FALSE(j_closed_form(RootSystem(Family::A, 2)).has_value());
}

TEST(Llt, BudgetEnforced) {
  EXPECT_THROW(WalkAnalysis::j_integral(RootSystem(Family::D, 4), 1000), BudgetError);
}

TEST(Llt, ConstantsA1) {
  auto S = make(Family::A, 1, {2});
  auto A = analysis(S, {{{1}, 1.0}});
  auto c = A.llt_constants();
  EXPECT_DOUBLE_EQ(c.exponent, 1.5);
  EXPECT_NEAR(c.J, WalkAnalysis::j_integral(S->roots()), 1e-10);
  EXPECT_NEAR(c.K, c.K1 * c.K2 * c.K3, 1e-15);
  EXPECT_EQ(A.llt_asymptote({0}, 401, c), 0.0);
  EXPECT_GT(A.llt_asymptote({0}, 400, c), 0.0);
  EXPECT_EQ(A.llt_asymptote({1}, 400, c), 0.0);
}

TEST(Llt, A1MatchesTreeAsymptote) {
  // p^{(2m)} ~ 2q(q+1)/(q-1)^2 ρ^{2m} m^{-3/2} / (2√π)
  const double q = 2;
  auto A = analysis(make(Family::A, 1, {q}), {{{1}, 1.0}});
  auto c = A.llt_constants();
  const int k = 1000;
  const double rho = A.a_hat_one();
  double tree = 2 * q * (q + 1) / ((q - 1) * (q - 1)) * std::pow(rho, k) * std::pow(k / 2.0, -1.5) /
                (2 * std::sqrt(std::numbers::pi));
  EXPECT_NEAR(A.llt_asymptote({0}, k, c) / tree, 1.0, 1e-9);
}

TEST(Radial, SmallExamples) {
  auto A = analysis(make(Family::A, 1, {2}), {{{1}, 1.0}});
  auto d = A.radial_distribution(2);
  EXPECT_NEAR(d[1].at({1}), 1.0, 1e-14);
  EXPECT_NEAR(d[2].at({0}), 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(d[2].at({2}), 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(A.transition_from_radial(d[2], {0}), 1.0 / 3.0, 1e-14);

  auto B = analysis(make(Family::C, 2, {2, 3, 2}), {{{1, 0}, 0.4}, {{0, 1}, 0.6}});
  auto e = B.radial_distribution(1);
  EXPECT_NEAR(e[1].at({1, 0}), 0.4, 1e-12);
  EXPECT_NEAR(e[1].at({0, 1}), 0.6, 1e-12);
}

TEST(Radial, ConservesMass) {
  for (auto [f, n, q] : std::vector<std::tuple<Family, int, std::vector<double>>>{
           {Family::A, 2, {2}}, {Family::C, 2, {2, 3, 2}}, {Family::BC, 2, {4, 2, 3}}, {Family::G, 2, {2, 3, 2}}}) {
    auto A = analysis(make(f, n, q), {{unit(n, 0), 0.5}, {unit(n, 1), 0.5}});
    auto d = A.radial_distribution(25);
    for (const auto& dk : d) {
      double s = 0;
      for (const auto& [nu, p] : dk) {
        EXPECT_GE(p, -1e-12);
        s += p;
      }
      EXPECT_NEAR(s, 1.0, 1e-9);
    }
  }
}

TEST(Radial, MatchesPlancherelQuadrature) {
  for (auto [f, n, q, walk] : std::vector<std::tuple<Family, int, std::vector<double>, WalkTerms>>{
           {Family::A, 1, {2}, {{{1}, 1.0}}},
           {Family::A, 2, {2}, {{{1, 0}, 1.0}}},
           {Family::C, 2, {2, 3, 2}, {{{1, 0}, 0.5}, {{0, 1}, 0.5}}},
           {Family::BC, 1, {4, 2}, {{{1}, 0.5}, {{2}, 0.5}}}}) {
    auto S = make(f, n, q);
    auto A = analysis(S, walk);
    const int kmax = 20;
    auto d = A.radial_distribution(kmax);
    std::vector<Coweight> lams;
    for (const auto& [nu, p] : d[kmax]) lams.push_back(nu);
    for (const auto& [nu, p] : d[kmax - 1]) lams.push_back(nu);
    Plancherel pl(S, Plancherel::grid_size_for(walk_bandwidth(*S, A.walk().terms()) * kmax, *S));
    auto t = pl.kstep_table(A.walk().terms(), lams, kmax);
    for (int k : {kmax - 1, kmax})
      for (std::size_t i = 0; i < lams.size(); ++i)
        EXPECT_NEAR(t[k][i], A.transition_from_radial(d[k], lams[i]), 1e-7) << S->roots().name();
  }
}

TEST(Radial, A1MatchesFiniteTree) {
  const int q = 2;
  auto S = make(Family::A, 1, {static_cast<double>(q)});
  {
    const int kmax = 12;
    oracle::FiniteTree tree(q, kmax);
    auto A = analysis(S, {{{1}, 1.0}});
    auto d = A.radial_distribution(kmax);
    for (int k = 0; k <= kmax; ++k) {
      auto p = tree.evolve({{1, 1.0}}, k);
      for (int r = 0; r <= kmax; ++r)
        EXPECT_NEAR(p[tree.vertex_at(r)], A.transition_from_radial(d[k], {r}), 1e-10) << k << " " << r;
    }
  }
  {
    const int kmax = 5;
    oracle::FiniteTree tree(q, 2 * kmax);
    auto A = analysis(S, {{{0}, 0.2}, {{1}, 0.3}, {{2}, 0.5}});
    auto d = A.radial_distribution(kmax);
    auto p = tree.evolve({{0, 0.2}, {1, 0.3}, {2, 0.5}}, kmax);
    for (int r = 0; r <= 2 * kmax; ++r)
      EXPECT_NEAR(p[tree.vertex_at(r)], A.transition_from_radial(d[kmax], {r}), 1e-10) << r;
  }
}

TEST(Radial, ReturnProbabilitiesMatchGeneratingFunction) {
  auto A = analysis(make(Family::A, 1, {3}), {{{1}, 1.0}});
  auto d = A.radial_distribution(60);
  auto ref = oracle::tree_return_probabilities(3.0, 60);
  for (int k = 0; k <= 60; ++k) EXPECT_NEAR(A.transition_from_radial(d[k], {0}), ref[k], 1e-12);
}

TEST(Radial, ClampInvariance) {
  auto S = make(Family::A, 2, {2});
  WalkSpec w(S->roots(), {{{1, 0}, 0.5}, {{1, 1}, 0.5}});
  RadialKernel small(S, w), large(S, w, 3 * RadialKernel(S, w).clamp_level());
  std::map<Coweight, double> a{{{0, 0}, 1.0}}, b = a;
  for (int k = 0; k < 30; ++k) {
    a = small.step(a);
    b = large.step(b);
  }
  ASSERT_EQ(a.size(), b.size());
  for (const auto& [nu, p] : a) EXPECT_NEAR(p, b.at(nu), 1e-12);
}

TEST(Radial, KernelClampedMassSmall) {
  auto S = make(Family::G, 2, {2, 3, 2});
  WalkSpec w(S->roots(), {{{1, 0}, 0.5}, {{0, 1}, 0.5}});
  RadialKernel K(S, w);
  for (int a = 0; a <= 8; ++a)
    for (int b = 0; b <= 8; ++b) {
      const auto& row = K.row({a, b});
      EXPECT_LT(row.clamped, 1e-8);
      EXPECT_NEAR(row.cumulative.back(), 1.0, 1e-9);
    }
}

TEST(Radial, VanishesWhereAsymptoteVanishes) {
  for (auto [f, n, lam] : std::vector<std::tuple<Family, int, Coweight>>{
           {Family::A, 1, {1}}, {Family::A, 2, {1, 0}}, {Family::A, 3, {0, 1, 0}}}) {
    auto A = analysis(make(f, n, {2}), {{lam, 1.0}});
    auto c = A.llt_constants();
    auto d = A.radial_distribution(8);
    for (int k = 1; k <= 8; ++k)
      for (const auto& [nu, p] : d[k])
        if (A.llt_asymptote(nu, k, c) == 0.0) {
          EXPECT_LE(p, 1e-12);
        }
    // a congruence class that the walk never reaches
    for (int k = 1; k <= 8; ++k) {
      Coweight zero(n, 0);
      if (A.llt_asymptote(zero, k, c) == 0.0) {
        EXPECT_EQ((d[k].count(zero) ? d[k].at(zero) : 0.0), 0.0);
      }
    }
  }
}

TEST(Simulate, DeterministicAcrossThreads) {
  auto A = analysis(make(Family::A, 2, {2}), {{{1, 0}, 0.5}, {{1, 1}, 0.5}});
  auto a = A.simulate_lattice(50, 2000, 42, 1);
  auto b = A.simulate_lattice(50, 2000, 42, 4);
  EXPECT_EQ(a.endpoints, b.endpoints);
  auto c = A.simulate_lattice(50, 2000, 43, 1);
  EXPECT_NE(a.endpoints, c.endpoints);
  EXPECT_EQ(A.simulate_radial(40, 500, 7, 1), A.simulate_radial(40, 500, 7, 3));
}

TEST(Simulate, ZeroStepsAtOrigin) {
  auto A = analysis(make(Family::A, 2, {2}), {{{1, 0}, 1.0}});
  auto s = A.simulate_lattice(0, 100, 1);
  for (const Coweight& x : s.endpoints) EXPECT_EQ(x, (Coweight{0, 0}));
  for (const Coweight& x : A.simulate_radial(0, 10, 1)) EXPECT_EQ(x, (Coweight{0, 0}));
}

TEST(Simulate, LatticeMeanAndCovariance) {
  auto S = make(Family::C, 2, {2, 3, 2});
  auto A = analysis(S, {{{1, 0}, 0.5}, {{0, 1}, 0.5}});
  const WeylGroup& W = S->params().weyl();
  const int k = 100;
  const std::size_t T = 20000;
  auto s = A.simulate_lattice(k, T, 9);
  auto g = A.drift();
  // increment moments from the mixture of horocycle laws
  std::vector<double> m(2, 0.0);
  std::vector<std::vector<double>> m2(2, std::vector<double>(2, 0.0));
  for (const auto& [lam, a] : A.walk().terms())
    for (const auto& [mu, p] : A.horocycle_distribution(lam).mass)
      for (int j = 0; j < 2; ++j) {
        m[j] += a * p * mu[j];
        for (int l = 0; l < 2; ++l) m2[j][l] += a * p * mu[j] * mu[l];
      }
  for (int j = 0; j < 2; ++j) {
    EXPECT_NEAR(m[j], -g[W.star_index(j)], 1e-10);
    double var = m2[j][j] - m[j] * m[j];
    double se = std::sqrt(var / (static_cast<double>(T) * k));
    EXPECT_LT(std::abs(s.mean[j] - m[j]), 3 * se) << j;
    // sample variance standard error ≈ var √(2/T)
    EXPECT_LT(std::abs(s.covariance[j][j] - var), 3 * var * std::sqrt(2.0 / T) + 1e-3) << j;
  }
}

TEST(Clt, ReportShape) {
  auto A = analysis(make(Family::A, 2, {2}), {{{1, 0}, 1.0}});
  auto rep = A.roe_clt_report(200, 4000, 3);
  EXPECT_TRUE(rep.cholesky_ok);
  ASSERT_EQ(rep.z_mean.size(), 2u);
  EXPECT_LT(rep.escape_error, 0.05);
  for (int j = 0; j < 2; ++j) {
    EXPECT_GT(rep.escape_rate[j], 0.0);
    EXPECT_NEAR(rep.variance_ratio[j], 1.0, 0.15);
  }
  EXPECT_NEAR(rep.mahalanobis_mean, 2.0, 0.3);
  EXPECT_THROW(analysis(make(Family::A, 4, {2}), {{{1, 0, 0, 0}, 1.0}}).roe_clt_report(10, 10, 1), BudgetError);
}
