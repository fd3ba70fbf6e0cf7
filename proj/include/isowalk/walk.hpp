#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <numbers>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "isowalk/errors.hpp"
#include "isowalk/gauss_hermite.hpp"
#include "isowalk/plancherel.hpp"
#include "isowalk/rng.hpp"
#include "isowalk/spherical.hpp"

namespace isowalk {

// Isotropic walk A = Σ a_λ A_λ with finite support.
class WalkSpec {
 public:
  WalkSpec() = default;

  // Weights are normalised to sum 1; duplicates merge.
  WalkSpec(const RootSystem& rs, const WalkTerms& terms) {
    std::map<Coweight, double> merged;
    double total = 0;
    for (const auto& [lam, a] : terms) {
      if (static_cast<int>(lam.size()) != rs.rank())
        throw ValidationError("walk coweight has the wrong number of coordinates");
      if (!is_dominant(lam)) throw ValidationError("walk support must be dominant");
      if (!(a >= 0) || !std::isfinite(a)) throw ValidationError("walk weights must be finite and nonnegative");
      if (a == 0) continue;
      merged[lam] += a;
      total += a;
    }
    if (!(total > 0)) throw ValidationError("walk has no positive weight");
    bool moves = false;
    for (auto& [lam, a] : merged) {
      a /= total;
      moves = moves || std::any_of(lam.begin(), lam.end(), [](int x) { return x != 0; });
      terms_.emplace_back(lam, a);
    }
    if (!moves) throw ValidationError("walk must give positive weight to some nonzero coweight");
  }

  const WalkTerms& terms() const { return terms_; }
  double weight(const Coweight& lam) const {
    for (const auto& [l, a] : terms_)
      if (l == lam) return a;
    return 0;
  }
  // a support element with a_μ > 0 and μ ≠ 0 when possible
  const Coweight& designated() const {
    for (const auto& [l, a] : terms_)
      if (std::any_of(l.begin(), l.end(), [](int x) { return x != 0; })) return l;
    return terms_.front().first;
  }

 private:
  WalkTerms terms_;
};

// Radial chain transition ν → ν' with probability Σ_μ a_μ a_{ν,μ;ν'}.
// Rows depend on ν only through min(ν_i, L), so they are cached by that key.
class RadialKernel {
 public:
  struct Row {
    std::vector<Coweight> delta;
    std::vector<double> prob;
    std::vector<double> cumulative;
    double clamped = 0;
  };

  RadialKernel(std::shared_ptr<const Spherical> sph, const WalkSpec& walk, int clamp = -1)
      : sph_(std::move(sph)), walk_(walk), n_(sph_->rank()) {
    spread_ = walk_bandwidth(*sph_, walk_.terms());
    clamp_ = clamp >= 0 ? clamp : 6 * spread_ + 6;
    std::size_t slots = 1;
    dense_ = n_ <= 3;
    for (int i = 0; i < n_ && dense_; ++i) slots *= static_cast<std::size_t>(clamp_ + 1);
    if (dense_) dense_rows_ = std::vector<std::atomic<const Row*>>(slots);
  }
  ~RadialKernel() {
    for (auto& p : dense_rows_) delete p.load();
  }
  RadialKernel(const RadialKernel&) = delete;
  RadialKernel& operator=(const RadialKernel&) = delete;

  int clamp_level() const { return clamp_; }
  int spread() const { return spread_; }

  const Row& row(const Coweight& nu) const {
    if (dense_) {
      std::size_t idx = 0;
      for (int i = 0; i < n_; ++i) idx = idx * (clamp_ + 1) + std::min(nu[i], clamp_);
      const Row* r = dense_rows_[idx].load(std::memory_order_acquire);
      if (r) return *r;
      std::lock_guard lock(mutex_);
      r = dense_rows_[idx].load(std::memory_order_relaxed);
      if (!r) {
        r = new Row(build(clamped(nu)));
        dense_rows_[idx].store(r, std::memory_order_release);
      }
      return *r;
    }
    std::lock_guard lock(mutex_);
    Coweight key = clamped(nu);
    auto it = sparse_rows_.find(key);
    if (it == sparse_rows_.end()) it = sparse_rows_.emplace(key, build(key)).first;
    return it->second;
  }

  // one step of the radial chain
  std::map<Coweight, double> step(const std::map<Coweight, double>& dist) const {
    std::map<Coweight, double> next;
    for (const auto& [nu, p] : dist) {
      const Row& r = row(nu);
      for (std::size_t t = 0; t < r.delta.size(); ++t) next[nu + r.delta[t]] += p * r.prob[t];
    }
    return next;
  }

 private:
  Coweight clamped(const Coweight& nu) const {
    Coweight k(nu);
    for (int& x : k) x = std::min(x, clamp_);
    return k;
  }

  Row build(const Coweight& nu) const {
    std::map<Coweight, double> acc;
    Row r;
    for (const auto& [mu, a] : walk_.terms()) {
      StructureConstants sc = sph_->structure_constants_fast(nu, mu);
      r.clamped += a * sc.clamped;
      for (const auto& [target, v] : sc.coefficients) acc[target - nu] += a * v;
    }
    double total = 0;
    for (const auto& [d, p] : acc) {
      r.delta.push_back(d);
      r.prob.push_back(p);
      total += p;
      r.cumulative.push_back(total);
    }
    return r;
  }

  std::shared_ptr<const Spherical> sph_;
  WalkSpec walk_;
  int n_;
  int spread_ = 0;
  int clamp_ = 0;
  bool dense_ = false;
  mutable std::vector<std::atomic<const Row*>> dense_rows_;
  mutable std::map<Coweight, Row> sparse_rows_;
  mutable std::mutex mutex_;
};

struct LatticeDistribution {
  std::map<Coweight, double> mass;

  double total() const {
    double s = 0;
    for (const auto& [mu, p] : mass) s += p;
    return s;
  }
  std::vector<double> mean() const {
    std::vector<double> m;
    for (const auto& [mu, p] : mass) {
      if (m.empty()) m.assign(mu.size(), 0.0);
      for (std::size_t j = 0; j < mu.size(); ++j) m[j] += p * mu[j];
    }
    return m;
  }
};

struct LltConstants {
  double K1 = 0, K2 = 0, K3 = 0, K = 0;
  double exponent = 0;
  double b = 0;         // b_{jk} = <α_j,α_k> b
  double J = 0;         // K3 b^{exponent}
};

struct LatticeSample {
  std::vector<Coweight> endpoints;
  std::vector<double> mean;                   // of endpoint / k
  std::vector<std::vector<double>> covariance;  // of endpoint, divided by k
};

struct CltReport {
  int k = 0;
  std::size_t trajectories = 0;
  std::uint64_t seed = 0;
  std::vector<double> gamma;
  std::vector<std::vector<double>> Gamma;
  bool cholesky_ok = false;
  std::vector<double> escape_rate;       // mean of <ν_k,α_j>/k
  double escape_error = 0;               // |ν_k/k - γ|
  std::vector<double> z_mean;            // mean of (<ν_k,α_j> - γ_j k)/√k
  std::vector<double> z_mean_stderr;
  std::vector<double> variance_ratio;    // empirical / Γ_jj
  std::vector<std::vector<double>> correlation;
  std::vector<std::vector<double>> predicted_correlation;
  double mahalanobis_mean = 0;           // E[x^T Γ^{-1} x], n for a Gaussian
  double seconds = 0;
};

class WalkAnalysis {
 public:
  WalkAnalysis(std::shared_ptr<const Spherical> sph, WalkSpec walk) : sph_(std::move(sph)), walk_(std::move(walk)) {}

  const Spherical& spherical() const { return *sph_; }
  const WalkSpec& walk() const { return walk_; }
  const ParameterSystem& params() const { return sph_->params(); }
  const RootSystem& roots() const { return sph_->roots(); }
  int rank() const { return sph_->rank(); }

  cplx a_hat(const Character& z) const {
    cplx s = 0;
    for (const auto& [lam, a] : walk_.terms()) s += a * sph_->eval(lam, z);
    return s;
  }
  double a_hat_one() const {
    double s = 0;
    for (const auto& [lam, a] : walk_.terms()) s += a * sph_->value_at_one(lam);
    return s;
  }

  // 𝕌_A: quotient characters constant on the support
  std::vector<QuotientCharacter> symmetry_group() const {
    std::vector<QuotientCharacter> out;
    const Coweight& mu = walk_.designated();
    for (const QuotientCharacter& u : roots().quotient_characters()) {
      bool ok = true;
      for (const auto& [lam, a] : walk_.terms()) ok = ok && u.phase_of(lam) == u.phase_of(mu);
      if (ok) out.push_back(u);
    }
    return out;
  }

  // gcd{k ≥ 1 : u^{kμ} = 1 for all u ∈ 𝕌_A}
  int period() const {
    const Coweight& mu = walk_.designated();
    long long p = 1;
    for (const QuotientCharacter& u : symmetry_group()) {
      Rat ph = u.phase_of(mu);
      p = std::lcm(p, ph.denominator());
    }
    return static_cast<int>(p);
  }
  bool irreducible() const { return static_cast<std::size_t>(period()) == symmetry_group().size(); }
  bool aperiodic() const { return period() == 1; }
  // u^{kμ} = u^λ for all u ∈ 𝕌_A
  bool congruent(const Coweight& lam, long long k) const {
    const Coweight& mu = walk_.designated();
    for (const QuotientCharacter& u : symmetry_group()) {
      Rat ph = u.phase_of(mu);
      long long d = ph.denominator();
      Rat pk(ph.numerator() * (k % d) % d, d);
      if (pk != u.phase_of(lam)) return false;
    }
    return true;
  }

  // μ ↦ r^{-μ} a_{λ,μ}
  LatticeDistribution horocycle_distribution(const Coweight& lam) const {
    LatticeDistribution d;
    for (const auto& [mu, a] : *sph_->coefficients(lam)) {
      double p = std::exp(-params().log_r(mu)) * a;
      if (p > 0) d.mass[mu] = p;
    }
    return d;
  }

  // γ_j^{(λ)} = Σ_μ a_{λ,μ} r^μ <μ,α_j>
  std::vector<double> drift_lambda(const Coweight& lam) const {
    std::vector<double> g(rank(), 0.0);
    for (const auto& [mu, a] : *sph_->coefficients(lam)) {
      double w = a * std::exp(params().log_r(mu));
      for (int j = 0; j < rank(); ++j) g[j] += w * mu[j];
    }
    return g;
  }
  // -Σ_μ <μ,α_{j*}> r^{-μ} a_{λ,μ}
  std::vector<double> drift_lambda_star_form(const Coweight& lam) const {
    const WeylGroup& W = params().weyl();
    std::vector<double> g(rank(), 0.0);
    for (const auto& [mu, a] : *sph_->coefficients(lam)) {
      double w = a * std::exp(-params().log_r(mu));
      for (int j = 0; j < rank(); ++j) g[j] -= w * mu[W.star_index(j)];
    }
    return g;
  }
  std::vector<double> drift() const {
    std::vector<double> g(rank(), 0.0);
    for (const auto& [lam, a] : walk_.terms()) {
      std::vector<double> gl = drift_lambda(lam);
      for (int j = 0; j < rank(); ++j) g[j] += a * gl[j];
    }
    return g;
  }

  // γ_{j,k}^{(λ)} = Σ_μ <μ,α_{j*}><μ,α_{k*}> r^{-μ} a_{λ,μ}
  std::vector<std::vector<double>> second_moment_lambda(const Coweight& lam) const {
    const WeylGroup& W = params().weyl();
    const int n = rank();
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (const auto& [mu, a] : *sph_->coefficients(lam)) {
      double w = a * std::exp(-params().log_r(mu));
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) m[j][k] += w * mu[W.star_index(j)] * mu[W.star_index(k)];
    }
    return m;
  }
  std::vector<std::vector<double>> second_moment() const {
    const int n = rank();
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (const auto& [lam, a] : walk_.terms()) {
      auto ml = second_moment_lambda(lam);
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) m[j][k] += a * ml[j][k];
    }
    return m;
  }
  // Γ = (γ_{j,k} - γ_j γ_k)
  std::vector<std::vector<double>> covariance() const {
    auto m = second_moment();
    auto g = drift();
    for (int j = 0; j < rank(); ++j)
      for (int k = 0; k < rank(); ++k) m[j][k] -= g[j] * g[k];
    return m;
  }

  // b_{j,k}^λ = ½ Σ_μ <μ,α_j><μ,α_k> a_{λ,μ}
  std::vector<std::vector<double>> b_lambda(const Coweight& lam) const {
    const int n = rank();
    std::vector<std::vector<double>> b(n, std::vector<double>(n, 0.0));
    for (const auto& [mu, a] : *sph_->coefficients(lam))
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) b[j][k] += 0.5 * a * mu[j] * mu[k];
    return b;
  }
  std::vector<std::vector<double>> b_matrix() const {
    const int n = rank();
    std::vector<std::vector<double>> b(n, std::vector<double>(n, 0.0));
    for (const auto& [lam, a] : walk_.terms()) {
      auto bl = b_lambda(lam);
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) b[j][k] += a * bl[j][k];
    }
    const double ah = a_hat_one();
    for (auto& row : b)
      for (double& x : row) x /= ah;
    return b;
  }
  // (b, max relative residual of b_{jk} - <α_j,α_k> b)
  std::pair<double, double> b_proportionality() const {
    auto B = b_matrix();
    const RootSystem& R = roots();
    double num = 0, den = 0;
    for (int j = 0; j < rank(); ++j)
      for (int k = 0; k < rank(); ++k) {
        double g = boost::rational_cast<double>(R.inner_simple(j, k));
        num += B[j][k] * g;
        den += g * g;
      }
    double b = num / den;
    double res = 0;
    for (int j = 0; j < rank(); ++j)
      for (int k = 0; k < rank(); ++k)
        res = std::max(res, std::abs(B[j][k] - b * boost::rational_cast<double>(R.inner_simple(j, k))) / b);
    return {b, res};
  }

  LltConstants llt_constants(std::size_t point_budget = 50000000) const {
    const ParameterSystem& ps = params();
    const RootSystem& R = roots();
    const int n = rank();
    LltConstants c;
    c.K1 = ps.poincare() / static_cast<double>(ps.weyl().size()) / std::pow(2.0 * std::numbers::pi, n);
    double k2 = 1;
    for (std::size_t a : R.positive_R2()) {
      double t = ps.tau(a), t2 = ps.tau_double(a);
      double A = 1.0 / (t2 * std::sqrt(t)), B = 1.0 / std::sqrt(t);
      k2 *= std::pow(1.0 - A, -2.0) * std::pow(1.0 + B, -2.0);
    }
    c.K2 = k2;
    auto B = b_matrix();
    Eigen::MatrixXd Bm(n, n);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) Bm(j, k) = B[j][k];
    c.K3 = gaussian_root_integral(R, Bm, point_budget);
    c.K = c.K1 * c.K2 * c.K3;
    c.exponent = static_cast<double>(R.positive_R2().size()) + 0.5 * n;
    c.b = b_proportionality().first;
    c.J = c.K3 * std::pow(c.b, c.exponent);
    return c;
  }

  // |𝕌_A| K P_λ(1) Â(1)^k k^{-|R_2^+|-n/2}, or 0 when the congruence fails
  double llt_asymptote(const Coweight& lam, long long k, const LltConstants& c) const {
    if (!congruent(lam, k)) return 0.0;
    return static_cast<double>(symmetry_group().size()) * c.K * sph_->value_at_one(lam) *
           std::pow(a_hat_one(), static_cast<double>(k)) * std::pow(static_cast<double>(k), -c.exponent);
  }

  // a^{(k)} for k = 0..kmax by the structure-constant recursion
  std::vector<std::map<Coweight, double>> radial_distribution(int kmax, std::size_t state_budget = 20000000) const {
    std::vector<std::map<Coweight, double>> out;
    out.push_back({{Coweight(rank(), 0), 1.0}});
    const RadialKernel& K = kernel();
    for (int k = 1; k <= kmax; ++k) {
      out.push_back(K.step(out.back()));
      if (out.back().size() > state_budget) throw BudgetError("radial distribution exceeds state budget");
    }
    return out;
  }
  // p^{(k)}(x,y) = a^{(k)}_λ / N_λ
  double transition_from_radial(const std::map<Coweight, double>& ak, const Coweight& lam) const {
    auto it = ak.find(lam);
    if (it == ak.end()) return 0.0;
    return it->second * std::exp(-params().log_N(lam));
  }

  const RadialKernel& kernel() const {
    std::lock_guard lock(kernel_mutex_);
    if (!kernel_) kernel_ = std::make_unique<RadialKernel>(sph_, walk_);
    return *kernel_;
  }

  // Projected lattice walk: λ ~ a, then the increment μ ~ r^{-μ} a_{λ,μ}.
  LatticeSample simulate_lattice(int k, std::size_t trajectories, std::uint64_t seed, int threads = 1) const {
    const int n = rank();
    std::vector<double> cum_a;
    std::vector<std::vector<double>> cum_h;
    std::vector<std::vector<Coweight>> steps;
    double acc = 0;
    for (const auto& [lam, a] : walk_.terms()) {
      acc += a;
      cum_a.push_back(acc);
      LatticeDistribution d = horocycle_distribution(lam);
      std::vector<double> c;
      std::vector<Coweight> s;
      double t = 0;
      for (const auto& [mu, p] : d.mass) {
        t += p;
        c.push_back(t);
        s.push_back(mu);
      }
      cum_h.push_back(c);
      steps.push_back(s);
    }
    LatticeSample out;
    out.endpoints.assign(trajectories, Coweight(n, 0));
    parallel_chunks(trajectories, threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t t = b; t < e; ++t) {
        auto g = trajectory_stream(seed, t);
        Coweight& x = out.endpoints[t];
        for (int s = 0; s < k; ++s) {
          std::size_t i = pick(cum_a, uniform01(g));
          std::size_t m = pick(cum_h[i], uniform01(g));
          for (int j = 0; j < n; ++j) x[j] += steps[i][m][j];
        }
      }
    });
    out.mean.assign(n, 0.0);
    out.covariance.assign(n, std::vector<double>(n, 0.0));
    if (trajectories == 0 || k == 0) return out;
    for (const Coweight& x : out.endpoints)
      for (int j = 0; j < n; ++j) out.mean[j] += x[j];
    for (double& m : out.mean) m /= static_cast<double>(trajectories);
    for (const Coweight& x : out.endpoints)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) out.covariance[j][l] += (x[j] - out.mean[j]) * (x[l] - out.mean[l]);
    for (auto& row : out.covariance)
      for (double& v : row) v /= static_cast<double>(trajectories > 1 ? trajectories - 1 : 1) * k;
    for (double& m : out.mean) m /= k;
    return out;
  }

  // ν_k for each trajectory of the radial chain
  std::vector<Coweight> simulate_radial(int k, std::size_t trajectories, std::uint64_t seed, int threads = 1) const {
    const RadialKernel& K = kernel();
    std::vector<Coweight> out(trajectories, Coweight(rank(), 0));
    parallel_chunks(trajectories, threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t t = b; t < e; ++t) {
        auto g = trajectory_stream(seed, t);
        Coweight& x = out[t];
        for (int s = 0; s < k; ++s) {
          const RadialKernel::Row& r = K.row(x);
          const Coweight& d = r.delta[pick(r.cumulative, uniform01(g))];
          for (std::size_t j = 0; j < x.size(); ++j) x[j] += d[j];
        }
      }
    });
    return out;
  }

  CltReport roe_clt_report(int k, std::size_t trajectories, std::uint64_t seed, int threads = 1) const {
    if (rank() > 3) throw BudgetError("radial simulation is limited to rank at most 3");
    auto t0 = std::chrono::steady_clock::now();
    const int n = rank();
    CltReport rep;
    rep.k = k;
    rep.trajectories = trajectories;
    rep.seed = seed;
    rep.gamma = drift();
    rep.Gamma = covariance();
    Eigen::MatrixXd G(n, n);
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) G(j, l) = rep.Gamma[j][l];
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    rep.cholesky_ok = llt.info() == Eigen::Success;
    std::vector<Coweight> nu = simulate_radial(k, trajectories, seed, threads);
    const double N = static_cast<double>(trajectories);
    const double sk = std::sqrt(static_cast<double>(k));
    std::vector<std::vector<double>> x(trajectories, std::vector<double>(n));
    rep.escape_rate.assign(n, 0.0);
    rep.z_mean.assign(n, 0.0);
    for (std::size_t t = 0; t < trajectories; ++t)
      for (int j = 0; j < n; ++j) {
        x[t][j] = (nu[t][j] - rep.gamma[j] * k) / sk;
        rep.escape_rate[j] += nu[t][j] / static_cast<double>(k) / N;
        rep.z_mean[j] += x[t][j] / N;
      }
    double err = 0;
    for (int j = 0; j < n; ++j) err += std::pow(rep.escape_rate[j] - rep.gamma[j], 2);
    rep.escape_error = std::sqrt(err);
    std::vector<std::vector<double>> cov(n, std::vector<double>(n, 0.0));
    for (const auto& v : x)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) cov[j][l] += (v[j] - rep.z_mean[j]) * (v[l] - rep.z_mean[l]) / (N - 1);
    rep.variance_ratio.assign(n, 0.0);
    rep.z_mean_stderr.assign(n, 0.0);
    rep.correlation.assign(n, std::vector<double>(n, 0.0));
    rep.predicted_correlation.assign(n, std::vector<double>(n, 0.0));
    for (int j = 0; j < n; ++j) {
      rep.variance_ratio[j] = cov[j][j] / rep.Gamma[j][j];
      rep.z_mean_stderr[j] = std::sqrt(cov[j][j] / N);
      for (int l = 0; l < n; ++l) {
        rep.correlation[j][l] = cov[j][l] / std::sqrt(cov[j][j] * cov[l][l]);
        rep.predicted_correlation[j][l] = rep.Gamma[j][l] / std::sqrt(rep.Gamma[j][j] * rep.Gamma[l][l]);
      }
    }
    if (rep.cholesky_ok) {
      Eigen::MatrixXd Ginv = G.inverse();
      double m = 0;
      for (const auto& v : x) {
        Eigen::VectorXd e(n);
        for (int j = 0; j < n; ++j) e(j) = v[j];
        m += e.dot(Ginv * e);
      }
      rep.mahalanobis_mean = m / N;
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
  }

 private:
  static std::size_t pick(const std::vector<double>& cumulative, double u) {
    u *= cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    return static_cast<std::size_t>(it - cumulative.begin());
  }

  std::shared_ptr<const Spherical> sph_;
  WalkSpec walk_;
  mutable std::mutex kernel_mutex_;
  mutable std::unique_ptr<RadialKernel> kernel_;

 public:
  // ∫ e^{-φ^T B φ} Π_{α∈R_2^+} <α∨,φ>^2 dφ by tensor Gauss-Hermite after φ = L^{-T} y
  static double gaussian_root_integral(const RootSystem& R, const Eigen::MatrixXd& B,
                                       std::size_t point_budget = 50000000) {
    const int n = R.rank();
    Eigen::LLT<Eigen::MatrixXd> llt(B);
    if (llt.info() != Eigen::Success) throw ValidationError("b-matrix is not positive definite");
    Eigen::MatrixXd L = llt.matrixL();
    Eigen::MatrixXd T = L.transpose().inverse();
    const int nroots = static_cast<int>(R.positive_R2().size());
    const int m = nroots + 1;
    double points = std::pow(static_cast<double>(m), n);
    if (points > static_cast<double>(point_budget))
      throw BudgetError("Gauss-Hermite tensor grid of " + std::to_string(points) + " points exceeds budget");
    auto [x, w] = gauss_hermite(m);
    Eigen::MatrixXd A(nroots, n);
    for (int r = 0; r < nroots; ++r)
      for (int j = 0; j < n; ++j) A(r, j) = R.coroot(R.positive_R2()[r])[j];
    Eigen::MatrixXd AT = A * T;
    std::vector<int> idx(n, 0);
    double total = 0;
    Eigen::VectorXd y(n);
    for (;;) {
      double wt = 1;
      for (int j = 0; j < n; ++j) {
        y(j) = x[idx[j]];
        wt *= w[idx[j]];
      }
      Eigen::VectorXd v = AT * y;
      double p = 1;
      for (int r = 0; r < nroots; ++r) p *= v(r) * v(r);
      total += wt * p;
      int j = n - 1;
      while (j >= 0 && ++idx[j] == m) idx[j--] = 0;
      if (j < 0) break;
    }
    return total / L.determinant();
  }

  // J: the integral with B = (<α_j,α_k>)
  static double j_integral(const RootSystem& R, std::size_t point_budget = 50000000) {
    const int n = R.rank();
    Eigen::MatrixXd G(n, n);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) G(j, k) = boost::rational_cast<double>(R.inner_simple(j, k));
    return gaussian_root_integral(R, G, point_budget);
  }
};

// Closed forms of J for B_n, BC_n, C_n, D_n; nullopt otherwise.
inline std::optional<double> j_closed_form(const RootSystem& R) {
  const int n = R.rank();
  auto fact = [](int k) {
    double f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
  };
  double prod = 1;
  for (int i = 1; i <= n; ++i) prod *= fact(2 * i);
  const double pn = std::pow(std::numbers::pi, 0.5 * n);
  switch (R.family()) {
    case Family::B:
    case Family::BC: return pn * std::pow(2.0, -n * (n - 1)) * prod;
    case Family::C: return pn * std::pow(2.0, -n * n - n - 1) * prod;
    case Family::D: return pn * std::pow(2.0, -n * n + n - 1) * fact(n) * prod / fact(2 * n);
    default: return std::nullopt;
  }
}

}  // namespace isowalk
