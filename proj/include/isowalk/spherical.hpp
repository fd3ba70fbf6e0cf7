#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "isowalk/dft.hpp"
#include "isowalk/errors.hpp"
#include "isowalk/parameters.hpp"
#include "isowalk/root_system.hpp"
#include "isowalk/weyl.hpp"

namespace isowalk {

// Values (u^{λ_1}, ..., u^{λ_n}) of a character of P.
using Character = std::vector<cplx>;

template <class T>
using Laurent = std::map<Coweight, T>;

inline cplx int_pow(cplx z, int k) {
  if (k < 0) {
    z = 1.0 / z;
    k = -k;
  }
  cplx r = 1.0;
  while (k) {
    if (k & 1) r *= z;
    z *= z;
    k >>= 1;
  }
  return r;
}

// u^μ
inline cplx character_power(const Character& z, const Coweight& mu) {
  cplx s = 1.0;
  for (std::size_t j = 0; j < mu.size(); ++j)
    if (mu[j]) s *= int_pow(z[j], mu[j]);
  return s;
}

inline Character torus_point(const std::vector<double>& theta) {
  Character z;
  for (double t : theta) z.push_back(std::polar(1.0, t));
  return z;
}

inline Character inverse(const Character& z) {
  Character w(z);
  for (auto& x : w) x = 1.0 / x;
  return w;
}

// The character with u^{λ_j} = r^{λ_j}, or r^{-λ_j} for sign = -1.
inline Character r_character(const ParameterSystem& ps, int sign = 1) {
  Character z;
  for (int j = 0; j < ps.rank(); ++j) {
    Coweight e(ps.rank(), 0);
    e[j] = 1;
    z.emplace_back(std::exp(sign * ps.log_r(e)), 0.0);
  }
  return z;
}

// BC coordinates t_i = u^{e_i} -> (u^{λ_j}), using λ_j = e_1 + ... + e_j.
inline Character from_bc_coordinates(const std::vector<cplx>& t) {
  Character z;
  cplx acc = 1.0;
  for (const cplx& x : t) {
    acc *= x;
    z.push_back(acc);
  }
  return z;
}

// Rank-one straightening: F(λ) for ⟨λ,α_i⟩ < 0 in terms of F at i-nonnegative coweights.
class Straightener {
 public:
  using Expansion = std::vector<std::pair<Coweight, double>>;

  explicit Straightener(const ParameterSystem& ps) : n_(ps.rank()) {
    const RootSystem& R = ps.roots();
    for (int i = 0; i < n_; ++i) {
      std::size_t a = R.simple_root_index(i);
      Rule r;
      auto dbl = R.double_of(a);
      if (dbl) {
        r.d = 2;
        r.beta = R.coroot(*dbl);
        double t = ps.tau(a), t2 = ps.tau(*dbl);
        double A = 1.0 / (t2 * std::sqrt(t)), B = 1.0 / std::sqrt(t);
        r.numerator = {{0, 1.0}, {-1, B - A}, {-2, -A * B}};
      } else {
        r.d = 1;
        r.beta = R.coroot(a);
        r.numerator = {{0, 1.0}, {-1, -1.0 / ps.tau(a)}};
      }
      rules_.push_back(r);
    }
  }

  // F(λ) = Σ κ F(ν), ν dominant
  const Expansion& expand(const Coweight& lam) {
    auto it = memo_.find(lam);
    if (it != memo_.end()) return it->second;
    Expansion out;
    int i = 0;
    while (i < n_ && lam[i] >= 0) ++i;
    if (i == n_) {
      out.emplace_back(lam, 1.0);
    } else {
      std::map<Coweight, double> acc;
      for (const auto& [j, k] : rule(i, -lam[i])) {
        Coweight mu = lam;
        for (int t = 0; t < n_; ++t) mu[t] += j * rules_[i].beta[t];
        // copy: the recursive call may rehash memo_
        Expansion sub = expand(mu);
        for (const auto& [nu, c] : sub) acc[nu] += k * c;
      }
      for (const auto& [nu, c] : acc)
        if (c != 0.0) out.emplace_back(nu, c);
    }
    return memo_.emplace(lam, std::move(out)).first->second;
  }

  // Coefficients κ_j with F(λ) = Σ_j κ_j F(λ + j β_i), for ⟨λ,α_i⟩ = -m.
  const std::vector<std::pair<int, double>>& rule(int i, int m) {
    auto key = std::make_pair(i, m);
    auto it = rule_cache_.find(key);
    if (it != rule_cache_.end()) return it->second;
    const Rule& r = rules_[i];
    std::map<int, double> rem = rank_one(r, m);
    std::vector<std::pair<int, double>> out;
    double scale = 0;
    for (const auto& [e, c] : rem) scale = std::max(scale, std::abs(c));
    const double tol = 1e-14 * std::max(scale, 1.0);
    for (int guard = 0; !rem.empty(); ++guard) {
      if (guard > 10000) throw std::logic_error("straightening did not terminate");
      auto top = std::prev(rem.end());
      int j = top->first;
      double c = top->second;
      if (std::abs(c) <= tol) {
        rem.erase(top);
        continue;
      }
      // basis element g(λ + jβ) / e^λ = y^j G_{m'}(y), with d m' = d m - 2j
      int dm = r.d * m - 2 * j;
      if (dm > 0 || dm % r.d != 0) throw std::logic_error("straightening produced a negative pairing");
      std::map<int, double> g = rank_one(r, dm / r.d);
      double lead = g.rbegin()->second;
      double kappa = c / lead;
      out.emplace_back(j, kappa);
      for (const auto& [e, v] : g) {
        double& slot = rem[e + j];
        slot -= kappa * v;
      }
      for (auto p = rem.begin(); p != rem.end();)
        p = std::abs(p->second) <= tol ? rem.erase(p) : std::next(p);
    }
    return rule_cache_.emplace(key, std::move(out)).first->second;
  }

 private:
  struct Rule {
    int d = 1;
    Coweight beta;
    std::map<int, double> numerator;  // N(y), exponents ≤ 0
  };

  // G_m(y) = [N(y) - N(1/y) y^{dm-d}] / (1 - y^{-d})
  static std::map<int, double> rank_one(const Rule& r, int m) {
    std::map<int, double> num;
    for (const auto& [e, c] : r.numerator) num[e] += c;
    for (const auto& [e, c] : r.numerator) num[-e + r.d * m - r.d] -= c;
    std::map<int, double> quo;
    while (!num.empty()) {
      auto top = std::prev(num.end());
      int e = top->first;
      double c = top->second;
      num.erase(top);
      if (std::abs(c) < 1e-15) continue;
      quo[e] += c;
      num[e - r.d] += c;
      if (quo.size() > 100000) throw std::logic_error("rank-one division failed");
    }
    for (auto p = quo.begin(); p != quo.end();) p = std::abs(p->second) < 1e-15 ? quo.erase(p) : std::next(p);
    return quo;
  }

  int n_;
  std::vector<Rule> rules_;
  std::map<std::pair<int, int>, std::vector<std::pair<int, double>>> rule_cache_;
  std::unordered_map<Coweight, Expansion, VecHash> memo_;
};

struct StructureConstants {
  std::map<Coweight, double> coefficients;
  double clamped = 0;  // total magnitude of negatives set to zero
};

class Spherical {
 public:
  explicit Spherical(std::shared_ptr<const ParameterSystem> ps) : ps_(std::move(ps)) {
    const RootSystem& R = ps_->roots();
    for (std::size_t a : R.positive_R2()) {
      Factor f;
      f.coroot = R.coroot(a);
      f.tau = ps_->tau(a);
      auto dbl = R.double_of(a);
      if (dbl) {
        f.doubled = true;
        f.half = R.coroot(*dbl);
        f.A = 1.0 / (ps_->tau(*dbl) * std::sqrt(f.tau));
        f.B = 1.0 / std::sqrt(f.tau);
      }
      factors_.push_back(f);
    }
  }

  const ParameterSystem& params() const { return *ps_; }
  std::shared_ptr<const ParameterSystem> params_ptr() const { return ps_; }
  const RootSystem& roots() const { return ps_->roots(); }
  int rank() const { return ps_->rank(); }

  // Positions in positive_R2() of the factors; used to drop the BC (1 + b^{-1} t_1^{-1}) term.
  struct DropFactor {
    std::size_t index;
  };

  cplx c_function(const Character& z) const { return c_impl(z, nullptr); }
  // c(u) with the second numerator factor of root `drop` omitted
  cplx c_function_dropping(const Character& z, std::size_t drop) const {
    DropFactor d{drop};
    return c_impl(z, &d);
  }
  // index of e_1 among the factors (BC only)
  std::size_t bc_first_short_factor() const {
    const RootSystem& R = roots();
    Coweight e1 = R.to_coweight([&] {
      RatVec v(R.ambient_dim(), Rat(0));
      v[0] = 1;
      return v;
    }());
    for (std::size_t k = 0; k < factors_.size(); ++k)
      if (factors_[k].doubled && factors_[k].half == e1) return k;
    throw ValidationError("no short root e_1 in this system");
  }

  // (wu)^{λ_j} = u^{w λ_j}
  Character act(std::size_t w, const Character& z) const {
    const WeylGroup& W = ps_->weyl();
    const std::vector<int>& m = W[w].matrix;
    const int n = rank();
    Character out(n);
    for (int j = 0; j < n; ++j) {
      Coweight col(n);
      for (int r = 0; r < n; ++r) col[r] = m[r * n + j];
      out[j] = character_power(z, col);
    }
    return out;
  }

  cplx eval_generic(const Coweight& lam, const Character& z) const {
    const WeylGroup& W = ps_->weyl();
    cplx s = 0;
    for (std::size_t w = 0; w < W.size(); ++w) {
      Character wz = act(w, z);
      s += c_function(wz) * character_power(z, W.apply(w, lam));
    }
    return s * std::exp(-ps_->log_r(lam)) / ps_->poincare();
  }

  // Laurent coefficients a_{λ,μ}, cached.
  std::shared_ptr<const Laurent<double>> coefficients(const Coweight& lam) const {
    {
      std::shared_lock lock(cache_mutex_);
      auto it = cache_.find(lam);
      if (it != cache_.end()) return it->second;
    }
    auto computed = std::make_shared<const Laurent<double>>(compute_coefficients(lam));
    std::unique_lock lock(cache_mutex_);
    return cache_.emplace(lam, computed).first->second;
  }

  // P_ν P_{λ_j} = Σ_η a_{ν,λ_j;η} P_η with ν = λ - λ_j; the η = λ term is solved for.
  Laurent<double> coefficients_by_recursion(const Coweight& lam) const {
    const int n = rank();
    if (!is_dominant(lam)) throw ValidationError("spherical coefficients need a dominant coweight");
    if (std::all_of(lam.begin(), lam.end(), [](int x) { return x == 0; })) return {{lam, 1.0}};
    std::vector<Coweight> support = roots().saturated_set(lam);
    int j = 0;
    while (lam[j] == 0) ++j;
    Coweight e(n, 0);
    e[j] = 1;
    Coweight nu = lam - e;
    auto a = coefficients(nu);
    auto b = coefficients(e);
    StructureConstants sc = structure_constants_fast(nu, e);
    auto top = sc.coefficients.find(lam);
    if (top == sc.coefficients.end() || !(top->second > 0))
      throw std::logic_error("spherical recursion lost its leading term");
    std::vector<std::shared_ptr<const Laurent<double>>> lower;
    std::vector<double> weight;
    for (const auto& [eta, k] : sc.coefficients)
      if (eta != lam) {
        lower.push_back(coefficients(eta));
        weight.push_back(k);
      }
    auto at = [](const Laurent<double>& L, const Coweight& mu) {
      auto it = L.find(mu);
      return it == L.end() ? 0.0 : it->second;
    };
    // coefficients are W_0-invariant, so only dominant μ are computed
    Laurent<double> out;
    for (const Coweight& mu : support) {
      if (!is_dominant(mu)) continue;
      double v = 0;
      for (const auto& [y, cy] : *b) v += cy * at(*a, mu - y);
      for (std::size_t t = 0; t < lower.size(); ++t) v -= weight[t] * at(*lower[t], mu);
      v /= top->second;
      for (const Coweight& x : roots().weyl_orbit(mu)) out[x] = v;
    }
    last_outside_.store(0.0);
    return out;
  }

  // singular-safe evaluation Σ a_{λ,μ} u^μ
  cplx eval(const Coweight& lam, const Character& z) const {
    cplx s = 0;
    for (const auto& [mu, a] : *coefficients(lam)) s += a * character_power(z, mu);
    return s;
  }
  double value_at_one(const Coweight& lam) const {
    double s = 0;
    for (const auto& [mu, a] : *coefficients(lam)) s += a;
    return s;
  }

  struct DegreeFit {
    int degree;       // smallest total degree that fits
    int bound;        // |R_2^+|
    double residual;  // relative residual at the fitted degree
  };

  // Least-squares fit of r^λ P_λ(1) by polynomials in the coordinates of λ over the box [0, box]^n.
  DegreeFit value_polynomial_degree(int box, double tol = 1e-8) const {
    const int n = rank();
    const int top = static_cast<int>(roots().positive_R2().size());
    std::vector<Coweight> lams;
    Coweight c(n, 0);
    for (;;) {
      lams.push_back(c);
      int j = n - 1;
      while (j >= 0 && ++c[j] > box) c[j--] = 0;
      if (j < 0) break;
    }
    Eigen::VectorXd b(lams.size());
    for (std::size_t i = 0; i < lams.size(); ++i) b(i) = value_at_one(lams[i]) * params().r(lams[i]);
    const double scale = b.cwiseAbs().maxCoeff();
    DegreeFit fit{-1, top, std::numeric_limits<double>::infinity()};
    for (int d = 0; d <= top; ++d) {
      std::vector<Coweight> monomials;
      Coweight e(n, 0);
      for (;;) {
        int total = 0;
        for (int x : e) total += x;
        if (total <= d) monomials.push_back(e);
        int j = n - 1;
        while (j >= 0 && ++e[j] > d) e[j--] = 0;
        if (j < 0) break;
      }
      if (monomials.size() > lams.size()) break;
      Eigen::MatrixXd A(lams.size(), monomials.size());
      for (std::size_t i = 0; i < lams.size(); ++i)
        for (std::size_t m = 0; m < monomials.size(); ++m) {
          double v = 1;
          for (int j = 0; j < n; ++j) v *= std::pow(static_cast<double>(lams[i][j]), monomials[m][j]);
          A(i, m) = v;
        }
      Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);
      double res = (A * x - b).cwiseAbs().maxCoeff() / scale;
      fit.residual = res;
      if (res < tol) {
        fit.degree = d;
        return fit;
      }
    }
    return fit;
  }

  cplx monomial(const Coweight& lam, const Character& z) const {
    cplx s = 0;
    for (const Coweight& mu : roots().weyl_orbit(lam)) s += character_power(z, mu);
    return s;
  }

  // m_λ = Σ_{μ ⪯ λ} b_{λ,μ} P_μ
  std::map<Coweight, double> expand_monomial(const Coweight& lam) const {
    Laurent<double> rem;
    for (const Coweight& mu : roots().weyl_orbit(lam)) rem[mu] = 1.0;
    return peel(std::move(rem), 1e-13).coefficients;
  }

  // A_λ A_μ = Σ a_{λ,μ;ν} A_ν via Laurent product and triangular elimination.
  StructureConstants structure_constants(const Coweight& lam, const Coweight& mu) const {
    auto a = coefficients(lam);
    auto b = coefficients(mu);
    Laurent<double> prod;
    for (const auto& [x, cx] : *a)
      for (const auto& [y, cy] : *b) prod[x + y] += cx * cy;
    double scale = 0;
    for (const auto& [x, c] : prod) scale = std::max(scale, std::abs(c));
    StructureConstants sc = peel(std::move(prod), 1e-12 * scale);
    clamp(sc);
    return sc;
  }

  // Same constants from the straightening rule: r^ν P_ν P_μ = Σ_η a_{μ,η} F(ν + η).
  StructureConstants structure_constants_fast(const Coweight& nu, const Coweight& mu) const {
    auto a = coefficients(mu);
    std::map<Coweight, double> acc;
    {
      std::lock_guard lock(straight_mutex_);
      if (!straightener_) straightener_ = std::make_unique<Straightener>(*ps_);
      for (const auto& [eta, c] : *a)
        for (const auto& [target, k] : straightener_->expand(nu + eta)) acc[target] += c * k;
    }
    StructureConstants sc;
    const double lr = ps_->log_r(nu);
    for (const auto& [target, v] : acc) {
      double x = v * std::exp(ps_->log_r(target) - lr);
      if (std::abs(x) > 1e-15) sc.coefficients[target] = x;
    }
    clamp(sc);
    return sc;
  }

  // |u^{wλ_i}| ≤ r^{λ_i} for all w and i
  bool is_bounded_character(const Character& z, double slack = 1e-12) const {
    const int n = rank();
    for (int i = 0; i < n; ++i) {
      Coweight e(n, 0);
      e[i] = 1;
      const double bound = std::exp(ps_->log_r(e)) * (1.0 + slack);
      for (const Coweight& v : roots().weyl_orbit(e))
        if (std::abs(character_power(z, v)) > bound) return false;
    }
    return true;
  }

  // largest |mass| of DFT coefficients found outside Π_λ, relative, for the last computed λ
  double last_outside_mass() const { return last_outside_.load(); }

  // Smallest |Im θ_j| at which c(u)c(u^{-1}) vanishes with the other angles real.
  double analytic_strip() const {
    double s = std::numeric_limits<double>::infinity();
    auto update = [&](const Coweight& c, double kappa) {
      double d = std::abs(std::log(kappa));
      for (int x : c)
        if (x != 0) s = std::min(s, d / std::abs(x));
    };
    for (const Factor& f : factors_) {
      if (f.doubled) {
        update(f.half, f.A);
        update(f.half, f.B);
      } else {
        update(f.coroot, f.tau);
      }
    }
    return s;
  }

 private:
  struct Factor {
    Coweight coroot;
    double tau = 1;
    bool doubled = false;
    Coweight half;
    double A = 0, B = 0;
  };

  cplx c_impl(const Character& z, const DropFactor* drop) const {
    cplx prod = 1.0;
    for (std::size_t k = 0; k < factors_.size(); ++k) {
      const Factor& f = factors_[k];
      cplx y = 1.0 / character_power(z, f.coroot);
      cplx den = 1.0 - y;
      if (std::abs(den) < 1e-300)
        throw SingularError("c-function denominator 1 - u^{-a} vanishes for coroot " + describe(f.coroot));
      cplx num;
      if (f.doubled) {
        cplx h = 1.0 / character_power(z, f.half);
        num = 1.0 - f.A * h;
        if (!(drop && drop->index == k)) num *= 1.0 + f.B * h;
      } else {
        num = 1.0 - y / f.tau;
      }
      prod *= num / den;
    }
    return prod;
  }

  static std::string describe(const Coweight& c) {
    std::string s = "(";
    for (std::size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + std::to_string(c[i]);
    return s + ")";
  }

  Laurent<double> compute_coefficients(const Coweight& lam) const {
    const RootSystem& R = roots();
    const int n = rank();
    if (!is_dominant(lam)) throw ValidationError("spherical coefficients need a dominant coweight");
    std::vector<Coweight> support = R.saturated_set(lam);
    if (support.size() == 1) {
      Laurent<double> out;
      out[lam] = 1.0;
      return out;
    }
    std::vector<int> lo(n, 0), hi(n, 0);
    for (int j = 0; j < n; ++j) {
      lo[j] = hi[j] = support.front()[j];
      for (const Coweight& mu : support) {
        lo[j] = std::min(lo[j], mu[j]);
        hi[j] = std::max(hi[j], mu[j]);
      }
    }
    int spread = 0;
    for (int j = 0; j < n; ++j) spread = std::max(spread, hi[j] - lo[j] + 1);
    if (spread >= dft_failed_spread_.load()) return coefficients_by_recursion(lam);
    OffsetGrid g;
    g.n = n;
    g.M = spread + 1;
    for (int attempt = 0; attempt < 4; ++attempt) {
      g.offset = choose_offsets(R, attempt * 48);
      try {
        std::vector<cplx> f(g.size());
        for (std::size_t p = 0; p < f.size(); ++p) f[p] = eval_generic(lam, torus_point(g.point(p)));
        std::vector<cplx> c = forward_dft(g, std::move(f), lo);
        std::set<Coweight> in(support.begin(), support.end());
        Laurent<double> raw;
        double inside = 0, outside = 0;
        for (std::size_t p = 0; p < c.size(); ++p) {
          Coweight mu = dft_index_to_coweight(g, p, lo);
          if (in.count(mu)) {
            raw[mu] = c[p].real();
            inside += std::abs(c[p]);
          } else {
            outside += std::abs(c[p]);
          }
        }
        const double rel = inside > 0 ? outside / inside : 0;
        last_outside_.store(rel);
        if (rel > 1e-10) continue;
        // W_0-average each orbit
        Laurent<double> out;
        for (const Coweight& nu : support) {
          if (!is_dominant(nu)) continue;
          std::vector<Coweight> orb = R.weyl_orbit(nu);
          double s = 0;
          for (const Coweight& x : orb) s += raw[x];
          s /= static_cast<double>(orb.size());
          for (const Coweight& x : orb) out[x] = s;
        }
        return out;
      } catch (const SingularError&) {
        continue;
      }
    }
    int prev = dft_failed_spread_.load();
    while (spread < prev && !dft_failed_spread_.compare_exchange_weak(prev, spread)) {
    }
    return coefficients_by_recursion(lam);
  }


  // Peel off spherical functions from the top of a W_0-invariant Laurent polynomial.
  StructureConstants peel(Laurent<double> rem, double tol) const {
    const RootSystem& R = roots();
    StructureConstants sc;
    for (;;) {
      const Coweight* top = nullptr;
      long long best = 0;
      for (const auto& [mu, c] : rem) {
        if (!is_dominant(mu) || std::abs(c) <= tol) continue;
        long long h = R.dominance_height(mu);
        if (!top || h > best) {
          top = &mu;
          best = h;
        }
      }
      if (!top) break;
      Coweight nu = *top;
      auto p = coefficients(nu);
      double k = rem[nu] / p->at(nu);
      sc.coefficients[nu] += k;
      for (const auto& [x, c] : *p) rem[x] -= k * c;
      rem[nu] = 0.0;
    }
    return sc;
  }

  static void clamp(StructureConstants& sc) {
    for (auto it = sc.coefficients.begin(); it != sc.coefficients.end();) {
      if (it->second < 0) {
        sc.clamped += -it->second;
        it = sc.coefficients.erase(it);
      } else if (it->second == 0.0) {
        it = sc.coefficients.erase(it);
      } else {
        ++it;
      }
    }
  }

  std::shared_ptr<const ParameterSystem> ps_;
  std::vector<Factor> factors_;
  mutable std::shared_mutex cache_mutex_;
  mutable std::map<Coweight, std::shared_ptr<const Laurent<double>>> cache_;
  mutable std::mutex straight_mutex_;
  mutable std::unique_ptr<Straightener> straightener_;
  mutable std::atomic<double> last_outside_{0.0};
  // extraction by sampling loses too much to cancellation from this spread on
  mutable std::atomic<int> dft_failed_spread_{std::numeric_limits<int>::max()};
};

}  // namespace isowalk
