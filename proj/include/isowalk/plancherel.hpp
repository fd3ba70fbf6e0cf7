#pragma once

#include <cmath>
#include <complex>
#include <memory>
#include <utility>
#include <vector>

#include "isowalk/dft.hpp"
#include "isowalk/errors.hpp"
#include "isowalk/spherical.hpp"

namespace isowalk {

// Finite walk as (λ, a_λ) pairs.
using WalkTerms = std::vector<std::pair<Coweight, double>>;

// Σ_μ a_{λ,μ} e^{i<μ,θ>}
inline cplx eval_on_torus(const Laurent<double>& coeffs, const std::vector<double>& theta) {
  cplx s = 0;
  for (const auto& [mu, a] : coeffs) {
    double ph = 0;
    for (std::size_t j = 0; j < mu.size(); ++j) ph += mu[j] * theta[j];
    s += std::polar(a, ph);
  }
  return s;
}

// Largest |<μ, α_j>| over the support of the walk's spherical functions.
inline int walk_bandwidth(const Spherical& sph, const WalkTerms& walk) {
  int s = 0;
  for (const auto& [lam, a] : walk)
    for (const auto& [mu, c] : *sph.coefficients(lam))
      for (int x : mu) s = std::max(s, std::abs(x));
  return s;
}

// Plancherel measure: torus quadrature plus the extra component in the exceptional BC case.
class Plancherel {
 public:
  Plancherel(std::shared_ptr<const Spherical> sph, int M) : sph_(std::move(sph)) {
    const ParameterSystem& ps = sph_->params();
    const int n = ps.rank();
    grid_.n = n;
    grid_.M = M;
    grid_.offset = choose_offsets(ps.roots());
    const double norm = ps.poincare() / static_cast<double>(ps.weyl().size());
    density_.resize(grid_.size());
    points_.resize(grid_.size());
    for (std::size_t p = 0; p < grid_.size(); ++p) {
      points_[p] = grid_.point(p);
      Character z = torus_point(points_[p]);
      cplx phi0 = sph_->c_function(z) * sph_->c_function(inverse(z));
      density_[p] = norm / phi0.real();
      max_imag_ = std::max(max_imag_, std::abs(phi0.imag()) / std::abs(phi0));
    }
    if (ps.exceptional()) build_exceptional();
  }

  // max(64, 2·bandwidth + 1) plus enough points for the density's Fourier tail to fall below 1e-16
  static int grid_size_for(int bandwidth, const Spherical& sph) {
    double strip = sph.analytic_strip();
    if (!(strip > 0)) throw ValidationError("Plancherel density has a pole on the torus");
    double margin = std::ceil(std::log(1e16) / strip);
    if (margin > 4096) throw BudgetError("parameters too close to 1: quadrature grid would need " +
                                         std::to_string(static_cast<long long>(margin)) + " extra points per axis");
    return std::max(64, 2 * bandwidth + 1 + static_cast<int>(margin));
  }

  const OffsetGrid& grid() const { return grid_; }
  bool exceptional() const { return sph_->params().exceptional(); }
  double max_imaginary_residue() const { return max_imag_; }

  // ∫_𝕌 f dπ; f receives the character and the angles
  template <class F>
  cplx integrate_torus(F&& f) const {
    cplx s = 0;
    for (std::size_t p = 0; p < points_.size(); ++p)
      s += f(torus_point(points_[p]), points_[p]) * density_[p];
    return s / static_cast<double>(points_.size());
  }

  // ∫_𝕌' f dπ
  template <class F>
  cplx integrate_exceptional(F&& f) const {
    if (!exceptional()) throw ValidationError("the exceptional component exists only for BC with q_n < q_0");
    cplx s = 0;
    for (std::size_t p = 0; p < ex_points_.size(); ++p) s += f(ex_points_[p]) * ex_mass_[p];
    return s;
  }

  template <class F>
  cplx integrate(F&& f, bool include_exceptional = true) const {
    cplx s = integrate_torus([&](const Character& z, const std::vector<double>&) { return f(z); });
    if (include_exceptional && exceptional()) s += integrate_exceptional(f);
    return s;
  }

  // ∫ P_λ conj(P_μ) dπ
  cplx inner(const Coweight& lam, const Coweight& mu, bool include_exceptional = true) const {
    auto a = sph_->coefficients(lam);
    auto b = sph_->coefficients(mu);
    cplx s = integrate_torus([&](const Character&, const std::vector<double>& th) {
      return eval_on_torus(*a, th) * std::conj(eval_on_torus(*b, th));
    });
    if (include_exceptional && exceptional())
      s += integrate_exceptional([&](const Character& z) { return sph_->eval(lam, z) * std::conj(sph_->eval(mu, z)); });
    return s;
  }

  // Mass and φ_1 values of 𝕌' nodes (empty in the standard case).
  const std::vector<Character>& exceptional_points() const { return ex_points_; }
  const std::vector<double>& exceptional_phi() const { return ex_phi_; }

  // p^{(k)}(x,y), y ∈ V_λ(x), for k = 0..kmax; result[k][i] for lambdas[i].
  std::vector<std::vector<double>> kstep_table(const WalkTerms& walk, const std::vector<Coweight>& lambdas,
                                               int kmax) const {
    const int n = grid_.n;
    const int M = grid_.M;
    std::vector<std::shared_ptr<const Laurent<double>>> coeffs;
    for (const Coweight& lam : lambdas) coeffs.push_back(sph_->coefficients(lam));
    std::vector<std::shared_ptr<const Laurent<double>>> walk_coeffs;
    for (const auto& [lam, a] : walk) walk_coeffs.push_back(sph_->coefficients(lam));
    auto a_hat_torus = [&](const std::vector<double>& th) {
      cplx s = 0;
      for (std::size_t t = 0; t < walk.size(); ++t) s += walk[t].second * eval_on_torus(*walk_coeffs[t], th);
      return s;
    };
    for (const auto& c : coeffs)
      for (const auto& [mu, a] : *c)
        for (int x : mu)
          if (2 * std::abs(x) >= M) throw BudgetError("k-step grid too small for the requested coweights");
    std::vector<cplx> ahat(points_.size());
    for (std::size_t p = 0; p < points_.size(); ++p) ahat[p] = a_hat_torus(points_[p]);
    std::vector<int> lo(n, -(M / 2));
    std::vector<cplx> g(points_.size());
    for (std::size_t p = 0; p < g.size(); ++p) g[p] = density_[p];
    std::vector<std::vector<double>> table(kmax + 1, std::vector<double>(lambdas.size(), 0.0));
    // exceptional component values
    std::vector<cplx> ex_ahat(ex_points_.size()), ex_pow(ex_points_.size());
    std::vector<std::vector<cplx>> ex_conj(lambdas.size(), std::vector<cplx>(ex_points_.size()));
    for (std::size_t p = 0; p < ex_points_.size(); ++p) {
      cplx s = 0;
      for (std::size_t t = 0; t < walk.size(); ++t) s += walk[t].second * sph_->eval(walk[t].first, ex_points_[p]);
      ex_ahat[p] = s;
      ex_pow[p] = ex_mass_[p];
      for (std::size_t i = 0; i < lambdas.size(); ++i) ex_conj[i][p] = std::conj(sph_->eval(lambdas[i], ex_points_[p]));
    }
    for (int k = 0; k <= kmax; ++k) {
      std::vector<cplx> F = forward_dft(grid_, g, lo);
      for (std::size_t i = 0; i < lambdas.size(); ++i) {
        cplx s = 0;
        for (const auto& [mu, a] : *coeffs[i]) {
          std::size_t flat = 0;
          for (int j = 0; j < n; ++j) flat = flat * M + static_cast<std::size_t>(mu[j] - lo[j]);
          s += a * F[flat];
        }
        for (std::size_t p = 0; p < ex_points_.size(); ++p) s += ex_pow[p] * ex_conj[i][p];
        table[k][i] = s.real();
      }
      for (std::size_t p = 0; p < g.size(); ++p) g[p] *= ahat[p];
      for (std::size_t p = 0; p < ex_points_.size(); ++p) ex_pow[p] *= ex_ahat[p];
    }
    return table;
  }

 private:
  void build_exceptional() {
    const ParameterSystem& ps = sph_->params();
    const int n = ps.rank();
    const double b = ps.b();
    const std::size_t drop = sph_->bc_first_short_factor();
    double wprime = 1;
    for (int i = 1; i < n; ++i) wprime *= 2.0 * i;  // 2^{n-1} (n-1)!
    const double norm = ps.poincare() / wprime;
    std::size_t count = 1;
    for (int j = 1; j < n; ++j) count *= static_cast<std::size_t>(grid_.M);
    for (std::size_t p = 0; p < count; ++p) {
      std::vector<cplx> t(n);
      t[0] = -b;
      std::size_t flat = p;
      for (int j = n - 1; j >= 1; --j) {
        t[j] = std::polar(1.0, grid_.theta(j, static_cast<int>(flat % grid_.M)));
        flat /= grid_.M;
      }
      Character z = from_bc_coordinates(t);
      cplx phi1 = sph_->c_function(z) * sph_->c_function_dropping(inverse(z), drop);
      ex_points_.push_back(z);
      ex_phi_.push_back(phi1.real());
      ex_mass_.push_back(norm / phi1.real() / static_cast<double>(count));
    }
  }

  std::shared_ptr<const Spherical> sph_;
  OffsetGrid grid_;
  std::vector<std::vector<double>> points_;
  std::vector<double> density_;
  double max_imag_ = 0;
  std::vector<Character> ex_points_;
  std::vector<double> ex_phi_;
  std::vector<double> ex_mass_;
};

}  // namespace isowalk
