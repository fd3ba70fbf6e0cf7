#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "isowalk/errors.hpp"
#include "isowalk/root_system.hpp"
#include "isowalk/weyl.hpp"

namespace isowalk {

enum class AffineType { A, B, C, D, E, F, G };

// Root system attached to an affine building type.
inline Family root_system_for_building(AffineType type, int rank, bool q0_equals_qn) {
  switch (type) {
    case AffineType::A:
      if (rank == 1) return q0_equals_qn ? Family::A : Family::BC;
      return Family::A;
    case AffineType::C: return q0_equals_qn ? Family::C : Family::BC;
    case AffineType::B: return Family::B;
    case AffineType::D: return Family::D;
    case AffineType::E: return Family::E;
    case AffineType::F: return Family::F;
    case AffineType::G: return Family::G;
  }
  return Family::A;
}

// Parameters q_0..q_n of the building and the derived τ_α, r and N_λ.
class ParameterSystem {
 public:
  ParameterSystem(std::shared_ptr<const RootSystem> rs, std::vector<double> q,
                  std::size_t weyl_cap = WeylGroup::kDefaultCap)
      : rs_(std::move(rs)) {
    const int n = rs_->rank();
    if (q.size() == 1) q.assign(n + 1, q[0]);
    if (static_cast<int>(q.size()) != n + 1)
      throw ValidationError("expected " + std::to_string(n + 1) + " parameters q_0..q_" + std::to_string(n));
    for (double x : q)
      if (!(x > 1.0) || !std::isfinite(x)) throw ValidationError("parameters must be finite and > 1");
    q_ = std::move(q);
    validate_equalities();
    build_tau();
    try {
      weyl_ = std::make_shared<WeylGroup>(*rs_, weyl_cap);
    } catch (const BudgetError& e) {
      weyl_error_ = e.what();
    }
    if (weyl_) {
      double s = 0;
      for (const WeylElement& w : weyl_->elements()) {
        double l = 0;
        for (int i : w.word) l += std::log(q_[i + 1]);
        log_qw_.push_back(l);
        s += std::exp(-l);
      }
      poincare_inv_ = s;
    }
  }

  const RootSystem& roots() const { return *rs_; }
  std::shared_ptr<const RootSystem> roots_ptr() const { return rs_; }
  bool has_weyl() const { return static_cast<bool>(weyl_); }
  const WeylGroup& weyl() const {
    if (!weyl_) throw BudgetError(weyl_error_);
    return *weyl_;
  }
  int rank() const { return rs_->rank(); }
  const std::vector<double>& q() const { return q_; }
  double q(int node) const { return q_[node]; }
  bool exceptional() const { return exceptional_; }
  // BC constants a = sqrt(q_n q_0), b = sqrt(q_n / q_0)
  double a() const { return std::sqrt(q_.back() * q_[0]); }
  double b() const { return std::sqrt(q_.back() / q_[0]); }
  bool integral_parameters() const {
    for (double x : q_)
      if (std::abs(x - std::round(x)) > 1e-12) return false;
    return true;
  }

  // τ_α; 1 when α is not a root
  double tau(std::size_t root) const { return tau_[root]; }
  double tau_ambient(const RatVec& v) const {
    auto i = rs_->find_root(v);
    return i ? tau_[*i] : 1.0;
  }
  // τ_{2α}, 1 if 2α is not a root
  double tau_double(std::size_t root) const {
    auto i = rs_->double_of(root);
    return i ? tau_[*i] : 1.0;
  }
  double q_root(std::size_t root) const { return q_alpha_[root]; }

  // log r^λ
  double log_r(const Coweight& c) const {
    double s = 0;
    for (std::size_t i = 0; i < c.size(); ++i) s += c[i] * log_r_fund_[i];
    return s;
  }
  double r(const Coweight& c) const { return std::exp(log_r(c)); }
  // log r^λ via Π_j (τ_{β_j} τ_{2β_j}^2)^{<λ,ρ_j>}
  double log_r_product(const Coweight& c) const {
    double s = 0;
    const auto& cls = rs_->length_classes();
    for (std::size_t j = 0; j < cls.size(); ++j) {
      std::size_t beta = rs_->simple_root_index(cls[j].representative);
      double t = tau_[beta] * tau_double(beta) * tau_double(beta);
      s += boost::rational_cast<double>(rs_->pair_rho(c, static_cast<int>(j))) * std::log(t);
    }
    return s;
  }

  double log_qw(std::size_t k) const {
    weyl();
    return log_qw_[k];
  }
  // W_0(q^{-1})
  double poincare() const {
    weyl();
    return poincare_inv_;
  }
  double poincare(const std::vector<std::size_t>& subset) const {
    weyl();
    double s = 0;
    for (std::size_t k : subset) s += std::exp(-log_qw_[k]);
    return s;
  }
  double log_N(const Coweight& lam) const {
    if (!is_dominant(lam)) throw ValidationError("N_lambda needs a dominant coweight");
    return std::log(poincare() / poincare(weyl().stabilizer(lam))) + 2.0 * log_r(lam);
  }
  double N(const Coweight& lam) const { return std::exp(log_N(lam)); }

 private:
  void validate_equalities() {
    const RootSystem& R = *rs_;
    const int n = R.rank();
    auto same = [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(x, y); };
    if (R.family() == Family::BC) {
      for (int i = 2; i < n; ++i)
        if (!same(q_[i], q_[1])) throw ValidationError("BC parameters need q_1 = ... = q_{n-1}");
      exceptional_ = q_[n] < q_[0];
      if (exceptional_ && n >= 2 && q_[1] * b() < 1.0)
        throw ValidationError("exceptional BC parameters violate q_1 b >= 1");
      return;
    }
    // node 0 carries the highest root, which is long
    Rat long_len = R.norm2(R.highest_root());
    for (int i = 0; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j) {
        Rat li = i == 0 ? long_len : R.inner_simple(i - 1, i - 1);
        Rat lj = R.inner_simple(j - 1, j - 1);
        if (li == lj && !same(q_[i], q_[j]))
          throw ValidationError("q_" + std::to_string(i) + " and q_" + std::to_string(j) +
                                " must agree for conjugate nodes of " + R.name());
      }
  }

  void build_tau() {
    const RootSystem& R = *rs_;
    const int n = R.rank();
    tau_.assign(R.num_roots(), 1.0);
    q_alpha_.assign(R.num_roots(), 1.0);
    for (std::size_t a = 0; a < R.num_roots(); ++a) {
      Rat l = R.norm2(a);
      double qa = 0;
      if (R.family() == Family::BC) {
        if (l == Rat(1)) qa = q_[n];
        else if (l == Rat(4)) qa = q_[0];
        else qa = q_[1];
      } else {
        for (int i = 0; i < n; ++i)
          if (R.inner_simple(i, i) == l) qa = q_[i + 1];
      }
      q_alpha_[a] = qa;
      if (R.in_R3(a)) tau_[a] = qa;
      else if (R.in_R1(a)) tau_[a] = q_[0];
      else tau_[a] = qa / q_[0];
    }
    log_r_fund_.assign(n, 0.0);
    for (std::size_t a : R.positive_roots())
      for (int i = 0; i < n; ++i) log_r_fund_[i] += 0.5 * R.root_coords()[a][i] * std::log(tau_[a]);
  }

  std::shared_ptr<const RootSystem> rs_;
  std::vector<double> q_;
  bool exceptional_ = false;
  std::vector<double> tau_;
  std::vector<double> q_alpha_;
  std::vector<double> log_r_fund_;
  std::shared_ptr<const WeylGroup> weyl_;
  std::string weyl_error_;
  std::vector<double> log_qw_;
  double poincare_inv_ = 0;
};

}  // namespace isowalk
