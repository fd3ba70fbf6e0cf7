#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <deque>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "isowalk/errors.hpp"
#include "isowalk/smith.hpp"

// Boost 1.74 integer comparisons recurse under C++20 rewritten operators.
namespace boost {
inline bool operator==(const rational<long long>& a, int b) { return a.denominator() == 1 && a.numerator() == b; }
inline bool operator==(const rational<long long>& a, long long b) {
  return a.denominator() == 1 && a.numerator() == b;
}
}  // namespace boost

namespace isowalk {

using Rat = boost::rational<long long>;
using RatVec = std::vector<Rat>;

// Coweight λ = Σ c_i λ_i stored as c_i = <λ, α_i>.
using Coweight = std::vector<int>;

enum class Family { A, B, C, D, E, F, G, BC };

inline std::string family_name(Family f) {
  switch (f) {
    case Family::A: return "A";
    case Family::B: return "B";
    case Family::C: return "C";
    case Family::D: return "D";
    case Family::E: return "E";
    case Family::F: return "F";
    case Family::G: return "G";
    case Family::BC: return "BC";
  }
  return "?";
}

inline Family parse_family(const std::string& s) {
  if (s == "A") return Family::A;
  if (s == "B") return Family::B;
  if (s == "C") return Family::C;
  if (s == "D") return Family::D;
  if (s == "E") return Family::E;
  if (s == "F") return Family::F;
  if (s == "G") return Family::G;
  if (s == "BC") return Family::BC;
  throw ValidationError("unknown root system family '" + s + "'");
}

inline Rat dot(const RatVec& a, const RatVec& b) {
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Coweight operator+(const Coweight& a, const Coweight& b) {
  Coweight c(a);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += b[i];
  return c;
}

inline Coweight operator-(const Coweight& a, const Coweight& b) {
  Coweight c(a);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] -= b[i];
  return c;
}

inline Coweight operator-(const Coweight& a) {
  Coweight c(a);
  for (auto& x : c) x = -x;
  return c;
}

inline Coweight scale(const Coweight& a, int k) {
  Coweight c(a);
  for (auto& x : c) x *= k;
  return c;
}

inline bool is_dominant(const Coweight& c) {
  return std::all_of(c.begin(), c.end(), [](int x) { return x >= 0; });
}

// A character of P/Q: u^{λ_j} = exp(2πi phase_j).
struct QuotientCharacter {
  RatVec phase;

  std::vector<std::complex<double>> values() const {
    std::vector<std::complex<double>> z;
    for (const Rat& p : phase) {
      double t = 2.0 * std::numbers::pi * boost::rational_cast<double>(p);
      z.emplace_back(std::cos(t), std::sin(t));
    }
    return z;
  }
  // u^μ = exp(2πi Σ c_j phase_j), returned as the phase in [0,1)
  Rat phase_of(const Coweight& mu) const {
    Rat s = 0;
    for (std::size_t j = 0; j < mu.size(); ++j) s += phase[j] * Rat(mu[j]);
    long long fl = s.numerator() / s.denominator();
    if (s.numerator() < 0 && s.numerator() % s.denominator() != 0) --fl;
    return s - Rat(fl);
  }
  bool is_trivial() const {
    return std::all_of(phase.begin(), phase.end(), [](const Rat& p) { return p == 0; });
  }
};

// Partition class of R_2 by root length.
struct LengthClass {
  Rat norm2;               // <α,α>
  int representative;      // index of a simple root in the class
  RatVec rho;              // ρ_j in simple-root coordinates
};

class RootSystem {
 public:
  RootSystem(Family family, int rank) {
    if (family == Family::B && rank == 1) family = Family::A;
    if (family == Family::C && rank == 1) family = Family::A;
    family_ = family;
    n_ = rank;
    validate_type();
    build_simple_roots();
    build_roots();
    build_derived();
  }

  Family family() const { return family_; }
  int rank() const { return n_; }
  int ambient_dim() const { return dim_; }
  std::string name() const { return family_name(family_) + std::to_string(n_); }
  bool reduced() const { return family_ != Family::BC; }

  const std::vector<RatVec>& simple_roots() const { return simple_; }
  const std::vector<RatVec>& roots() const { return roots_; }
  std::size_t num_roots() const { return roots_.size(); }
  const RatVec& root(std::size_t i) const { return roots_[i]; }
  // simple-root coordinates of each root
  const std::vector<std::vector<int>>& root_coords() const { return root_coords_; }
  const std::vector<std::size_t>& positive_roots() const { return positive_; }
  bool is_positive(std::size_t i) const { return height_[i] > 0; }
  int height(std::size_t i) const { return height_[i]; }

  bool in_R1(std::size_t i) const { return in_r1_[i]; }
  bool in_R2(std::size_t i) const { return in_r2_[i]; }
  bool in_R3(std::size_t i) const { return in_r1_[i] && in_r2_[i]; }
  // positive roots of R_2
  const std::vector<std::size_t>& positive_R2() const { return positive_r2_; }
  // index of 2α when it is a root
  std::optional<std::size_t> double_of(std::size_t i) const {
    auto it = index_.find(times(roots_[i], 2));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::size_t> find_root(const RatVec& v) const {
    auto it = index_.find(v);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  Rat norm2(std::size_t i) const { return dot(roots_[i], roots_[i]); }
  const std::vector<std::vector<Rat>>& gram() const { return gram_; }
  Rat inner_simple(int i, int j) const { return gram_[i][j]; }
  // A_ij = <α_i∨, α_j>
  const std::vector<std::vector<int>>& cartan() const { return cartan_; }

  // <λ, α> for λ in coweight coordinates
  int pair(const Coweight& c, std::size_t root) const {
    int s = 0;
    for (int i = 0; i < n_; ++i) s += root_coords_[root][i] * c[i];
    return s;
  }
  // α∨ as a coweight
  const Coweight& coroot(std::size_t root) const { return coroot_cw_[root]; }
  const Coweight& simple_coroot(int i) const { return coroot_cw_[simple_index_[i]]; }
  std::size_t simple_root_index(int i) const { return simple_index_[i]; }

  RatVec coweight_ambient(const Coweight& c) const {
    RatVec v(dim_, Rat(0));
    for (int i = 0; i < n_; ++i)
      for (int d = 0; d < dim_; ++d) v[d] += Rat(c[i]) * fundamental_[i][d];
    return v;
  }
  const std::vector<RatVec>& fundamental_coweights() const { return fundamental_; }
  // ambient vector -> coweight coordinates <v, α_i>; throws when not in P
  Coweight to_coweight(const RatVec& v) const {
    Coweight c(n_);
    for (int i = 0; i < n_; ++i) {
      Rat p = dot(v, simple_[i]);
      if (p.denominator() != 1) throw ValidationError("vector is not a coweight");
      c[i] = static_cast<int>(p.numerator());
    }
    return c;
  }

  std::size_t highest_root() const { return highest_; }
  // m_1..m_n
  const std::vector<int>& marks() const { return marks_; }
  const std::vector<int>& good_types() const { return good_types_; }
  const std::vector<LengthClass>& length_classes() const { return classes_; }
  // class index of a root of R_2
  int length_class(std::size_t root) const {
    for (std::size_t j = 0; j < classes_.size(); ++j)
      if (classes_[j].norm2 == norm2(root)) return static_cast<int>(j);
    return -1;
  }
  // <λ, ρ_j>
  Rat pair_rho(const Coweight& c, int j) const {
    Rat s = 0;
    for (int i = 0; i < n_; ++i) s += classes_[j].rho[i] * Rat(c[i]);
    return s;
  }
  // simple-root coordinates of 2ρ; positive, so Σ k_i c_i strictly increases along dominance
  const std::vector<int>& two_rho() const { return two_rho_; }
  long long dominance_height(const Coweight& c) const {
    long long h = 0;
    for (int i = 0; i < n_; ++i) h += static_cast<long long>(two_rho_[i]) * c[i];
    return h;
  }

  // Basis of Q^+ (the base of R∨) in coweight coordinates.
  const std::vector<Coweight>& coroot_basis() const { return qbasis_; }
  // positive roots of R∨ in coweight coordinates, deduplicated
  const std::vector<Coweight>& positive_coroots() const { return pos_coroots_; }

  // coordinates of c in the Q basis (rational)
  RatVec q_coordinates(const Coweight& c) const {
    RatVec x(n_, Rat(0));
    for (int j = 0; j < n_; ++j) {
      long long s = 0;
      for (int i = 0; i < n_; ++i) s += static_cast<long long>(c[i]) * qadj_[i][j];
      x[j] = Rat(s, qdet_);
    }
    return x;
  }
  bool in_Q(const Coweight& c) const {
    for (const Rat& x : q_coordinates(c))
      if (x.denominator() != 1) return false;
    return true;
  }
  // μ ⪯ λ iff λ - μ ∈ Q^+
  bool dominance_leq(const Coweight& mu, const Coweight& lam) const {
    for (const Rat& x : q_coordinates(lam - mu))
      if (x.denominator() != 1 || x < 0) return false;
    return true;
  }

  Coweight reflect(int i, const Coweight& c) const {
    Coweight out(c);
    const Coweight& a = simple_coroot(i);
    for (int j = 0; j < n_; ++j) out[j] -= c[i] * a[j];
    return out;
  }

  // dominant representative of the W_0-orbit
  Coweight dominant_rep(Coweight c) const {
    for (bool moved = true; moved;) {
      moved = false;
      for (int i = 0; i < n_; ++i)
        if (c[i] < 0) {
          c = reflect(i, c);
          moved = true;
        }
    }
    return c;
  }

  std::vector<Coweight> weyl_orbit(const Coweight& c, std::size_t cap = 2000000) const {
    std::set<Coweight> seen{c};
    std::deque<Coweight> queue{c};
    while (!queue.empty()) {
      Coweight x = std::move(queue.front());
      queue.pop_front();
      for (int i = 0; i < n_; ++i) {
        if (x[i] == 0) continue;
        Coweight y = reflect(i, x);
        if (seen.insert(y).second) {
          if (seen.size() > cap) throw BudgetError("Weyl orbit exceeds enumeration cap");
          queue.push_back(std::move(y));
        }
      }
    }
    return {seen.begin(), seen.end()};
  }

  // dominant ν with ν ⪯ λ
  std::vector<Coweight> dominant_below(const Coweight& lam) const {
    if (!is_dominant(lam)) throw ValidationError("coweight is not dominant");
    std::set<Coweight> seen{lam};
    std::deque<Coweight> queue{lam};
    while (!queue.empty()) {
      Coweight x = std::move(queue.front());
      queue.pop_front();
      for (const Coweight& a : pos_coroots_) {
        Coweight y = x - a;
        if (!is_dominant(y) || seen.count(y)) continue;
        seen.insert(y);
        queue.push_back(std::move(y));
      }
    }
    return {seen.begin(), seen.end()};
  }

  // Π_λ
  std::vector<Coweight> saturated_set(const Coweight& lam, std::size_t cap = 2000000) const {
    std::set<Coweight> out;
    for (const Coweight& nu : dominant_below(lam)) {
      for (Coweight& x : weyl_orbit(nu, cap)) out.insert(std::move(x));
      if (out.size() > cap) throw BudgetError("saturated set exceeds enumeration cap");
    }
    return {out.begin(), out.end()};
  }

  // All |P/Q| characters via the Smith form of the Q basis.
  std::vector<QuotientCharacter> quotient_characters() const {
    IntMatrix C(n_, std::vector<long long>(n_));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) C[i][j] = qbasis_[i][j];
    SmithForm s = smith_normal_form(C);
    // characters: y = V (k / d)
    std::vector<QuotientCharacter> out;
    std::vector<long long> k(n_, 0);
    for (;;) {
      QuotientCharacter chi;
      chi.phase.assign(n_, Rat(0));
      for (int r = 0; r < n_; ++r)
        for (int i = 0; i < n_; ++i) chi.phase[r] += Rat(s.V[r][i]) * Rat(k[i], s.diag[i]);
      for (Rat& p : chi.phase) {
        while (p < 0) p += 1;
        while (p >= 1) p -= 1;
      }
      out.push_back(chi);
      int i = 0;
      for (; i < n_; ++i) {
        if (++k[i] < s.diag[i]) break;
        k[i] = 0;
      }
      if (i == n_) break;
    }
    std::sort(out.begin(), out.end(), [](const QuotientCharacter& a, const QuotientCharacter& b) {
      return a.phase < b.phase;
    });
    return out;
  }

  // |W_0| from the classification
  long long weyl_order() const {
    auto fact = [](int k) {
      long long f = 1;
      for (int i = 2; i <= k; ++i) f *= i;
      return f;
    };
    switch (family_) {
      case Family::A: return fact(n_ + 1);
      case Family::B:
      case Family::C:
      case Family::BC: return (1LL << n_) * fact(n_);
      case Family::D: return (1LL << (n_ - 1)) * fact(n_);
      case Family::E: return n_ == 6 ? 51840LL : n_ == 7 ? 2903040LL : 696729600LL;
      case Family::F: return 1152;
      case Family::G: return 12;
    }
    return 0;
  }

  long long index_P_over_Q() const { return qdet_ < 0 ? -qdet_ : qdet_; }

 private:
  static RatVec times(const RatVec& v, long long k) {
    RatVec w(v);
    for (auto& x : w) x *= k;
    return w;
  }
  static RatVec reflect_ambient(const RatVec& v, const RatVec& a) {
    Rat k = Rat(2) * dot(v, a) / dot(a, a);
    RatVec w(v);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= k * a[i];
    return w;
  }

  void validate_type() {
    bool ok = false;
    switch (family_) {
      case Family::A: ok = n_ >= 1; break;
      case Family::B: ok = n_ >= 2; break;
      case Family::C: ok = n_ >= 2; break;
      case Family::D: ok = n_ >= 4; break;
      case Family::E: ok = n_ >= 6 && n_ <= 8; break;
      case Family::F: ok = n_ == 4; break;
      case Family::G: ok = n_ == 2; break;
      case Family::BC: ok = n_ >= 1; break;
    }
    if (!ok) throw ValidationError("invalid root system type " + family_name(family_) + std::to_string(n_));
  }

  void build_simple_roots() {
    auto e = [this](int i) {
      RatVec v(dim_, Rat(0));
      v[i] = 1;
      return v;
    };
    auto add = [](RatVec a, const RatVec& b, Rat k) {
      for (std::size_t i = 0; i < a.size(); ++i) a[i] += k * b[i];
      return a;
    };
    simple_.clear();
    switch (family_) {
      case Family::A:
        dim_ = n_ + 1;
        for (int i = 0; i < n_; ++i) simple_.push_back(add(e(i), e(i + 1), -1));
        break;
      case Family::B:
      case Family::C:
      case Family::BC:
      case Family::D:
        dim_ = n_;
        for (int i = 0; i + 1 < n_; ++i) simple_.push_back(add(e(i), e(i + 1), -1));
        if (family_ == Family::C)
          simple_.push_back(times(e(n_ - 1), 2));
        else if (family_ == Family::D)
          simple_.push_back(add(e(n_ - 2), e(n_ - 1), 1));
        else
          simple_.push_back(e(n_ - 1));
        break;
      case Family::E: {
        dim_ = 8;
        RatVec a1(8, Rat(-1, 2));
        a1[0] = Rat(1, 2);
        a1[7] = Rat(1, 2);
        simple_.push_back(a1);
        simple_.push_back(add(e(0), e(1), 1));
        simple_.push_back(add(e(1), e(0), -1));
        for (int i = 4; i <= n_; ++i) simple_.push_back(add(e(i - 2), e(i - 3), -1));
        break;
      }
      case Family::F: {
        dim_ = 4;
        simple_.push_back(add(e(1), e(2), -1));
        simple_.push_back(add(e(2), e(3), -1));
        simple_.push_back(e(3));
        simple_.push_back(RatVec{Rat(1, 2), Rat(-1, 2), Rat(-1, 2), Rat(-1, 2)});
        break;
      }
      case Family::G:
        dim_ = 3;
        simple_.push_back(add(e(0), e(1), -1));
        simple_.push_back(RatVec{Rat(-2), Rat(1), Rat(1)});
        break;
    }
  }

  void build_roots() {
    std::set<RatVec> found(simple_.begin(), simple_.end());
    if (family_ == Family::BC) found.insert(times(simple_[n_ - 1], 2));
    std::vector<RatVec> frontier(found.begin(), found.end());
    while (!frontier.empty()) {
      std::vector<RatVec> next;
      for (const RatVec& v : frontier)
        for (const RatVec& a : simple_) {
          RatVec w = reflect_ambient(v, a);
          if (found.insert(w).second) next.push_back(w);
        }
      frontier = std::move(next);
    }
    roots_.assign(found.begin(), found.end());
    for (std::size_t i = 0; i < roots_.size(); ++i) index_[roots_[i]] = i;
  }

  void build_derived() {
    gram_.assign(n_, std::vector<Rat>(n_));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) gram_[i][j] = dot(simple_[i], simple_[j]);
    std::vector<std::vector<Rat>> ginv = invert(gram_);

    // simple-root coordinates: x = G^{-1} (<v, α_j>)_j
    root_coords_.clear();
    height_.clear();
    for (const RatVec& r : roots_) {
      std::vector<int> k(n_);
      int h = 0;
      for (int i = 0; i < n_; ++i) {
        Rat s = 0;
        for (int j = 0; j < n_; ++j) s += ginv[i][j] * dot(r, simple_[j]);
        if (s.denominator() != 1) throw std::logic_error("non-integral root coordinates");
        k[i] = static_cast<int>(s.numerator());
        h += k[i];
      }
      root_coords_.push_back(k);
      height_.push_back(h);
    }
    for (std::size_t i = 0; i < roots_.size(); ++i)
      if (height_[i] > 0) positive_.push_back(i);

    fundamental_.assign(n_, RatVec(dim_, Rat(0)));
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < n_; ++k)
        for (int d = 0; d < dim_; ++d) fundamental_[i][d] += ginv[i][k] * simple_[k][d];

    coroot_cw_.clear();
    for (const RatVec& r : roots_) {
      Rat s = Rat(2) / dot(r, r);
      Coweight c(n_);
      for (int j = 0; j < n_; ++j) {
        Rat p = s * dot(r, simple_[j]);
        if (p.denominator() != 1) throw std::logic_error("non-integral coroot pairing");
        c[j] = static_cast<int>(p.numerator());
      }
      coroot_cw_.push_back(c);
    }
    simple_index_.clear();
    for (const RatVec& a : simple_) simple_index_.push_back(index_.at(a));
    cartan_.assign(n_, std::vector<int>(n_));
    for (int i = 0; i < n_; ++i) cartan_[i] = coroot_cw_[simple_index_[i]];

    in_r1_.assign(roots_.size(), true);
    in_r2_.assign(roots_.size(), true);
    for (std::size_t i = 0; i < roots_.size(); ++i) {
      if (index_.count(times(roots_[i], 2))) in_r1_[i] = false;
      RatVec half(roots_[i]);
      for (auto& x : half) x /= 2;
      if (index_.count(half)) in_r2_[i] = false;
    }
    for (std::size_t i : positive_)
      if (in_r2_[i]) positive_r2_.push_back(i);

    highest_ = positive_.front();
    for (std::size_t i : positive_)
      if (height_[i] > height_[highest_]) highest_ = i;
    marks_ = root_coords_[highest_];
    good_types_ = {0};
    for (int i = 0; i < n_; ++i)
      if (marks_[i] == 1) good_types_.push_back(i + 1);

    classes_.clear();
    for (int i = 0; i < n_; ++i) {
      Rat l = dot(simple_[i], simple_[i]);
      bool seen = false;
      for (const auto& c : classes_) seen = seen || c.norm2 == l;
      if (seen) continue;
      LengthClass c{l, i, RatVec(n_, Rat(0))};
      for (std::size_t r : positive_r2_)
        if (dot(roots_[r], roots_[r]) == l)
          for (int k = 0; k < n_; ++k) c.rho[k] += Rat(root_coords_[r][k], 2);
      classes_.push_back(c);
    }
    two_rho_.assign(n_, 0);
    for (std::size_t r : positive_)
      for (int k = 0; k < n_; ++k) two_rho_[k] += root_coords_[r][k];

    qbasis_.clear();
    for (int i = 0; i < n_; ++i) {
      Coweight b = coroot_cw_[simple_index_[i]];
      if (family_ == Family::BC && i == n_ - 1)
        b = coroot_cw_[index_.at(times(simple_[i], 2))];
      qbasis_.push_back(b);
    }
    std::vector<std::vector<Rat>> qm(n_, std::vector<Rat>(n_));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) qm[i][j] = qbasis_[i][j];
    Rat det = determinant(qm);
    qdet_ = det.numerator();
    std::vector<std::vector<Rat>> qinv = invert(qm);
    qadj_.assign(n_, std::vector<long long>(n_));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        Rat v = qinv[i][j] * det;
        qadj_[i][j] = v.numerator();
      }

    std::set<Coweight> pc;
    for (std::size_t r : positive_) pc.insert(coroot_cw_[r]);
    pos_coroots_.assign(pc.begin(), pc.end());
  }

  static Rat determinant(std::vector<std::vector<Rat>> a) {
    const std::size_t n = a.size();
    Rat det = 1;
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t p = c;
      while (p < n && a[p][c] == 0) ++p;
      if (p == n) return 0;
      if (p != c) {
        std::swap(a[p], a[c]);
        det = -det;
      }
      det *= a[c][c];
      for (std::size_t r = c + 1; r < n; ++r) {
        Rat f = a[r][c] / a[c][c];
        for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      }
    }
    return det;
  }

  static std::vector<std::vector<Rat>> invert(std::vector<std::vector<Rat>> a) {
    const std::size_t n = a.size();
    std::vector<std::vector<Rat>> inv(n, std::vector<Rat>(n, Rat(0)));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t p = c;
      while (p < n && a[p][c] == 0) ++p;
      if (p == n) throw std::logic_error("singular matrix");
      std::swap(a[p], a[c]);
      std::swap(inv[p], inv[c]);
      Rat d = a[c][c];
      for (std::size_t k = 0; k < n; ++k) {
        a[c][k] /= d;
        inv[c][k] /= d;
      }
      for (std::size_t r = 0; r < n; ++r) {
        if (r == c || a[r][c] == 0) continue;
        Rat f = a[r][c];
        for (std::size_t k = 0; k < n; ++k) {
          a[r][k] -= f * a[c][k];
          inv[r][k] -= f * inv[c][k];
        }
      }
    }
    return inv;
  }

  Family family_;
  int n_ = 0;
  int dim_ = 0;
  std::vector<RatVec> simple_;
  std::vector<RatVec> roots_;
  std::map<RatVec, std::size_t> index_;
  std::vector<std::vector<int>> root_coords_;
  std::vector<int> height_;
  std::vector<std::size_t> positive_;
  std::vector<std::size_t> positive_r2_;
  std::vector<bool> in_r1_, in_r2_;
  std::vector<std::vector<Rat>> gram_;
  std::vector<std::vector<int>> cartan_;
  std::vector<RatVec> fundamental_;
  std::vector<Coweight> coroot_cw_;
  std::vector<std::size_t> simple_index_;
  std::size_t highest_ = 0;
  std::vector<int> marks_;
  std::vector<int> good_types_;
  std::vector<LengthClass> classes_;
  std::vector<int> two_rho_;
  std::vector<Coweight> qbasis_;
  std::vector<std::vector<long long>> qadj_;
  long long qdet_ = 1;
  std::vector<Coweight> pos_coroots_;
};

}  // namespace isowalk
