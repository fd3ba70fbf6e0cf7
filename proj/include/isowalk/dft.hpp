#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <numbers>
#include <vector>

#include "isowalk/errors.hpp"
#include "isowalk/root_system.hpp"

namespace isowalk {

using cplx = std::complex<double>;

// Uniform product grid θ_j(k) = 2π (k + o_j) / M on the n-torus.
struct OffsetGrid {
  int n = 0;
  int M = 0;
  std::vector<double> offset;

  std::size_t size() const {
    std::size_t s = 1;
    for (int j = 0; j < n; ++j) s *= static_cast<std::size_t>(M);
    return s;
  }
  double theta(int j, int k) const { return 2.0 * std::numbers::pi * (k + offset[j]) / M; }
  // last axis fastest
  std::vector<double> point(std::size_t flat) const {
    std::vector<double> th(n);
    for (int j = n - 1; j >= 0; --j) {
      th[j] = theta(j, static_cast<int>(flat % M));
      flat /= M;
    }
    return th;
  }
};

inline double distance_to_integer(double x) { return std::abs(x - std::round(x)); }

// How far the grid offset keeps every coroot character away from 1,
// in units of 2π/M: min over coroots v of dist(<v, o>, Z).
inline double offset_clearance(const RootSystem& rs, const std::vector<double>& o) {
  double best = 1.0;
  for (std::size_t a : rs.positive_roots()) {
    const Coweight& v = rs.coroot(a);
    double s = 0;
    for (int j = 0; j < rs.rank(); ++j) s += v[j] * o[j];
    best = std::min(best, distance_to_integer(s));
  }
  return best;
}

// Offsets frac(sqrt(p)) over successive primes; the candidate with the
// largest clearance among the first `tries` is returned.
inline std::vector<double> choose_offsets(const RootSystem& rs, int skip = 0, int tries = 48) {
  const int n = rs.rank();
  std::vector<int> primes;
  for (int p = 2; static_cast<int>(primes.size()) < n * (tries + skip + 1); ++p) {
    bool prime = true;
    for (int d = 2; d * d <= p; ++d)
      if (p % d == 0) {
        prime = false;
        break;
      }
    if (prime) primes.push_back(p);
  }
  std::vector<double> best;
  double best_score = -1;
  for (int t = skip; t < skip + tries; ++t) {
    std::vector<double> o(n);
    for (int j = 0; j < n; ++j) {
      double r = std::sqrt(static_cast<double>(primes[t * n + j]));
      o[j] = r - std::floor(r);
    }
    double score = offset_clearance(rs, o);
    if (score > best_score) {
      best_score = score;
      best = o;
    }
  }
  return best;
}

// Fourier coefficients c(μ) = M^{-n} Σ_k f(θ_k) e^{-i<μ,θ_k>} for μ_j ∈ [lo_j, lo_j + M).
// Result is laid out like the grid (last axis fastest), index m_j ↔ μ_j = lo_j + m_j.
inline std::vector<cplx> forward_dft(const OffsetGrid& g, std::vector<cplx> f, const std::vector<int>& lo) {
  const int n = g.n, M = g.M;
  std::vector<cplx> row(M), out(M);
  std::size_t stride = 1;
  for (int j = n - 1; j >= 0; --j) {
    std::vector<cplx> T(static_cast<std::size_t>(M) * M);
    for (int m = 0; m < M; ++m)
      for (int k = 0; k < M; ++k) T[m * M + k] = std::polar(1.0 / M, -(lo[j] + m) * g.theta(j, k));
    const std::size_t block = stride * M;
    for (std::size_t base = 0; base < f.size(); base += block)
      for (std::size_t s = 0; s < stride; ++s) {
        for (int k = 0; k < M; ++k) row[k] = f[base + s + k * stride];
        for (int m = 0; m < M; ++m) {
          cplx acc = 0;
          const cplx* t = &T[m * M];
          for (int k = 0; k < M; ++k) acc += t[k] * row[k];
          out[m] = acc;
        }
        for (int m = 0; m < M; ++m) f[base + s + m * stride] = out[m];
      }
    stride = block;
  }
  return f;
}

// Coweight of a flat DFT index.
inline Coweight dft_index_to_coweight(const OffsetGrid& g, std::size_t flat, const std::vector<int>& lo) {
  Coweight mu(g.n);
  for (int j = g.n - 1; j >= 0; --j) {
    mu[j] = lo[j] + static_cast<int>(flat % g.M);
    flat /= g.M;
  }
  return mu;
}

}  // namespace isowalk
