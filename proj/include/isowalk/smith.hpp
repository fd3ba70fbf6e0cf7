#pragma once

#include <cstdint>
#include <cstdlib>
#include <utility>
#include <vector>

namespace isowalk {

using IntMatrix = std::vector<std::vector<long long>>;

// U * A * V = diag(d), U and V unimodular.
struct SmithForm {
  IntMatrix U, V;
  std::vector<long long> diag;
};

namespace detail {

inline IntMatrix identity(std::size_t n) {
  IntMatrix I(n, std::vector<long long>(n, 0));
  for (std::size_t i = 0; i < n; ++i) I[i][i] = 1;
  return I;
}

inline void swap_rows(IntMatrix& M, std::size_t a, std::size_t b) { std::swap(M[a], M[b]); }

inline void swap_cols(IntMatrix& M, std::size_t a, std::size_t b) {
  for (auto& row : M) std::swap(row[a], row[b]);
}

// row a += k * row b
inline void add_row(IntMatrix& M, std::size_t a, std::size_t b, long long k) {
  for (std::size_t j = 0; j < M[a].size(); ++j) M[a][j] += k * M[b][j];
}

inline void add_col(IntMatrix& M, std::size_t a, std::size_t b, long long k) {
  for (auto& row : M) row[a] += k * row[b];
}

}  // namespace detail

// Smith normal form of a rectangular integer matrix (rows x cols).
inline SmithForm smith_normal_form(IntMatrix A) {
  using namespace detail;
  const std::size_t m = A.size();
  const std::size_t n = m ? A[0].size() : 0;
  IntMatrix U = identity(m), V = identity(n);
  const std::size_t r = std::min(m, n);
  for (std::size_t t = 0; t < r; ++t) {
    // pivot: smallest nonzero |entry| in the trailing block
    for (;;) {
      long long best = 0;
      std::size_t pi = t, pj = t;
      for (std::size_t i = t; i < m; ++i)
        for (std::size_t j = t; j < n; ++j)
          if (A[i][j] != 0 && (best == 0 || std::llabs(A[i][j]) < best)) {
            best = std::llabs(A[i][j]);
            pi = i;
            pj = j;
          }
      if (best == 0) break;
      swap_rows(A, t, pi);
      swap_rows(U, t, pi);
      swap_cols(A, t, pj);
      swap_cols(V, t, pj);
      bool clean = true;
      for (std::size_t i = t + 1; i < m; ++i) {
        long long k = A[i][t] / A[t][t];
        add_row(A, i, t, -k);
        add_row(U, i, t, -k);
        if (A[i][t] != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        long long k = A[t][j] / A[t][t];
        add_col(A, j, t, -k);
        add_col(V, j, t, -k);
        if (A[t][j] != 0) clean = false;
      }
      if (!clean) continue;
      // divisibility of the rest of the block
      bool divides = true;
      for (std::size_t i = t + 1; i < m && divides; ++i)
        for (std::size_t j = t + 1; j < n; ++j)
          if (A[i][j] % A[t][t] != 0) {
            add_row(A, t, i, 1);
            add_row(U, t, i, 1);
            divides = false;
            break;
          }
      if (divides) break;
    }
  }
  SmithForm out;
  out.diag.assign(r, 0);
  for (std::size_t t = 0; t < r; ++t) {
    if (A[t][t] < 0) {
      for (auto& x : U[t]) x = -x;
      A[t][t] = -A[t][t];
    }
    out.diag[t] = A[t][t];
  }
  out.U = std::move(U);
  out.V = std::move(V);
  return out;
}

// Nonzero invariant factors, in order.
inline std::vector<long long> invariant_factors(const IntMatrix& A) {
  std::vector<long long> d;
  for (long long x : smith_normal_form(A).diag)
    if (x != 0) d.push_back(x);
  return d;
}

}  // namespace isowalk
