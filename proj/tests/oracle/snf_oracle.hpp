#pragma once

// Independent Smith-form oracles for tests.  Neither shares code with the
// library: one reduces with naive gcd pivots and no transform tracking, the
// other reads invariant factors off gcds of k x k minors.

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <vector>

namespace oracle {

using Grid = std::vector<std::vector<mpz_class>>;

/// Invariant factors by repeated gcd pivoting; returns the nonzero diagonal.
inline std::vector<mpz_class> naive_invariant_factors(Grid a) {
  const std::size_t m = a.size(), n = m ? a[0].size() : 0;
  std::vector<mpz_class> diag;
  std::size_t t = 0;
  while (t < m && t < n) {
    // any nonzero entry left?
    std::size_t pi = m, pj = n;
    for (std::size_t i = t; i < m && pi == m; ++i)
      for (std::size_t j = t; j < n; ++j)
        if (a[i][j] != 0) { pi = i; pj = j; break; }
    if (pi == m) break;
    std::swap(a[t], a[pi]);
    for (auto& row : a) std::swap(row[t], row[pj]);
    bool dirty = true;
    while (dirty) {
      dirty = false;
      for (std::size_t i = t + 1; i < m; ++i) {
        while (a[i][t] != 0) {
          mpz_class q = a[i][t] / a[t][t];
          for (std::size_t j = t; j < n; ++j) a[i][j] -= q * a[t][j];
          if (a[i][t] != 0) std::swap(a[t], a[i]);
        }
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        while (a[t][j] != 0) {
          mpz_class q = a[t][j] / a[t][t];
          for (std::size_t i = t; i < m; ++i) a[i][j] -= q * a[i][t];
          if (a[t][j] != 0) {
            for (auto& row : a) std::swap(row[t], row[j]);
            dirty = true;
          }
        }
      }
      for (std::size_t i = t + 1; i < m && !dirty; ++i)
        for (std::size_t j = t + 1; j < n; ++j)
          if (a[i][j] % a[t][t] != 0) {
            for (std::size_t c = t; c < n; ++c) a[t][c] += a[i][c];
            dirty = true;
            break;
          }
    }
    diag.push_back(abs(a[t][t]));
    ++t;
  }
  return diag;
}

inline mpz_class det_laplace(const Grid& a) {
  const std::size_t n = a.size();
  if (n == 0) return 1;
  if (n == 1) return a[0][0];
  mpz_class d = 0;
  for (std::size_t c = 0; c < n; ++c) {
    if (a[0][c] == 0) continue;
    Grid minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<mpz_class> row;
      for (std::size_t j = 0; j < n; ++j)
        if (j != c) row.push_back(a[i][j]);
      minor.push_back(row);
    }
    mpz_class term = a[0][c] * det_laplace(minor);
    d += (c % 2 == 0) ? term : mpz_class(-term);
  }
  return d;
}

inline void subsets(std::size_t n, std::size_t k, std::size_t start, std::vector<std::size_t>& cur,
                    std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == k) { out.push_back(cur); return; }
  for (std::size_t i = start; i < n; ++i) {
    cur.push_back(i);
    subsets(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

/// d_k = D_k / D_{k-1} where D_k is the gcd of all k x k minors.
inline std::vector<mpz_class> minors_invariant_factors(const Grid& a) {
  const std::size_t m = a.size(), n = m ? a[0].size() : 0;
  std::vector<mpz_class> out;
  mpz_class prev = 1;
  for (std::size_t k = 1; k <= std::min(m, n); ++k) {
    std::vector<std::vector<std::size_t>> rs, cs;
    std::vector<std::size_t> cur;
    subsets(m, k, 0, cur, rs);
    subsets(n, k, 0, cur, cs);
    mpz_class g = 0;
    for (const auto& r : rs)
      for (const auto& c : cs) {
        Grid sub(k, std::vector<mpz_class>(k));
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) sub[i][j] = a[r[i]][c[j]];
        mpz_class d = det_laplace(sub);
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
      }
    if (g == 0) break;
    out.push_back(g / prev);
    prev = g;
  }
  return out;
}

}  // namespace oracle
