#pragma once

// Instance builders shared by the unit, property, and acceptance suites.

#include <random>
#include <utility>
#include <vector>

#include "frtk/lp_fr.hpp"
#include "frtk/rational.hpp"

namespace fixtures {

// Incidence system of a 0/1 matrix: one nonnegative variable per one of M,
// one homogeneous constraint per row and per column of M (zero rows and
// columns contribute zero constraint rows, kept for index stability).
inline frtk::LinearSet incidence_lp(const std::vector<std::vector<int>>& M) {
  const int p = static_cast<int>(M.size());
  const int q = static_cast<int>(M[0].size());
  std::vector<std::pair<int, int>> cells;
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < q; ++j)
      if (M[i][j]) cells.emplace_back(i, j);
  frtk::LinearSet L;
  L.A = frtk::RatMatrix(p + q, static_cast<int>(cells.size()));
  L.b.assign(p + q, frtk::Rational(0));
  for (int e = 0; e < static_cast<int>(cells.size()); ++e) {
    L.A.at(cells[e].first, e) = 1;
    L.A.at(p + cells[e].second, e) = 1;
  }
  return L;
}

inline std::vector<std::vector<int>> all_ones_matrix(int p, int q) {
  return std::vector<std::vector<int>>(p, std::vector<int>(q, 1));
}

// Columns duplicated dup times each, in the given order.
inline std::vector<std::vector<int>> duplicated_matrix(
    const std::vector<std::vector<int>>& columns, int dup) {
  const int p = static_cast<int>(columns[0].size());
  std::vector<std::vector<int>> M(p);
  for (const auto& col : columns)
    for (int k = 0; k < dup; ++k)
      for (int i = 0; i < p; ++i) M[i].push_back(col[i]);
  return M;
}

// The two-row worked example M = [[1,0,1],[1,1,0]]; its cells in row-major
// order are (1,1),(1,3),(2,1),(2,2).
inline frtk::LinearSet two_by_three_example() {
  return incidence_lp({{1, 0, 1}, {1, 1, 0}});
}

// Random feasible instance: integer entries in [-2, 2], b = A x0 for a
// random nonnegative integer point x0.
inline frtk::LinearSet random_feasible(std::mt19937_64& rng, int max_n = 8,
                                       int max_m = 4) {
  std::uniform_int_distribution<int> dn(1, max_n), dm(1, max_m), dv(-2, 2),
      dx(0, 2);
  const int n = dn(rng), m = dm(rng);
  frtk::LinearSet L;
  L.A = frtk::RatMatrix(m, n);
  L.b.assign(m, frtk::Rational(0));
  frtk::RatVec x0(n);
  for (int i = 0; i < n; ++i) x0[i] = dx(rng);
  for (int r = 0; r < m; ++r) {
    frtk::Rational acc(0);
    for (int c = 0; c < n; ++c) {
      L.A.at(r, c) = dv(rng);
      acc += L.A.at(r, c) * x0[c];
    }
    L.b[r] = acc;
  }
  return L;
}

// {x >= 0 : x1 - x2 = 0} has the strictly positive point (1, 1).
inline frtk::LinearSet slater_instance() {
  frtk::LinearSet L;
  L.A = frtk::RatMatrix(1, 2);
  L.A.at(0, 0) = 1;
  L.A.at(0, 1) = -1;
  L.b.assign(1, frtk::Rational(0));
  return L;
}

// {x >= 0 : x1 + x2 = 0} = {0}; the only exposing direction is (1, 1).
inline frtk::LinearSet sum_zero_instance() {
  frtk::LinearSet L;
  L.A = frtk::RatMatrix(1, 2);
  L.A.at(0, 0) = 1;
  L.A.at(0, 1) = 1;
  L.b.assign(1, frtk::Rational(0));
  return L;
}

}  // namespace fixtures
