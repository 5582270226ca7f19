#pragma once

#include <Eigen/Dense>
#include <utility>

namespace frtk {

inline constexpr double kDefaultEigTol = 1e-10;
inline constexpr double kDefaultRankTol = 1e-8;

// Dense symmetric matrix in binary64. set() writes both triangles, so the
// wrapped matrix is symmetric by construction.
struct SymMatrixF {
  Eigen::MatrixXd m;

  SymMatrixF() = default;
  explicit SymMatrixF(int n) : m(Eigen::MatrixXd::Zero(n, n)) {}
  explicit SymMatrixF(Eigen::MatrixXd mat) : m(std::move(mat)) {}

  int order() const { return static_cast<int>(m.rows()); }
  void set(int i, int j, double v) {
    m(i, j) = v;
    m(j, i) = v;
  }
  void add(int i, int j, double v) {
    m(i, j) += v;
    if (i != j) m(j, i) += v;
  }
};

struct EigResult {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // column k pairs with values[k]
};

// Symmetric eigendecomposition (tridiagonalization + implicit QL/QR via
// Eigen). eig_tol documents the accuracy contract checked by the test suite:
// ||Q diag(values) Q^T - M||_F <= eig_tol * max(1, ||M||_F) and
// ||Q^T Q - I||_F <= eig_tol * order. Throws NonFinite on NaN/inf entries.
EigResult sym_eig(const SymMatrixF& M, double eig_tol = kDefaultEigTol);

// (is_psd, rank) under the relative threshold t = rank_tol * max(1, max |eig|):
// psd iff every eigenvalue >= -t; rank counts eigenvalues > t.
std::pair<bool, int> psd_rank(const SymMatrixF& M,
                              double rank_tol = kDefaultRankTol);

}  // namespace frtk
