#include "frtk/linalg.hpp"

#include <cmath>

#include "frtk/errors.hpp"

namespace frtk {

EigResult sym_eig(const SymMatrixF& M, double eig_tol) {
  (void)eig_tol;  // accuracy contract; see header
  if (!M.m.allFinite()) throw NonFinite("matrix has NaN or infinite entries");
  if (M.m.rows() != M.m.cols()) throw DimensionMismatch("matrix not square");
  const int n = M.order();
  EigResult out;
  if (n == 0) {
    out.values.resize(0);
    out.vectors.resize(0, 0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M.m);
  if (es.info() != Eigen::Success)
    throw InternalError("eigensolver failed to converge");
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int k = 0; k < n; ++k) {  // Eigen sorts ascending; flip to descending
    out.values[k] = es.eigenvalues()[n - 1 - k];
    out.vectors.col(k) = es.eigenvectors().col(n - 1 - k);
  }
  return out;
}

std::pair<bool, int> psd_rank(const SymMatrixF& M, double rank_tol) {
  EigResult eig = sym_eig(M);
  const int n = M.order();
  double amax = 0;
  for (int k = 0; k < n; ++k) amax = std::max(amax, std::abs(eig.values[k]));
  const double thresh = rank_tol * std::max(1.0, amax);
  bool psd = true;
  int rank = 0;
  for (int k = 0; k < n; ++k) {
    if (eig.values[k] < -thresh) psd = false;
    if (eig.values[k] > thresh) ++rank;
  }
  return {psd, rank};
}

}  // namespace frtk
