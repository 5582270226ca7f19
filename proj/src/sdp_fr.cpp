#include "frtk/sdp_fr.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "frtk/errors.hpp"
#include "frtk/rational.hpp"

namespace frtk {
namespace {

bool finite(const Eigen::MatrixXd& M) { return M.allFinite(); }

double dot_b(const SdpProblem& P, const Eigen::VectorXd& y) {
  double s = 0.0;
  for (int i = 0; i < P.m(); ++i) s += P.b[i] * y(i);
  return s;
}

// Modified Gram-Schmidt with one re-orthogonalization pass; drops columns
// that vanish (callers pass full-rank inputs, the drop is a safety net).
Eigen::MatrixXd orthonormalize(Eigen::MatrixXd M) {
  const double kDrop = 1e-12;
  int kept = 0;
  for (int c = 0; c < M.cols(); ++c) {
    Eigen::VectorXd v = M.col(c);
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < kept; ++j) v -= M.col(j).dot(v) * M.col(j);
    double nrm = v.norm();
    if (nrm <= kDrop) continue;
    M.col(kept) = v / nrm;
    ++kept;
  }
  return M.leftCols(kept);
}

void check_dims(const SdpProblem& P, const SdpFace& F,
                const SdpExposingVector& E) {
  if (F.n() != P.n) throw DimensionMismatch("face order does not match the problem");
  if (E.W.order() != P.n) throw DimensionMismatch("W order does not match the problem");
  if (static_cast<int>(E.y.size()) != P.m())
    throw DimensionMismatch("y length does not match the constraint count");
}

// Materialization invariant of SdpExposingVector: W must equal sum A_i y_i.
void check_materialized(const SdpProblem& P, const SdpExposingVector& E) {
  SymMatrixF S = assemble_w(P, E.y);
  double scale = std::max(1.0, E.W.m.norm());
  if ((S.m - E.W.m).norm() > 1e-8 * scale)
    throw InvalidCertificate("W does not equal sum_i A_i y_i");
}

// W restricted to the face: V^T W V, or a plain submatrix on block faces.
Eigen::MatrixXd face_matrix(const SdpFace& F, const Eigen::MatrixXd& W) {
  if (F.block_support) {
    const auto& S = *F.block_support;
    const int k = static_cast<int>(S.size());
    Eigen::MatrixXd M(k, k);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) M(a, b) = W(S[a], S[b]);
    return M;
  }
  return F.V.transpose() * W * F.V;
}

bool exactly_diagonal(const Eigen::MatrixXd& M) {
  for (int a = 0; a < M.rows(); ++a)
    for (int b = a + 1; b < M.cols(); ++b)
      if (M(a, b) != 0.0 || M(b, a) != 0.0) return false;
  return true;
}

// psd/rank of a symmetric matrix, skipping the eigensolve when the matrix
// is exactly diagonal (the diagonal entries are the eigenvalues). Thresholds
// match psd_rank: t = tol * max(1, max |eig|).
std::pair<bool, int> psd_rank_fast(const Eigen::MatrixXd& M, double tol) {
  if (exactly_diagonal(M)) {
    double amax = 0.0;
    for (int i = 0; i < M.rows(); ++i) amax = std::max(amax, std::abs(M(i, i)));
    double thr = tol * std::max(1.0, amax);
    bool psd = true;
    int rank = 0;
    for (int i = 0; i < M.rows(); ++i) {
      if (M(i, i) < -thr) psd = false;
      if (M(i, i) > thr) ++rank;
    }
    return {psd, rank};
  }
  return psd_rank(SymMatrixF(M), tol);
}

}  // namespace

void SparseSym::add(int i, int j, double v) {
  if (i < 0 || j < 0) throw InvalidArgument("matrix index must be nonnegative");
  if (i > j) std::swap(i, j);
  entries.push_back({i, j, v});
}

SymMatrixF SparseSym::dense() const {
  SymMatrixF M(n);
  for (const auto& e : entries) M.add(e.r, e.c, e.v);
  return M;
}

SparseSym SparseSym::from_dense(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) throw DimensionMismatch("matrix is not square");
  if ((M - M.transpose()).norm() > 0)
    throw MalformedTask("matrix is not symmetric");
  SparseSym out(static_cast<int>(M.rows()));
  for (int i = 0; i < M.rows(); ++i)
    for (int j = i; j < M.cols(); ++j)
      if (M(i, j) != 0.0) out.add(i, j, M(i, j));
  return out;
}

SymMatrixF assemble_w(const SdpProblem& P, const Eigen::VectorXd& y) {
  if (static_cast<int>(y.size()) != P.m())
    throw DimensionMismatch("y length does not match the constraint count");
  SymMatrixF W(P.n);
  for (int i = 0; i < P.m(); ++i)
    for (const auto& e : P.mats[i].entries) W.add(e.r, e.c, y(i) * e.v);
  return W;
}

void SdpProblem::validate() const {
  if (n < 0) throw MalformedTask("matrix order must be nonnegative");
  if (mats.empty()) throw MalformedTask("at least one constraint matrix is required");
  if (b.size() != mats.size())
    throw DimensionMismatch("b length does not match the constraint count");
  for (const auto& A : mats) {
    if (A.order() != n) throw DimensionMismatch("constraint matrix order mismatch");
    for (const auto& e : A.entries) {
      if (e.r < 0 || e.c >= n || e.r > e.c)
        throw MalformedTask("constraint matrix entry out of range");
      if (!std::isfinite(e.v))
        throw NonFinite("constraint matrix has a non-finite entry");
    }
  }
  for (double v : b)
    if (!std::isfinite(v)) throw NonFinite("b has a non-finite entry");
  if (!labels.empty() && static_cast<int>(labels.size()) != n)
    throw DimensionMismatch("labels must name every row/column index");
}

SdpFace SdpFace::full(int n) {
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  return from_support(n, std::move(all));
}

SdpFace SdpFace::from_support(int n, std::vector<int> support) {
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  for (int s : support)
    if (s < 0 || s >= n) throw InvalidArgument("support index out of range");
  SdpFace F;
  F.V = Eigen::MatrixXd::Zero(n, static_cast<int>(support.size()));
  for (size_t c = 0; c < support.size(); ++c) F.V(support[c], c) = 1.0;
  F.block_support = std::move(support);
  return F;
}

void SdpFace::validate(double eig_tol) const {
  if (!finite(V)) throw NonFinite("face basis has a non-finite entry");
  if (k() > n()) throw DimensionMismatch("face dimension exceeds the order");
  Eigen::MatrixXd G = V.transpose() * V;
  G -= Eigen::MatrixXd::Identity(k(), k());
  if (G.norm() > eig_tol)
    throw InvalidCertificate("face basis is not column-orthonormal");
  if (block_support) {
    if (static_cast<int>(block_support->size()) != k())
      throw InvalidCertificate("block support size disagrees with the dimension");
    std::vector<char> in(n(), 0);
    for (int s : *block_support) {
      if (s < 0 || s >= n()) throw InvalidArgument("support index out of range");
      in[s] = 1;
    }
    for (int r = 0; r < n(); ++r)
      if (!in[r] && V.row(r).norm() > eig_tol)
        throw InvalidCertificate("basis has mass outside the block support");
  }
}

ExposingStatus check_exposing_sdp(const SdpProblem& P, const SdpFace& F,
                                  const SdpExposingVector& E, double tol) {
  P.validate();
  check_dims(P, F, E);
  check_materialized(P, E);
  Eigen::MatrixXd M = face_matrix(F, E.W.m);
  auto [psd, rank] = psd_rank_fast(M, tol);
  if (psd && rank == 0) return ExposingStatus::InPerp;
  if (!psd) return ExposingStatus::NotPsdOnFace;
  if (std::abs(dot_b(P, E.y)) > tol) return ExposingStatus::NotInLperp;
  return ExposingStatus::Valid;
}

SdpFace apply_fr_step(const SdpFace& F, const SdpExposingVector& E,
                      double tol) {
  if (E.W.order() != F.n())
    throw DimensionMismatch("W order does not match the face");
  Eigen::MatrixXd M = face_matrix(F, E.W.m);
  auto [psd, rank] = psd_rank_fast(M, tol);
  if (!psd) throw PreconditionFailed("exposing vector is not psd on the face");
  if (rank == 0) throw PreconditionFailed("exposing vector vanishes on the face");

  // Exactly diagonal on a block face: the cut keeps the zero-diagonal
  // indices, so the result is a block face again.
  if (F.block_support && exactly_diagonal(M)) {
    const auto& S = *F.block_support;
    double dmax = 0.0;
    for (int a = 0; a < M.rows(); ++a) dmax = std::max(dmax, std::abs(M(a, a)));
    double thr = tol * std::max(1.0, dmax);
    std::vector<int> keep;
    for (int a = 0; a < M.rows(); ++a)
      if (std::abs(M(a, a)) <= thr) keep.push_back(S[a]);
    return SdpFace::from_support(F.n(), std::move(keep));
  }

  EigResult eig = sym_eig(SymMatrixF(M));
  double lmax = eig.values.size() ? eig.values(0) : 0.0;
  double thr = tol * std::max(1.0, lmax);
  int nullity = 0;
  for (int i = 0; i < eig.values.size(); ++i)
    if (eig.values(i) <= thr) ++nullity;
  SdpFace out;
  // Null eigenvalues sit at the tail of the descending spectrum.
  out.V = orthonormalize(F.V * eig.vectors.rightCols(nullity));

  // If the basis is axis-aligned within tolerance, the face is a coordinate
  // block; store it exactly. Computed bases drift by rounding error, and a
  // later search on a drifted face can admit spurious directions whose norm
  // is the reciprocal of the drift.
  const double kBlockSnap = 1e-7;
  std::vector<int> S;
  for (int r = 0; r < out.V.rows(); ++r)
    if (out.V.row(r).norm() > kBlockSnap) S.push_back(r);
  if (static_cast<int>(S.size()) == static_cast<int>(out.V.cols()))
    return SdpFace::from_support(F.n(), std::move(S));
  return out;
}

SdpVerifyReport verify_sequence_sdp(const SdpProblem& P,
                                    const FRSequenceSDP& seq, double tol) {
  P.validate();
  SdpVerifyReport rep;
  rep.length = static_cast<int>(seq.steps.size());
  rep.diagnoses.assign(seq.steps.size(), "");
  rep.valid = true;

  const double kFaceMatch = 1e-6;
  SdpFace cur = seq.faces.empty() ? SdpFace::full(P.n) : seq.faces.front();
  cur.validate(1e-8);
  if (!seq.faces.empty() && seq.faces.size() != seq.steps.size() + 1) {
    rep.valid = false;
    if (!rep.diagnoses.empty())
      rep.diagnoses.back() = "face chain length disagrees with the step count";
  }

  for (size_t i = 0; i < seq.steps.size(); ++i) {
    ExposingStatus st;
    try {
      st = check_exposing_sdp(P, cur, seq.steps[i], tol);
    } catch (const InvalidCertificate& e) {
      rep.valid = false;
      rep.diagnoses[i] = e.what();
      break;
    }
    if (st != ExposingStatus::Valid) {
      rep.valid = false;
      rep.diagnoses[i] =
          st == ExposingStatus::InPerp ? "step vanishes on the face"
          : st == ExposingStatus::NotPsdOnFace
              ? "step is not psd on the face"
              : "b^T y does not vanish";
      break;
    }
    Eigen::MatrixXd M = face_matrix(cur, seq.steps[i].W.m);
    int drop = psd_rank_fast(M, tol).second;
    rep.rank_drops.push_back(drop);
    rep.minimal_certified.push_back(drop == 1);
    cur = apply_fr_step(cur, seq.steps[i], tol);
    if (i + 1 < seq.faces.size()) {
      const SdpFace& given = seq.faces[i + 1];
      bool match = given.k() == cur.k();
      if (match && given.block_support && cur.block_support) {
        match = *given.block_support == *cur.block_support;
      } else if (match) {
        // |P1 - P2|_F^2 = k1 + k2 - 2 |V1^T V2|_F^2 for projectors.
        double cross = (given.V.transpose() * cur.V).squaredNorm();
        double d2 = given.k() + cur.k() - 2.0 * cross;
        double lim = kFaceMatch * std::max(1, cur.k());
        match = std::sqrt(std::max(0.0, d2)) <= lim;
      }
      if (!match) {
        rep.valid = false;
        rep.diagnoses[i] = "stored face disagrees with the recomputed face";
      }
    }
  }
  rep.final_face = cur;
  return rep;
}

std::optional<LowrankSolution> lowrank_exposing_search(
    const SdpProblem& P, const SdpFace& F, int r, unsigned seed, int max_iter,
    double res_tol) {
  P.validate();
  F.validate(1e-8);
  if (F.n() != P.n) throw DimensionMismatch("face order does not match the problem");
  const int k = F.k();
  if (r < 1 || r > k) throw InvalidArgument("factor rank must satisfy 1 <= r <= k");

  const int m = P.m();
  std::vector<Eigen::MatrixXd> B(m);
  Eigen::VectorXd t(m), bv(m);
  for (int i = 0; i < m; ++i) {
    Eigen::MatrixXd Bi = Eigen::MatrixXd::Zero(k, k);
    for (const auto& e : P.mats[i].entries) {
      Bi += e.v * (F.V.row(e.r).transpose() * F.V.row(e.c));
      if (e.r != e.c) Bi += e.v * (F.V.row(e.c).transpose() * F.V.row(e.r));
    }
    B[i] = std::move(Bi);
    t(i) = B[i].trace();
    bv(i) = P.b[i];
  }

  const int pairs = k * (k + 1) / 2;
  const int rows = pairs + 2;
  const int cols = m + k * r;
  const double sq2 = std::sqrt(2.0);

  auto residual = [&](const Eigen::VectorXd& y, const Eigen::MatrixXd& U,
                      Eigen::VectorXd& res) {
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < m; ++i) S += y(i) * B[i];
    S -= U * U.transpose();
    int row = 0;
    for (int a = 0; a < k; ++a)
      for (int b = a; b < k; ++b) res(row++) = (a == b ? 1.0 : sq2) * S(a, b);
    double tr = t.dot(y);
    res(row++) = tr - 1.0;
    res(row++) = bv.dot(y);
  };

  auto jacobian = [&](const Eigen::MatrixXd& U, Eigen::MatrixXd& J) {
    J.setZero();
    int row = 0;
    for (int a = 0; a < k; ++a)
      for (int b = a; b < k; ++b) {
        double w = (a == b) ? 1.0 : sq2;
        for (int i = 0; i < m; ++i) J(row, i) = w * B[i](a, b);
        for (int s = 0; s < r; ++s) {
          // d(-U U^T)_{ab} = -(dU_{a s} U_{b s} + U_{a s} dU_{b s})
          J(row, m + a * r + s) -= w * U(b, s);
          J(row, m + b * r + s) -= w * U(a, s);
        }
        ++row;
      }
    for (int i = 0; i < m; ++i) J(row, i) = t(i);
    ++row;
    for (int i = 0; i < m; ++i) J(row, i) = bv(i);
  };

  // Least-norm start satisfying the two linear rows: [t^T; b^T] y = (1, 0).
  Eigen::MatrixXd C(2, m);
  C.row(0) = t.transpose();
  C.row(1) = bv.transpose();
  Eigen::Vector2d rhs(1.0, 0.0);
  Eigen::VectorXd y0 = C.completeOrthogonalDecomposition().solve(rhs);

  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double scale = 1.0 / std::sqrt(static_cast<double>(k) * r);

  Eigen::VectorXd y, res(rows), trial_res(rows);
  Eigen::MatrixXd U(k, r), J(rows, cols);
  int iters_used = 0;

  // The residual is nonconvex in U; a run can settle at a stationary point
  // that is not a solution. Restart from a fresh factor (same seeded stream)
  // until the iteration budget runs out.
  for (int attempt = 0; iters_used < max_iter && attempt < max_iter;
       ++attempt) {
    y = y0;
    for (int a = 0; a < k; ++a)
      for (int s = 0; s < r; ++s) U(a, s) = gauss(rng) * scale;
    residual(y, U, res);
    double fnorm = res.norm();
    double lambda = 1e-3;
    bool stalled = false;

    while (iters_used < max_iter && fnorm > res_tol && !stalled) {
      ++iters_used;
      jacobian(U, J);
      Eigen::MatrixXd H = J.transpose() * J;
      Eigen::VectorXd g = J.transpose() * res;
      bool accepted = false;
      while (!accepted) {
        Eigen::MatrixXd Hl = H;
        Hl.diagonal().array() += lambda;
        Eigen::VectorXd delta = Hl.ldlt().solve(-g);
        if (!delta.allFinite()) break;
        Eigen::VectorXd y2 = y + delta.head(m);
        Eigen::MatrixXd U2 = U;
        for (int a = 0; a < k; ++a)
          for (int s = 0; s < r; ++s) U2(a, s) += delta(m + a * r + s);
        residual(y2, U2, trial_res);
        double f2 = trial_res.norm();
        if (f2 < fnorm) {
          y = y2;
          U = U2;
          res = trial_res;
          fnorm = f2;
          lambda = std::max(lambda / 10.0, 1e-12);
          accepted = true;
        } else {
          lambda *= 10.0;
          if (lambda > 1e12) break;
        }
      }
      if (!accepted) stalled = true;
    }

    if (fnorm <= res_tol) {
      SdpExposingVector E;
      E.y = y;
      E.W = assemble_w(P, y);
      if (check_exposing_sdp(P, F, E) != ExposingStatus::Valid) continue;
      LowrankSolution sol;
      sol.y = std::move(y);
      sol.U = std::move(U);
      sol.residual = fnorm;
      sol.iterations = iters_used;
      return sol;
    }
  }
  return std::nullopt;
}

FraLowrankResult fra_lowrank(const SdpProblem& P,
                             const std::vector<int>& r_schedule, int seeds,
                             double res_tol, int max_iter, unsigned seed_base) {
  P.validate();
  if (seeds < 1) throw InvalidArgument("at least one seed is required");
  std::vector<int> schedule = r_schedule;
  std::sort(schedule.begin(), schedule.end());

  FraLowrankResult out;
  SdpFace cur = SdpFace::full(P.n);
  out.seq.faces.push_back(cur);
  for (;;) {
    if (cur.k() == 0) {
      out.termination = FraTermination::ZeroFace;
      return out;
    }
    bool advanced = false;
    for (int r : schedule) {
      if (r < 1 || r > cur.k()) continue;
      for (int s = 0; s < seeds && !advanced; ++s) {
        auto sol = lowrank_exposing_search(P, cur, r, seed_base + s, max_iter,
                                           res_tol);
        if (!sol) continue;
        SdpExposingVector E;
        E.y = sol->y;
        E.W = assemble_w(P, sol->y);
        SdpFace next = apply_fr_step(cur, E);
        out.seq.steps.push_back(std::move(E));
        out.seq.faces.push_back(next);
        out.residuals.push_back(sol->residual);
        out.ranks.push_back(r);
        out.seeds_used.push_back(seed_base + s);
        cur = std::move(next);
        advanced = true;
      }
      if (advanced) break;
    }
    if (!advanced) {
      out.termination = FraTermination::SearchExhausted;
      return out;
    }
  }
}

SdpProblem simplify_blockdiag(const SdpProblem& P, const SdpFace& F) {
  P.validate();
  if (!F.block_support)
    throw PreconditionFailed("face carries no block support");
  if (F.n() != P.n) throw DimensionMismatch("face order does not match the problem");
  const auto& S = *F.block_support;
  std::vector<int> pos(P.n, -1);
  for (size_t c = 0; c < S.size(); ++c) pos[S[c]] = static_cast<int>(c);
  SdpProblem out;
  out.n = static_cast<int>(S.size());
  out.b = P.b;
  out.mats.reserve(P.mats.size());
  for (const auto& A : P.mats) {
    SparseSym M(out.n);
    for (const auto& e : A.entries)
      if (pos[e.r] >= 0 && pos[e.c] >= 0) M.add(pos[e.r], pos[e.c], e.v);
    out.mats.push_back(std::move(M));
  }
  if (!P.labels.empty()) {
    out.labels.reserve(S.size());
    for (int s : S) out.labels.push_back(P.labels[s]);
  }
  return out;
}

std::optional<LinearSet> sdp_to_lp_if_diagonal(const SdpProblem& P,
                                               double off_tol,
                                               double snap_tol) {
  P.validate();
  for (const auto& A : P.mats)
    for (const auto& e : A.entries)
      if (e.r != e.c && std::abs(e.v) > off_tol) return std::nullopt;

  auto exact = [&](double v) {
    double nearest = std::round(v);
    if (std::abs(v - nearest) <= snap_tol)
      return Rational(static_cast<long>(nearest));
    return rat_from_double(v);
  };

  // Per-matrix diagonals; duplicate triplet coordinates accumulate.
  std::vector<std::vector<Rational>> diag(P.m(),
                                          std::vector<Rational>(P.n));
  for (int i = 0; i < P.m(); ++i) {
    std::vector<double> d(P.n, 0.0);
    for (const auto& e : P.mats[i].entries)
      if (e.r == e.c) d[e.r] += e.v;
    for (int j = 0; j < P.n; ++j) diag[i][j] = exact(d[j]);
  }

  std::vector<char> used(P.n, 0);
  for (int i = 0; i < P.m(); ++i)
    for (int j = 0; j < P.n; ++j)
      if (sgn(diag[i][j]) != 0) used[j] = 1;
  std::vector<int> keep;
  for (int j = 0; j < P.n; ++j)
    if (used[j]) keep.push_back(j);

  LinearSet L;
  L.A = RatMatrix(P.m(), static_cast<int>(keep.size()));
  L.b.reserve(P.m());
  for (int i = 0; i < P.m(); ++i) {
    for (size_t c = 0; c < keep.size(); ++c)
      L.A.at(i, static_cast<int>(c)) = diag[i][keep[c]];
    L.b.push_back(exact(P.b[i]));
  }
  return L;
}

SdpProblem worst_case_instance(int n) {
  if (n < 2) throw BadOrder("chain instance needs order at least 2");
  SdpProblem P;
  P.n = n;
  P.b.assign(n, 0.0);
  P.b[0] = 1.0;
  SparseSym A1(n), A2(n);
  A1.add(0, 0, 1.0);
  A2.add(1, 1, 1.0);
  P.mats.push_back(std::move(A1));
  P.mats.push_back(std::move(A2));
  for (int kk = 2; kk <= n - 1; ++kk) {
    // <A, X> = X_{k+1,k+1} - X_{1,k} in 1-based indexing.
    SparseSym A(n);
    A.add(kk, kk, 1.0);
    A.add(0, kk - 1, -0.5);
    P.mats.push_back(std::move(A));
  }
  return P;
}

ExposingRank rank_of_exposing(const SdpProblem& P, const Eigen::VectorXd& y,
                              double rank_tol) {
  P.validate();
  if (static_cast<int>(y.size()) != P.m())
    throw DimensionMismatch("y length does not match the constraint count");
  SymMatrixF W = assemble_w(P, y);
  auto [psd, rank] = psd_rank(W, rank_tol);
  ExposingRank out;
  out.rank = rank;
  out.is_exposing = psd && rank >= 1 && std::abs(dot_b(P, y)) <= rank_tol;
  return out;
}

}  // namespace frtk
