#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "frtk/linalg.hpp"
#include "frtk/lp_fr.hpp"

namespace frtk {

// Symmetric matrix stored as upper-triangle triplets. Duplicate coordinates
// accumulate, as in the usual triplet conventions. Reduction instances have
// thousands of rows but only a handful of nonzeros per matrix, so the
// constraint data must not be materialized densely.
struct SparseSym {
  struct Entry {
    int r, c;  // r <= c
    double v;
  };
  int n = 0;
  std::vector<Entry> entries;

  SparseSym() = default;
  explicit SparseSym(int order) : n(order) {}

  int order() const { return n; }
  void add(int i, int j, double v);
  SymMatrixF dense() const;
  static SparseSym from_dense(const Eigen::MatrixXd& M);
};

// Affine constraint data <A_i, X> = b_i over symmetric n x n matrices.
// labels optionally names each row/column index with an (i, j, k) triple;
// reduction instances use it to expose their index universe.
struct SdpProblem {
  int n = 0;
  std::vector<SparseSym> mats;
  std::vector<double> b;
  std::vector<std::array<int, 3>> labels;  // empty, or one triple per index

  int m() const { return static_cast<int>(mats.size()); }
  void validate() const;
};

// W = sum_i A_i y_i, densely materialized.
SymMatrixF assemble_w(const SdpProblem& P, const Eigen::VectorXd& y);

// Face of the PSD cone: F = { V R V^T : R psd of order k } for a
// column-orthonormal V. When the face is axis-aligned it also carries
// block_support S, meaning F = { X psd : X(N\S, N\S) = 0 } and the
// columns of V are the unit vectors e_s, s in S.
struct SdpFace {
  Eigen::MatrixXd V;  // n x k, column-orthonormal
  std::optional<std::vector<int>> block_support;  // 0-based, sorted

  int n() const { return static_cast<int>(V.rows()); }
  int k() const { return static_cast<int>(V.cols()); }

  static SdpFace full(int n);
  static SdpFace from_support(int n, std::vector<int> support);
  void validate(double eig_tol = kDefaultEigTol) const;
};

struct SdpExposingVector {
  Eigen::VectorXd y;   // length m
  SymMatrixF W;        // = sum_i A_i y_i, materialized
};

enum class ExposingStatus { Valid, InPerp, NotPsdOnFace, NotInLperp };

struct FRSequenceSDP {
  std::vector<SdpExposingVector> steps;
  std::vector<SdpFace> faces;  // size steps()+1 when populated
};

struct SdpVerifyReport {
  bool valid = false;
  int length = 0;
  std::vector<int> rank_drops;          // rank of V^T W V per verified step
  std::vector<bool> minimal_certified;  // true iff the rank drop is 1
  SdpFace final_face;
  std::vector<std::string> diagnoses;   // one per step, "" when clean
};

// Classifies E against the face F: Valid iff V^T W V is psd and nonzero and
// b^T y vanishes within tol. InPerp when V^T W V is numerically zero (the
// step would not cut the face). Throws InvalidCertificate when W disagrees
// with sum_i A_i y_i, DimensionMismatch on shape errors.
ExposingStatus check_exposing_sdp(const SdpProblem& P, const SdpFace& F,
                                  const SdpExposingVector& E,
                                  double tol = kDefaultRankTol);

// F cap W^perp: new basis V*N with N spanning the numerical null space of
// V^T W V (eigenvalues <= tol * max(1, lambda_max)). block_support survives
// when W is diagonal on the support; its zero diagonal entries remain.
// Throws PreconditionFailed unless V^T W V is psd and nonzero.
SdpFace apply_fr_step(const SdpFace& F, const SdpExposingVector& E,
                      double tol = kDefaultRankTol);

// Recomputes the face chain from seq.faces[0] (the full cone when faces is
// empty), classifies every step, and compares any provided faces against the
// recomputed ones. minimal_certified[i] is a sufficient certificate only:
// a rank drop of 1 cannot be enlarged, larger drops stay undecided.
SdpVerifyReport verify_sequence_sdp(const SdpProblem& P,
                                    const FRSequenceSDP& seq,
                                    double tol = kDefaultRankTol);

struct LowrankSolution {
  Eigen::VectorXd y;   // length m
  Eigen::MatrixXd U;   // k x r factor of V^T W V
  double residual = 0.0;
  int iterations = 0;
};

// Damped Gauss-Newton search for (y, U) with
//   sum_i (V^T A_i V) y_i = U U^T,  tr(sum_i V^T A_i V y_i) = 1,  b^T y = 0.
// Deterministic in seed; returns nullopt when the residual fails to reach
// res_tol within max_iter accepted steps or the result does not verify.
std::optional<LowrankSolution> lowrank_exposing_search(
    const SdpProblem& P, const SdpFace& F, int r, unsigned seed,
    int max_iter = 500, double res_tol = 1e-8);

enum class FraTermination {
  ZeroFace,         // chain reached k = 0
  SearchExhausted,  // every (rank, seed) pair failed at the current face
};

struct FraLowrankResult {
  FRSequenceSDP seq;
  FraTermination termination = FraTermination::SearchExhausted;
  std::vector<double> residuals;    // search residual of each accepted step
  std::vector<int> ranks;           // factor rank each step was found at
  std::vector<unsigned> seeds_used; // seed that produced each step
};

// Greedy facial reduction: at each face tries the ranks of r_schedule in
// ascending order, each with seeds starts (seed_base, seed_base+1, ...);
// the first success advances the chain. A heuristic: exhaustion does not
// certify that no exposing vector exists.
FraLowrankResult fra_lowrank(const SdpProblem& P,
                             const std::vector<int>& r_schedule, int seeds,
                             double res_tol = 1e-8, int max_iter = 500,
                             unsigned seed_base = 0);

// Restricts every A_i to the principal submatrix on F's block_support.
// Throws PreconditionFailed when F carries no block_support.
SdpProblem simplify_blockdiag(const SdpProblem& P, const SdpFace& F);

// When every A_i is diagonal (off-diagonal magnitudes <= off_tol), returns
// the linear system over the diagonal: rows diag(A_i), exact dyadic
// float->rational conversion with values within snap_tol of an integer
// snapped to it, and coordinates on which every row vanishes dropped.
std::optional<LinearSet> sdp_to_lp_if_diagonal(const SdpProblem& P,
                                               double off_tol = 1e-10,
                                               double snap_tol = 1e-9);

// The n-variable chain instance X_11 = 1, X_22 = 0,
// X_{k+1,k+1} = X_{1,k} (k = 2..n-1): SD = MSD = n-1, and rank-1 exposing
// vectors exist at every step. Throws BadOrder for n < 2.
SdpProblem worst_case_instance(int n);

struct ExposingRank {
  bool is_exposing = false;
  int rank = 0;
};

// Forms W = sum_i A_i y_i and reports whether it exposes a face of the
// feasible set at the full cone (W psd, W != 0, b^T y = 0) plus its rank.
ExposingRank rank_of_exposing(const SdpProblem& P, const Eigen::VectorXd& y,
                              double rank_tol = kDefaultRankTol);

}  // namespace frtk
