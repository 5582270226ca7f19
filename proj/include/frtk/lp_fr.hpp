#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "frtk/rat_matrix.hpp"
#include "frtk/simplex.hpp"

namespace frtk {

// Feasible region {x >= 0 : A x = b}, held exactly.
struct LinearSet {
  RatMatrix A;
  RatVec b;

  int n() const { return A.cols(); }
  int m() const { return A.rows(); }
  void validate() const;  // throws DimensionMismatch
};

// Face of the nonnegative orthant: {x >= 0 : x_i = 0 for i in zero_set}.
// Indices are 0-based and kept sorted ascending.
struct OrthantFace {
  int n = 0;
  std::vector<int> zero_set;

  static OrthantFace full(int n) { return {n, {}}; }
  std::vector<int> support() const;
  void validate() const;
};

// One reduction step: w = A^T y with b^T y = 0, w >= 0 on the face support,
// w nonzero there. Both vectors are exact.
struct LpExposingVector {
  RatVec y;
  RatVec w;
};

// faces.size() == steps.size() + 1; faces[0] is the starting face and
// faces[i] = faces[i-1] cut by steps[i-1].
struct FRSequenceLP {
  std::vector<LpExposingVector> steps;
  std::vector<OrthantFace> faces;
};

struct LpVerifyReport {
  bool valid = false;
  bool minimal = false;
  int length = 0;
  OrthantFace final_face;
  std::vector<std::string> diagnoses;  // one entry per step; "" when clean
};

struct SdResult {
  int sd = 0;  // 0 or 1
  std::optional<LpExposingVector> max_support_step;  // present iff sd == 1
};

struct RemovalResult {
  LinearSet reduced;
  FRSequenceLP seq;
  int removal_case = 0;  // 1: dropped a singleton step; 2: kept all steps
  bool minimal_out = false;
};

// Indices of support coordinates where w is strictly positive.
std::vector<int> exposed_set(const OrthantFace& face, const RatVec& w);

// One reduction step toward the minimal face, or nullopt when the relative
// interior is reachable (no exposing vector exists). The result is
// normalized so its support entries sum to 1.
std::optional<LpExposingVector> find_exposing(const LinearSet& L,
                                              const OrthantFace& face);

// Exposing vector whose exposed set is inclusion-minimal among realizable
// exposed sets: greedy single-index shrink from find_exposing. A failed drop
// stays infeasible as the candidate set shrinks, so one deterministic pass
// certifies minimality. shuffle_seed permutes the scan order for property
// tests; 0 keeps it ascending.
std::optional<LpExposingVector> find_minimal_exposing(const LinearSet& L,
                                                      const OrthantFace& face,
                                                      uint64_t shuffle_seed = 0);

// True iff no single index of the step's exposed set can be dropped while a
// nonempty realizable exposed subset remains.
bool is_minimal_step(const LinearSet& L, const OrthantFace& face,
                     const LpExposingVector& step);

// Greedy facial reduction using minimal steps. Its length equals the longest
// possible reduction for the same data, which msd_lp reports.
FRSequenceLP fra_minimal(const LinearSet& L, const OrthantFace& start,
                         uint64_t shuffle_seed = 0);

int msd_lp(const LinearSet& L);

// Singularity degree: 0 when no exposing vector exists, else 1, witnessed by
// a maximum-support exposing vector found by iterated searches.
SdResult sd_lp(const LinearSet& L);

LpVerifyReport verify_sequence_lp(const LinearSet& L, const FRSequenceLP& seq);

// Swaps steps j and j+1 (1-based) of a valid minimal sequence. Applicable
// when step j exposes a singleton, or step j+1 exposes a singleton and an
// exposing vector reaching the swapped intermediate face exists. Output has
// the same length, is minimal, and only the intermediate face changes.
// Throws PreconditionFailed otherwise.
FRSequenceLP swap_steps(const LinearSet& L, const FRSequenceLP& seq, int j);

// Removes coordinate var (0-based) given a valid minimal sequence whose final
// face zeroes it. Case 1 (var exposed alone): that step is dropped and the
// result is minimal iff the var's unit vector lies in the row space with
// b^T y = 0. Case 2 (var exposed with company): steps are kept truncated and
// minimality is preserved. Throws NotRedundant when var is not zeroed.
RemovalResult remove_variable(const LinearSet& L, const FRSequenceLP& seq,
                              int var);

// Exhaustive depth-first search over realizable exposed sets, memoized by
// zero set. Exact reference value for msd_lp. Throws TooLarge when
// n() > cap_n. Optionally returns one longest chain.
int brute_force_msd(const LinearSet& L, int cap_n = 12,
                    FRSequenceLP* witness = nullptr);

// Can D be exactly the exposed set of some step at this face?
bool realizable_exposed_set(const LinearSet& L, const OrthantFace& face,
                            const std::vector<int>& D);

// Upper bound for block-duplicated 0/1 instances: columns are the distinct
// 0/1 column vectors, dup the duplication count (2 * columns.size()).
// All columns nonzero: sum_j (ones(v_j) + dup - 1). Some column zero and all
// columns with at most 3 ones: (dup + 2) (dup / 2 - 1). Otherwise nullopt.
std::optional<long> msd_upper_bound_blocks(
    const std::vector<std::vector<int>>& columns, int dup);

// Zero set of the minimal face of {x >= 0 : A x = b}, found by iterated
// support maximization. Throws EmptyFeasibleSet on an empty region.
OrthantFace minimal_cone_lp(const LinearSet& L);

}  // namespace frtk
