#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "frtk/lp_fr.hpp"
#include "frtk/sdp_fr.hpp"

namespace frtk {

// A 3SAT clause: three signed 1-based variable indices, no repeats of the
// same literal. A variable together with its negation is legal on input and
// removed by preprocess.
using Clause = std::array<int, 3>;

struct CnfInstance {
  int p = 0;  // variable count
  std::vector<Clause> clauses;
  // Set by preprocess (or by hand to bypass it); build_msd_sdp requires it.
  bool preprocessed = false;
  // When produced by duplicate_clauses: the original clause count, so the
  // block structure (that many groups of twice-that-many equal clauses)
  // stays recoverable. 0 otherwise.
  int dup_factor = 0;
  // When produced by preprocess: input variable id of each surviving
  // variable, indexed by new id - 1. Empty otherwise.
  std::vector<int> original_vars;

  int q() const { return static_cast<int>(clauses.size()); }
  void validate() const;
};

// Row/column names of a reduction instance: triples (i, j, k) with k = 1 for
// the literal cell of variable i in clause j, k = 2 for its pairing cell,
// ordered lexicographically by (k, j, i); the corner (0, 0, 0) comes last.
struct IndexUniverse {
  std::vector<std::array<int, 3>> triples;
  std::map<std::array<int, 3>, int> lookup;

  int size() const { return static_cast<int>(triples.size()); }
  int index_of(const std::array<int, 3>& t) const;
  int corner() const { return size() - 1; }
};

// The instance built from a preprocessed formula with p variables and q
// clauses: order n = 6q + 1, m = 2p + q constraint matrices, b = 0, and
// target degree d = p + q. Matrices 1..p are diagonal on the positive-literal
// and pairing cells of each variable, p+1..2p on the negative-literal and
// pairing cells, and 2p+1..2p+q couple clause j's literal diagonal with the
// corner-to-pairing border.
struct ReductionInstance {
  SdpProblem sdp;
  IndexUniverse universe;
  CnfInstance cnf;
  int p = 0;
  int q = 0;
  int q_tilde = 0;  // dup_factor of the source formula, 0 when not duplicated
  int d = 0;
  // Per variable (index i-1): cells (i, j, 1) where u_i occurs positively,
  // cells (i, j, 1) where it occurs negatively, and pairing cells (i, j, 2).
  std::vector<std::vector<std::array<int, 3>>> pos_cells;
  std::vector<std::vector<std::array<int, 3>>> neg_cells;
  std::vector<std::vector<std::array<int, 3>>> pair_cells;
};

struct Assignment {
  std::vector<bool> values;  // values[i] is variable i+1
};

struct CertifyReport {
  bool satisfiable = false;
  bool trivialized = false;  // preprocessing removed every clause
  long msd = 0;
  int d = 0;
  std::optional<Assignment> witness_assignment;
  std::optional<FRSequenceSDP> witness_sequence;
};

// DIMACS cnf text. Clauses may span lines; a '%' token ends the input.
// Throws ParseError for malformed text, bad indices, clause-count drift, or
// an empty clause; NonTernaryClause when a clause is not three literals over
// three distinct-or-negated variables.
CnfInstance parse_dimacs(const std::string& text);

// Fixpoint of: drop clauses containing a variable and its negation; then fix
// any variable occurring with only one polarity (against that polarity) and
// drop the clauses it satisfies. Surviving variables are renumbered 1..p
// keeping order; original_vars records the pre-image. Every clause removed is
// the distinguished trivial success (q() == 0). Preserves satisfiability.
CnfInstance preprocess(const CnfInstance& cnf);

// Repeats each clause 2q times in place, q the input clause count, so the
// output has 2q^2 clauses in original order, each block contiguous. Requires
// a preprocessed input.
CnfInstance duplicate_clauses(const CnfInstance& cnf);

// The hardness construction. Requires cnf.preprocessed (trusted, not
// re-derived) and at least one clause.
ReductionInstance build_msd_sdp(const CnfInstance& cnf);

bool satisfies(const CnfInstance& cnf, const Assignment& a);

// 0/1 matrix with entry (i, j) = 1 iff the assignment makes variable i's
// literal in clause j true; rows 0..p-1, columns 0..q-1.
std::vector<std::vector<int>> literal_matrix(const ReductionInstance& R,
                                             const Assignment& a);

// The length p + q reduction sequence of a satisfying assignment: step i
// uses matrix i when variable i is false and matrix p+i when true, then the
// q clause matrices in order. All faces are coordinate blocks and the final
// support is the corner alone. Throws UnsatisfiedAssignment naming the first
// falsified clause.
FRSequenceSDP assignment_to_sequence(const ReductionInstance& R,
                                     const Assignment& a);

// State after the p variable steps of the assignment (which need not satisfy
// anything): restrict the unused variable matrices and the clause matrices
// to the surviving cells; the result is diagonal, and converting it yields
// the incidence system of literal_matrix(R, a) with all-zero coordinates
// (including the corner) dropped.
LinearSet reduced_lp_for_assignment(const ReductionInstance& R,
                                    const Assignment& a);

// Exact maximum singularity degree of the reduction: p plus the largest
// exact LP degree of reduced_lp_for_assignment over all 2^p assignments.
// Throws BudgetExceeded when 2^p > budget. jobs > 1 splits the enumeration
// across threads; the result does not depend on jobs.
long exact_msd_of_reduction(const ReductionInstance& R,
                            long budget = 1 << 20, int jobs = 1);

// End-to-end decision: preprocess (unless already flagged), duplicate,
// build, compute the exact degree, and brute-force satisfiability. The two
// sides must agree with msd >= d iff satisfiable; disagreement throws
// ClaimViolated. A satisfiable instance carries a verified witness.
CertifyReport certify(const CnfInstance& cnf, long budget = 1 << 20,
                      int jobs = 1);

}  // namespace frtk
