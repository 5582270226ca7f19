#pragma once

// Internal exact tableau engine shared by the public LP solver and the
// facial-reduction search systems. Not installed; include only from src/.

#include <vector>

#include "frtk/errors.hpp"
#include "frtk/rational.hpp"

namespace frtk::detail {

// Equality-form tableau over nonnegative variables.
//
//   row[r] : coefficients, length ncols; rhs[r] >= 0 always.
//   basis[r] = column index, or kArtificial for an implicit artificial
//   variable (value rhs[r], never materialized as a column, never re-enters).
//
// Phase 1 minimizes the artificial sum when some artificial starts positive.
// Afterwards artificials are pinned at zero: an entering column with a
// nonzero entry in an artificial row forces a zero-length step, so their
// values never move again.
//
// Anti-cycling: Dantzig pricing until 64 consecutive zero-length steps, then
// Bland's rule (lowest eligible column; lowest variable index on ratio ties),
// which terminates finitely. All choices are deterministic.
class Tableau {
 public:
  static constexpr int kArtificial = -1;

  int ncols = 0;
  std::vector<RatVec> row;   // row[r] has size ncols
  RatVec rhs;                // size == row.size(), kept >= 0
  std::vector<int> basis;    // size == row.size()
  RatVec obj;                // reduced objective coefficients, size ncols
  Rational obj_value;        // current objective value (maximization)

  enum class Outcome { Optimal, Unbounded, EarlyPositive, Infeasible };

  // Runs phase 1 if needed, then phase 2. When stop_when_positive is set,
  // phase 2 returns EarlyPositive as soon as obj_value > 0.
  Outcome run(bool stop_when_positive) {
    if (!phase1()) return Outcome::Infeasible;
    return phase2(stop_when_positive);
  }

  // Value of column c in the current basic solution.
  RatVec solution() const {
    RatVec x(ncols, Rational(0));
    for (size_t r = 0; r < row.size(); ++r)
      if (basis[r] >= 0) x[basis[r]] = rhs[r];
    return x;
  }

 private:
  bool bland_ = false;
  long stalled_ = 0;
  long pivots_ = 0;

  static constexpr long kMaxPivots = 4000000;

  int var_index(size_t r) const {
    return basis[r] == kArtificial ? ncols + static_cast<int>(r) : basis[r];
  }

  // Leaving-row selection for entering column e; -1 when no row bounds the
  // step. Artificial rows at value zero admit a zero step on entries of
  // either sign, which is what keeps them pinned.
  int pick_leaving(int e) const {
    int best = -1;
    Rational best_ratio;
    for (size_t r = 0; r < row.size(); ++r) {
      const Rational& a = row[r][e];
      int sa = sgn(a);
      if (sa == 0) continue;
      bool pinned = basis[r] == kArtificial && sgn(rhs[r]) == 0;
      if (!pinned && sa < 0) continue;
      Rational ratio = pinned ? Rational(0) : rhs[r] / a;
      if (best < 0 || ratio < best_ratio) {
        best = static_cast<int>(r);
        best_ratio = ratio;
        continue;
      }
      if (ratio == best_ratio) {
        if (bland_) {
          if (var_index(r) < var_index(best)) best = static_cast<int>(r);
        } else {
          // Heuristic: retire artificial rows first, then lowest index.
          bool ra = basis[r] == kArtificial;
          bool ba = basis[best] == kArtificial;
          if (ra != ba ? ra : var_index(r) < var_index(best))
            best = static_cast<int>(r);
        }
      }
    }
    return best;
  }

  // Substitutes the pivot column out of every row, the objective, and the
  // optional auxiliary objective (phase-1 row).
  void pivot(int pr, int pc, RatVec* aux, Rational* aux_value) {
    static thread_local Rational tmp;
    RatVec& prow = row[pr];
    if (prow[pc] != 1) {
      const Rational piv = prow[pc];
      for (int c = 0; c < ncols; ++c)
        if (sgn(prow[c]) != 0) prow[c] /= piv;
      if (sgn(rhs[pr]) != 0) rhs[pr] /= piv;
    }
    const bool prhs = sgn(rhs[pr]) != 0;
    for (size_t r = 0; r < row.size(); ++r) {
      if (static_cast<int>(r) == pr) continue;
      RatVec& target = row[r];
      const Rational f = target[pc];
      if (sgn(f) == 0) continue;
      for (int c = 0; c < ncols; ++c) {
        if (sgn(prow[c]) == 0) continue;
        mpq_mul(tmp.get_mpq_t(), f.get_mpq_t(), prow[c].get_mpq_t());
        mpq_sub(target[c].get_mpq_t(), target[c].get_mpq_t(), tmp.get_mpq_t());
      }
      target[pc] = 0;
      if (prhs) {
        mpq_mul(tmp.get_mpq_t(), f.get_mpq_t(), rhs[pr].get_mpq_t());
        mpq_sub(rhs[r].get_mpq_t(), rhs[r].get_mpq_t(), tmp.get_mpq_t());
      }
    }
    auto reduce_objective = [&](RatVec& price, Rational& value, int sign) {
      const Rational f = price[pc];
      if (sgn(f) == 0) return;
      for (int c = 0; c < ncols; ++c) {
        if (sgn(prow[c]) == 0) continue;
        mpq_mul(tmp.get_mpq_t(), f.get_mpq_t(), prow[c].get_mpq_t());
        mpq_sub(price[c].get_mpq_t(), price[c].get_mpq_t(), tmp.get_mpq_t());
      }
      price[pc] = 0;
      if (prhs) {
        mpq_mul(tmp.get_mpq_t(), f.get_mpq_t(), rhs[pr].get_mpq_t());
        if (sign > 0)
          mpq_add(value.get_mpq_t(), value.get_mpq_t(), tmp.get_mpq_t());
        else
          mpq_sub(value.get_mpq_t(), value.get_mpq_t(), tmp.get_mpq_t());
      }
    };
    reduce_objective(obj, obj_value, +1);
    // aux_value tracks the artificial *sum*, which moves opposite to the
    // maximized phase-1 objective.
    if (aux) reduce_objective(*aux, *aux_value, -1);
    basis[pr] = pc;
    if (++pivots_ > kMaxPivots)
      throw InternalError("simplex pivot limit exceeded");
  }

  int pick_entering(const RatVec& price) const {
    int best = -1;
    for (int c = 0; c < ncols; ++c) {
      if (sgn(price[c]) <= 0) continue;
      if (bland_) return c;
      if (best < 0 || price[c] > price[best]) best = c;
    }
    return best;
  }

  void note_step(const Rational& step) {
    if (sgn(step) == 0) {
      if (++stalled_ > 64) bland_ = true;
    } else {
      stalled_ = 0;
    }
  }

  bool phase1() {
    RatVec p1(ncols, Rational(0));
    Rational art_sum = 0;
    bool any = false;
    for (size_t r = 0; r < row.size(); ++r) {
      if (basis[r] != kArtificial || sgn(rhs[r]) == 0) continue;
      any = true;
      art_sum += rhs[r];
      for (int c = 0; c < ncols; ++c)
        if (sgn(row[r][c]) != 0) p1[c] += row[r][c];
    }
    if (!any) return true;
    bland_ = false;
    stalled_ = 0;
    while (true) {
      int e = pick_entering(p1);
      if (e < 0) break;
      int l = pick_leaving(e);
      if (l < 0) throw InternalError("phase 1 unbounded");
      note_step(basis[l] == kArtificial && sgn(rhs[l]) == 0 ? Rational(0)
                                                            : rhs[l] / row[l][e]);
      pivot(l, e, &p1, &art_sum);
    }
    return sgn(art_sum) == 0;
  }

  Outcome phase2(bool stop_when_positive) {
    bland_ = false;
    stalled_ = 0;
    while (true) {
      if (stop_when_positive && sgn(obj_value) > 0) return Outcome::EarlyPositive;
      int e = pick_entering(obj);
      if (e < 0) return Outcome::Optimal;
      int l = pick_leaving(e);
      if (l < 0) return Outcome::Unbounded;
      note_step(basis[l] == kArtificial && sgn(rhs[l]) == 0 ? Rational(0)
                                                            : rhs[l] / row[l][e]);
      pivot(l, e, nullptr, nullptr);
    }
  }
};

}  // namespace frtk::detail
