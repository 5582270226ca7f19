#include "frtk/simplex.hpp"

#include <algorithm>

#include "frtk/errors.hpp"
#include "simplex_engine.hpp"

namespace frtk {

namespace {

// Record of one eliminated free variable: x[var] = rhs - coeffs . vars.
// Claims are evaluated in reverse creation order, so a claim may still
// reference variables claimed after it.
struct Claim {
  int var;
  RatVec coeffs;
  Rational rhs;
};

int count_nonzeros(const RatVec& v) {
  int k = 0;
  for (const Rational& x : v)
    if (sgn(x) != 0) ++k;
  return k;
}

}  // namespace

LpResult lp_solve(const LpTask& task) {
  const int n = task.num_vars;
  if (n < 0) throw MalformedTask("negative variable count");
  if (static_cast<int>(task.objective.size()) != n)
    throw MalformedTask("objective length != num_vars");
  for (const auto& [a, r] : task.equalities)
    if (static_cast<int>(a.size()) != n)
      throw MalformedTask("equality row length != num_vars");
  for (const auto& [a, r] : task.inequalities_geq)
    if (static_cast<int>(a.size()) != n)
      throw MalformedTask("inequality row length != num_vars");

  const int num_geq = static_cast<int>(task.inequalities_geq.size());
  const int total = n + num_geq;  // free x columns, then slack columns

  std::vector<RatVec> rows;
  RatVec rhs;
  for (const auto& [a, r] : task.equalities) {
    RatVec row(total, Rational(0));
    std::copy(a.begin(), a.end(), row.begin());
    rows.push_back(std::move(row));
    rhs.push_back(r);
  }
  for (int k = 0; k < num_geq; ++k) {
    const auto& [a, r] = task.inequalities_geq[k];
    RatVec row(total, Rational(0));
    std::copy(a.begin(), a.end(), row.begin());
    row[n + k] = -1;  // a.x - s = rhs, s >= 0
    rows.push_back(std::move(row));
    rhs.push_back(r);
  }

  RatVec obj(total, Rational(0));
  std::copy(task.objective.begin(), task.objective.end(), obj.begin());
  Rational obj_const = 0;

  // Gauss-Jordan elimination of the free x columns.
  std::vector<Claim> claims;
  std::vector<bool> dead(rows.size(), false);
  bool pending_unbounded = false;
  static thread_local Rational tmp;
  for (int j = 0; j < n; ++j) {
    int pick = -1, pick_nnz = 0;
    for (size_t r = 0; r < rows.size(); ++r) {
      if (dead[r] || sgn(rows[r][j]) == 0) continue;
      int nnz = count_nonzeros(rows[r]);
      if (pick < 0 || nnz < pick_nnz) {
        pick = static_cast<int>(r);
        pick_nnz = nnz;
      }
    }
    if (pick < 0) {
      // x_j unconstrained: a nonzero reduced objective coefficient means an
      // improving ray exists whenever the system is feasible.
      if (sgn(obj[j]) != 0) pending_unbounded = true;
      continue;
    }
    RatVec& prow = rows[pick];
    if (prow[j] != 1) {
      const Rational piv = prow[j];
      for (int c = 0; c < total; ++c)
        if (sgn(prow[c]) != 0) prow[c] /= piv;
      if (sgn(rhs[pick]) != 0) rhs[pick] /= piv;
    }
    auto substitute = [&](RatVec& target, Rational& tval, bool add_value) {
      const Rational f = target[j];
      if (sgn(f) == 0) return;
      for (int c = 0; c < total; ++c) {
        if (sgn(prow[c]) == 0) continue;
        mpq_mul(tmp.get_mpq_t(), f.get_mpq_t(), prow[c].get_mpq_t());
        mpq_sub(target[c].get_mpq_t(), target[c].get_mpq_t(), tmp.get_mpq_t());
      }
      target[j] = 0;
      if (sgn(rhs[pick]) != 0) {
        mpq_mul(tmp.get_mpq_t(), f.get_mpq_t(), rhs[pick].get_mpq_t());
        if (add_value)
          mpq_add(tval.get_mpq_t(), tval.get_mpq_t(), tmp.get_mpq_t());
        else
          mpq_sub(tval.get_mpq_t(), tval.get_mpq_t(), tmp.get_mpq_t());
      }
    };
    for (size_t r = 0; r < rows.size(); ++r)
      if (!dead[r] && static_cast<int>(r) != pick) substitute(rows[r], rhs[r], false);
    substitute(obj, obj_const, true);
    dead[pick] = true;
    Claim cl;
    cl.var = j;
    cl.coeffs = prow;
    cl.coeffs[j] = 0;
    cl.rhs = rhs[pick];
    claims.push_back(std::move(cl));
  }

  // Assemble the slack-only tableau.
  detail::Tableau tab;
  tab.ncols = num_geq;
  for (size_t r = 0; r < rows.size(); ++r) {
    if (dead[r]) continue;
    bool all_zero = true;
    for (int c = n; c < total; ++c)
      if (sgn(rows[r][c]) != 0) { all_zero = false; break; }
    if (all_zero) {
      if (sgn(rhs[r]) != 0) return {LpStatus::Infeasible, Rational(0), {}};
      continue;
    }
    RatVec row(num_geq);
    for (int c = 0; c < num_geq; ++c) row[c] = rows[r][n + c];
    Rational rv = rhs[r];
    if (sgn(rv) < 0) {
      for (Rational& x : row) x = -x;
      rv = -rv;
    }
    tab.row.push_back(std::move(row));
    tab.rhs.push_back(std::move(rv));
    tab.basis.push_back(detail::Tableau::kArtificial);
  }
  tab.obj.assign(obj.begin() + n, obj.end());
  tab.obj_value = obj_const;

  switch (tab.run(false)) {
    case detail::Tableau::Outcome::Infeasible:
      return {LpStatus::Infeasible, Rational(0), {}};
    case detail::Tableau::Outcome::Unbounded:
      return {LpStatus::Unbounded, Rational(0), {}};
    case detail::Tableau::Outcome::EarlyPositive:
      throw InternalError("unexpected early exit");
    case detail::Tableau::Outcome::Optimal:
      break;
  }
  if (pending_unbounded) return {LpStatus::Unbounded, Rational(0), {}};

  RatVec slack = tab.solution();
  RatVec all(total, Rational(0));
  std::copy(slack.begin(), slack.end(), all.begin() + n);
  for (auto it = claims.rbegin(); it != claims.rend(); ++it) {
    Rational v = it->rhs;
    for (int c = 0; c < total; ++c)
      if (sgn(it->coeffs[c]) != 0) v -= it->coeffs[c] * all[c];
    all[it->var] = v;
  }

  LpResult res;
  res.status = LpStatus::Optimal;
  res.value = tab.obj_value;
  res.point.assign(all.begin(), all.begin() + n);
  return res;
}

}  // namespace frtk
