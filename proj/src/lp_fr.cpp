#include "frtk/lp_fr.hpp"

#include <algorithm>
#include <optional>
#include <random>
#include <unordered_map>
#include <utility>

#include "frtk/errors.hpp"
#include "simplex_engine.hpp"

namespace frtk {

namespace {

bool all_zero(const RatVec& v) {
  for (const auto& x : v)
    if (sgn(x) != 0) return false;
  return true;
}

int count_nnz(const RatVec& v) {
  int k = 0;
  for (const auto& x : v)
    if (sgn(x) != 0) ++k;
  return k;
}

std::vector<int> sorted_union(const std::vector<int>& a,
                              const std::vector<int>& b) {
  std::vector<int> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

std::vector<int> sorted_diff(const std::vector<int>& a,
                             const std::vector<int>& b) {
  std::vector<int> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

// Exact elimination workspace for the cone {w = A^T y : b^T y = 0} cut down
// to a face. Columns [0, n) are w coordinates, [n, n+m) are y coordinates.
// Every active row has right-hand side 0. Eliminated columns become claims;
// replaying claims newest-first turns a tableau solution over the remaining
// support columns back into full (w, y) values.
class FaceSystem {
 public:
  FaceSystem(const LinearSet& L, const OrthantFace& start)
      : L_(L), n_(L.n()), m_(L.m()) {
    L.validate();
    start.validate();
    if (start.n != n_)
      throw DimensionMismatch("face dimension does not match the system");
    in_support_.assign(n_, 1);
    for (int z : start.zero_set) in_support_[z] = 0;
    for (int i = 0; i < n_; ++i)
      if (in_support_[i]) support_.push_back(i);

    for (int i : support_) {
      RatVec row(n_ + m_);
      row[i] = -1;
      for (int r = 0; r < m_; ++r) row[n_ + r] = L.A.at(r, i);
      active_.push_back(std::move(row));
    }
    if (!all_zero(L.b)) {
      RatVec row(n_ + m_);
      for (int r = 0; r < m_; ++r) row[n_ + r] = L.b[r];
      active_.push_back(std::move(row));
    }
    for (int r = 0; r < m_; ++r) eliminate(n_ + r);
  }

  int n() const { return n_; }
  const std::vector<int>& support() const { return support_; }

  // Shrinks the face by zeroing the listed support coordinates.
  void zero_out(const std::vector<int>& T) {
    for (int i : T) {
      if (i < 0 || i >= n_ || !in_support_[i])
        throw InternalError("zero_out: index outside the current support");
    }
    for (int i : T) {
      in_support_[i] = 0;
      eliminate(i);
    }
    std::vector<int> next;
    next.reserve(support_.size() - T.size());
    for (int i : support_)
      if (in_support_[i]) next.push_back(i);
    support_ = std::move(next);
  }

  std::optional<LpExposingVector> search(const std::vector<int>& D) {
    return search(D, D);
  }

  // Maximizes sum of w over O subject to w = A^T y, b^T y = 0, w = 0 on the
  // support outside D, w >= 0 on D and sum of w over D at most 1. A positive
  // value proves an exposing vector with exposed set inside D; the result is
  // rescaled so its support sum equals 1. Returns nullopt when the maximum
  // is 0, i.e. every such w vanishes on O.
  std::optional<LpExposingVector> search(const std::vector<int>& D,
                                         const std::vector<int>& O) {
    if (D.empty()) return std::nullopt;
    std::vector<int> colof(n_, -1);
    for (size_t k = 0; k < D.size(); ++k) {
      int i = D[k];
      if (i < 0 || i >= n_ || !in_support_[i] || colof[i] != -1)
        throw InternalError("search: candidate set outside the support");
      colof[i] = static_cast<int>(k);
    }
    const int d = static_cast<int>(D.size());

    detail::Tableau tab;
    tab.ncols = d + 1;  // last column is the normalization slack
    for (const auto& row : active_) {
      RatVec trow(d + 1);
      bool any = false;
      for (int k = 0; k < d; ++k) {
        trow[k] = row[D[k]];
        any = any || sgn(trow[k]) != 0;
      }
      if (!any) continue;  // only forced-zero coordinates appear
      tab.row.push_back(std::move(trow));
      tab.rhs.emplace_back(0);
      tab.basis.push_back(detail::Tableau::kArtificial);
    }
    {
      RatVec norm(d + 1, Rational(1));
      tab.row.push_back(std::move(norm));
      tab.rhs.emplace_back(1);
      tab.basis.push_back(d);
    }
    tab.obj.assign(d + 1, Rational(0));
    for (int i : O) {
      if (colof[i] < 0) throw InternalError("search: objective outside D");
      tab.obj[colof[i]] = 1;
    }
    tab.obj_value = 0;

    const auto out = tab.run(/*stop_when_positive=*/true);
    if (out == detail::Tableau::Outcome::Optimal) return std::nullopt;
    if (out != detail::Tableau::Outcome::EarlyPositive)
      throw InternalError("search: unexpected simplex outcome");
    return extract(D, tab.solution());
  }

 private:
  struct Claim {
    int col;
    RatVec coeffs;  // value(col) = -coeffs . values; empty pins col to 0
  };

  // Removes one column from the active rows, remembering how to recover it.
  void eliminate(int col) {
    int best = -1;
    int best_nnz = 0;
    for (size_t r = 0; r < active_.size(); ++r) {
      if (sgn(active_[r][col]) == 0) continue;
      int nnz = count_nnz(active_[r]);
      if (best < 0 || nnz < best_nnz) {
        best = static_cast<int>(r);
        best_nnz = nnz;
      }
    }
    if (best < 0) {
      claims_.push_back({col, {}});
      return;
    }
    RatVec row = std::move(active_[best]);
    active_.erase(active_.begin() + best);
    const Rational piv = row[col];
    for (auto& v : row)
      if (sgn(v) != 0) v /= piv;
    row[col] = 0;
    for (auto& other : active_) {
      if (sgn(other[col]) == 0) continue;
      const Rational f = other[col];
      for (int c = 0; c < n_ + m_; ++c)
        if (sgn(row[c]) != 0) other[c] -= f * row[c];
      other[col] = 0;
    }
    claims_.push_back({col, std::move(row)});
  }

  LpExposingVector extract(const std::vector<int>& D, const RatVec& sol) const {
    RatVec vals(n_ + m_, Rational(0));
    std::vector<char> defined(n_ + m_, 0);
    for (int i : support_) defined[i] = 1;
    for (size_t k = 0; k < D.size(); ++k) vals[D[k]] = sol[k];
    for (auto it = claims_.rbegin(); it != claims_.rend(); ++it) {
      Rational v(0);
      for (int c = 0; c < static_cast<int>(it->coeffs.size()); ++c) {
        if (sgn(it->coeffs[c]) == 0) continue;
        if (!defined[c])
          throw InternalError("extract: claim references an undefined column");
        v -= it->coeffs[c] * vals[c];
      }
      vals[it->col] = v;
      defined[it->col] = 1;
    }
    RatVec y(vals.begin() + n_, vals.end());
    RatVec w = L_.A.tmul(y);
    for (int i = 0; i < n_; ++i)
      if (defined[i] && w[i] != vals[i])
        throw InternalError("extract: reconstructed w disagrees with A^T y");
    Rational bty(0);
    for (int r = 0; r < m_; ++r)
      if (sgn(L_.b[r]) != 0) bty += L_.b[r] * y[r];
    if (sgn(bty) != 0) throw InternalError("extract: b^T y != 0");
    Rational s(0);
    for (int i : support_) s += w[i];
    if (sgn(s) <= 0) throw InternalError("extract: nonpositive support mass");
    for (auto& v : y) v /= s;
    for (auto& v : w) v /= s;
    return {std::move(y), std::move(w)};
  }

  const LinearSet& L_;
  int n_ = 0;
  int m_ = 0;
  std::vector<RatVec> active_;
  std::vector<Claim> claims_;
  std::vector<int> support_;
  std::vector<char> in_support_;
};

std::vector<int> positive_on(const std::vector<int>& candidates,
                             const RatVec& w) {
  std::vector<int> out;
  for (int i : candidates)
    if (sgn(w[i]) > 0) out.push_back(i);
  return out;
}

// Shrinks the exposed set one index at a time.
//
// Single drops decide inclusion-minimality: if some realizable exposed set
// D' is a proper subset of T, then any j in T \ D' has D' inside T \ {j}, so
// the drop of j alone is feasible (search only asks for exposed sets inside
// the candidate set). Hence "no single index droppable" means no proper
// realizable subset at all.
//
// One ascending pass suffices: a drop that failed against a candidate set T
// stays infeasible against every subset of T (shrinking T only adds forced
// zeros to the search), so indices never need revisiting after the set
// shrinks.
std::optional<LpExposingVector> minimal_search(FaceSystem& sys,
                                               std::mt19937_64* rng) {
  const std::vector<int>& P = sys.support();
  auto cur = sys.search(P, P);
  if (!cur) return std::nullopt;
  std::vector<int> T = positive_on(P, cur->w);
  std::vector<int> order = T;
  if (rng) std::shuffle(order.begin(), order.end(), *rng);
  std::vector<char> live(sys.n(), 0);
  for (int i : T) live[i] = 1;
  size_t live_count = T.size();
  for (int j : order) {
    if (!live[j] || live_count <= 1) continue;
    std::vector<int> D;
    D.reserve(live_count - 1);
    for (int i : T)
      if (live[i] && i != j) D.push_back(i);
    auto sol = sys.search(D);
    if (!sol) continue;
    cur = std::move(sol);
    std::fill(live.begin(), live.end(), 0);
    live_count = 0;
    for (int i : positive_on(D, cur->w)) {
      live[i] = 1;
      ++live_count;
    }
  }
  return cur;
}

// Is there y with A^T y restricted to supp(face) equal to target there and
// b^T y = 0? Entries of target outside the support are ignored; the solution
// is returned for witness building.
std::optional<RatVec> solve_support_system(const LinearSet& L,
                                           const OrthantFace& face,
                                           const std::vector<int>& D) {
  LpTask task;
  task.num_vars = L.m();
  task.objective.assign(L.m(), Rational(0));
  const auto supp = face.support();
  for (int i : supp) {
    RatVec row(L.m());
    for (int r = 0; r < L.m(); ++r) row[r] = L.A.at(r, i);
    if (std::binary_search(D.begin(), D.end(), i)) {
      task.inequalities_geq.push_back({std::move(row), Rational(1)});
    } else {
      task.equalities.push_back({std::move(row), Rational(0)});
    }
  }
  if (!all_zero(L.b)) {
    RatVec row(L.m());
    for (int r = 0; r < L.m(); ++r) row[r] = L.b[r];
    task.equalities.push_back({std::move(row), Rational(0)});
  }
  auto res = lp_solve(task);
  if (res.status != LpStatus::Optimal) return std::nullopt;
  return res.point;
}

void require_valid_minimal(const LinearSet& L, const FRSequenceLP& seq,
                           const char* who) {
  auto rep = verify_sequence_lp(L, seq);
  if (!rep.valid || !rep.minimal)
    throw PreconditionFailed(std::string(who) +
                             ": sequence is not valid and minimal");
}

}  // namespace

void LinearSet::validate() const {
  if (static_cast<int>(b.size()) != A.rows())
    throw DimensionMismatch("b length does not match the row count");
}

std::vector<int> OrthantFace::support() const {
  std::vector<int> out;
  out.reserve(n - zero_set.size());
  size_t k = 0;
  for (int i = 0; i < n; ++i) {
    if (k < zero_set.size() && zero_set[k] == i) {
      ++k;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

void OrthantFace::validate() const {
  if (n < 0) throw InvalidArgument("face dimension is negative");
  int prev = -1;
  for (int z : zero_set) {
    if (z <= prev) throw InvalidArgument("zero set is not sorted unique");
    if (z < 0 || z >= n) throw InvalidArgument("zero set index out of range");
    prev = z;
  }
}

std::vector<int> exposed_set(const OrthantFace& face, const RatVec& w) {
  face.validate();
  if (static_cast<int>(w.size()) != face.n)
    throw DimensionMismatch("w length does not match the face dimension");
  return positive_on(face.support(), w);
}

std::optional<LpExposingVector> find_exposing(const LinearSet& L,
                                              const OrthantFace& face) {
  FaceSystem sys(L, face);
  return sys.search(sys.support());
}

std::optional<LpExposingVector> find_minimal_exposing(const LinearSet& L,
                                                      const OrthantFace& face,
                                                      uint64_t shuffle_seed) {
  FaceSystem sys(L, face);
  std::optional<std::mt19937_64> rng;
  if (shuffle_seed != 0) rng.emplace(shuffle_seed);
  return minimal_search(sys, rng ? &*rng : nullptr);
}

bool is_minimal_step(const LinearSet& L, const OrthantFace& face,
                     const LpExposingVector& step) {
  L.validate();
  face.validate();
  if (static_cast<int>(step.y.size()) != L.m() ||
      static_cast<int>(step.w.size()) != L.n())
    throw DimensionMismatch("step sizes do not match the system");
  if (L.A.tmul(step.y) != step.w)
    throw InvalidCertificate("step has w != A^T y");
  Rational bty(0);
  for (int r = 0; r < L.m(); ++r) bty += L.b[r] * step.y[r];
  if (sgn(bty) != 0) throw InvalidCertificate("step has b^T y != 0");
  const auto supp = face.support();
  for (int i : supp)
    if (sgn(step.w[i]) < 0)
      throw InvalidCertificate("step is negative on the face support");
  const auto T = positive_on(supp, step.w);
  if (T.empty())
    throw InvalidCertificate("step vanishes on the face support");
  if (T.size() == 1) return true;
  FaceSystem sys(L, face);
  for (int j : T) {
    std::vector<int> D;
    D.reserve(T.size() - 1);
    for (int i : T)
      if (i != j) D.push_back(i);
    if (sys.search(D)) return false;
  }
  return true;
}

FRSequenceLP fra_minimal(const LinearSet& L, const OrthantFace& start,
                         uint64_t shuffle_seed) {
  FaceSystem sys(L, start);
  std::optional<std::mt19937_64> rng;
  if (shuffle_seed != 0) rng.emplace(shuffle_seed);
  FRSequenceLP out;
  out.faces.push_back(start);
  while (true) {
    auto step = minimal_search(sys, rng ? &*rng : nullptr);
    if (!step) break;
    const auto T = positive_on(sys.support(), step->w);
    if (T.empty()) throw InternalError("fra_minimal: empty exposed set");
    OrthantFace next{start.n, sorted_union(out.faces.back().zero_set, T)};
    out.steps.push_back(std::move(*step));
    out.faces.push_back(std::move(next));
    sys.zero_out(T);
  }
  return out;
}

int msd_lp(const LinearSet& L) {
  return static_cast<int>(
      fra_minimal(L, OrthantFace::full(L.n())).steps.size());
}

SdResult sd_lp(const LinearSet& L) {
  FaceSystem sys(L, OrthantFace::full(L.n()));
  const std::vector<int>& P = sys.support();
  auto cur = sys.search(P, P);
  if (!cur) return {0, std::nullopt};
  // Grow the exposed set to the union of all realizable exposed sets: sums
  // of exposing vectors are exposing, and their exposed sets unite.
  while (true) {
    std::vector<char> covered(L.n(), 0);
    for (int i : positive_on(P, cur->w)) covered[i] = 1;
    std::vector<int> missing;
    for (int i : P)
      if (!covered[i]) missing.push_back(i);
    if (missing.empty()) break;
    auto more = sys.search(P, missing);
    if (!more) break;
    for (int r = 0; r < L.m(); ++r) cur->y[r] += more->y[r];
    for (int i = 0; i < L.n(); ++i) cur->w[i] += more->w[i];
  }
  Rational s(0);
  for (int i : P) s += cur->w[i];
  for (auto& v : cur->y) v /= s;
  for (auto& v : cur->w) v /= s;
  return {1, std::move(cur)};
}

LpVerifyReport verify_sequence_lp(const LinearSet& L, const FRSequenceLP& seq) {
  L.validate();
  LpVerifyReport rep;
  rep.length = static_cast<int>(seq.steps.size());
  if (seq.faces.size() != seq.steps.size() + 1) {
    rep.diagnoses.push_back("face count is not step count + 1");
    rep.final_face = seq.faces.empty() ? OrthantFace::full(L.n())
                                       : seq.faces.back();
    return rep;
  }
  rep.final_face = seq.faces.back();
  rep.diagnoses.assign(seq.steps.size(), "");
  bool ok = true;
  for (const auto& f : seq.faces) {
    f.validate();
    if (f.n != L.n()) {
      rep.diagnoses.assign(1, "face dimension does not match the system");
      return rep;
    }
  }
  for (size_t k = 0; k < seq.steps.size(); ++k) {
    const auto& st = seq.steps[k];
    const auto& F = seq.faces[k];
    auto fail = [&](const char* msg) {
      rep.diagnoses[k] = msg;
      ok = false;
    };
    if (static_cast<int>(st.y.size()) != L.m() ||
        static_cast<int>(st.w.size()) != L.n()) {
      fail("step sizes do not match the system");
      continue;
    }
    if (L.A.tmul(st.y) != st.w) {
      fail("w != A^T y");
      continue;
    }
    Rational bty(0);
    for (int r = 0; r < L.m(); ++r) bty += L.b[r] * st.y[r];
    if (sgn(bty) != 0) {
      fail("b^T y != 0");
      continue;
    }
    const auto supp = F.support();
    bool neg = false;
    for (int i : supp) neg = neg || sgn(st.w[i]) < 0;
    if (neg) {
      fail("w is negative on the face support");
      continue;
    }
    const auto T = positive_on(supp, st.w);
    if (T.empty()) {
      fail("w vanishes on the face support");
      continue;
    }
    if (seq.faces[k + 1].zero_set != sorted_union(F.zero_set, T)) {
      fail("next face is not the cut by this step");
      continue;
    }
  }
  rep.valid = ok;
  if (ok) {
    rep.minimal = true;
    for (size_t k = 0; k < seq.steps.size(); ++k) {
      if (!is_minimal_step(L, seq.faces[k], seq.steps[k])) {
        rep.minimal = false;
        if (rep.diagnoses[k].empty()) rep.diagnoses[k] = "step is not minimal";
      }
    }
  }
  return rep;
}

FRSequenceLP swap_steps(const LinearSet& L, const FRSequenceLP& seq, int j) {
  const int len = static_cast<int>(seq.steps.size());
  if (j < 1 || j >= len)
    throw InvalidArgument("swap index out of range");
  require_valid_minimal(L, seq, "swap_steps");
  const auto Sj = sorted_diff(seq.faces[j].zero_set, seq.faces[j - 1].zero_set);
  const auto Sj1 = sorted_diff(seq.faces[j + 1].zero_set, seq.faces[j].zero_set);
  FRSequenceLP out = seq;
  if (Sj.size() == 1) {
    // The later vector minus the right multiple of the earlier one vanishes
    // at the singleton and is unchanged elsewhere on the earlier support.
    const int s = Sj[0];
    const auto& wj = seq.steps[j - 1].w;
    const auto& wj1 = seq.steps[j].w;
    const Rational alpha = wj1[s] / wj[s];
    LpExposingVector first;
    first.y.resize(L.m());
    first.w.resize(L.n());
    for (int r = 0; r < L.m(); ++r)
      first.y[r] = seq.steps[j].y[r] - alpha * seq.steps[j - 1].y[r];
    for (int i = 0; i < L.n(); ++i) first.w[i] = wj1[i] - alpha * wj[i];
    out.steps[j - 1] = std::move(first);
    out.steps[j] = seq.steps[j - 1];
    out.faces[j] = {L.n(), sorted_union(seq.faces[j - 1].zero_set, Sj1)};
  } else if (Sj1.size() == 1) {
    FaceSystem sys(L, seq.faces[j - 1]);
    auto sol = sys.search(Sj1);
    if (!sol)
      throw PreconditionFailed(
          "swap_steps: no exposing vector reaches the swapped face");
    out.steps[j - 1] = std::move(*sol);
    out.steps[j] = seq.steps[j - 1];
    out.faces[j] = {L.n(), sorted_union(seq.faces[j - 1].zero_set, Sj1)};
  } else {
    throw PreconditionFailed("swap_steps: neither step exposes a singleton");
  }
  auto rep = verify_sequence_lp(L, out);
  if (!rep.valid || !rep.minimal)
    throw InternalError("swap_steps: output failed verification");
  return out;
}

RemovalResult remove_variable(const LinearSet& L, const FRSequenceLP& seq,
                              int var) {
  if (var < 0 || var >= L.n())
    throw InvalidArgument("variable index out of range");
  require_valid_minimal(L, seq, "remove_variable");
  const auto& fz = seq.faces.back().zero_set;
  if (!std::binary_search(fz.begin(), fz.end(), var))
    throw NotRedundant("variable is not zeroed by the sequence");
  size_t jstar = 0;
  while (!std::binary_search(seq.faces[jstar].zero_set.begin(),
                             seq.faces[jstar].zero_set.end(), var))
    ++jstar;

  RemovalResult res;
  res.reduced.A = RatMatrix(L.m(), L.n() - 1);
  for (int r = 0; r < L.m(); ++r)
    for (int i = 0, c = 0; i < L.n(); ++i)
      if (i != var) res.reduced.A.at(r, c++) = L.A.at(r, i);
  res.reduced.b = L.b;

  auto drop_face = [&](const OrthantFace& f) {
    OrthantFace g{L.n() - 1, {}};
    for (int z : f.zero_set)
      if (z != var) g.zero_set.push_back(z < var ? z : z - 1);
    return g;
  };
  auto drop_vec = [&](const RatVec& w) {
    RatVec out;
    out.reserve(w.size() - 1);
    for (int i = 0; i < static_cast<int>(w.size()); ++i)
      if (i != var) out.push_back(w[i]);
    return out;
  };

  bool singleton = false;
  if (jstar > 0) {
    const auto S = sorted_diff(seq.faces[jstar].zero_set,
                               seq.faces[jstar - 1].zero_set);
    singleton = S.size() == 1;
  }

  if (singleton) {
    res.removal_case = 1;
    for (size_t k = 0; k < seq.steps.size(); ++k) {
      if (k + 1 == jstar) continue;
      res.seq.steps.push_back({seq.steps[k].y, drop_vec(seq.steps[k].w)});
    }
    for (size_t k = 0; k < seq.faces.size(); ++k) {
      if (k == jstar) continue;
      res.seq.faces.push_back(drop_face(seq.faces[k]));
    }
    // Minimality survives exactly when the removed coordinate's unit vector
    // was itself attainable as A^T y with b^T y = 0.
    LpTask probe;
    probe.num_vars = L.m();
    probe.objective.assign(L.m(), Rational(0));
    for (int i = 0; i < L.n(); ++i) {
      RatVec row(L.m());
      for (int r = 0; r < L.m(); ++r) row[r] = L.A.at(r, i);
      probe.equalities.push_back(
          {std::move(row), Rational(i == var ? 1 : 0)});
    }
    if (!all_zero(L.b)) {
      RatVec row(L.m());
      for (int r = 0; r < L.m(); ++r) row[r] = L.b[r];
      probe.equalities.push_back({std::move(row), Rational(0)});
    }
    res.minimal_out = lp_solve(probe).status == LpStatus::Optimal;
  } else {
    res.removal_case = 2;
    for (const auto& st : seq.steps)
      res.seq.steps.push_back({st.y, drop_vec(st.w)});
    for (const auto& f : seq.faces) res.seq.faces.push_back(drop_face(f));
    res.minimal_out = true;
  }

  auto rep = verify_sequence_lp(res.reduced, res.seq);
  if (!rep.valid)
    throw InternalError("remove_variable: output failed verification");
  if (res.minimal_out && !rep.minimal)
    throw InternalError("remove_variable: promised minimality does not hold");
  return res;
}

int brute_force_msd(const LinearSet& L, int cap_n, FRSequenceLP* witness) {
  L.validate();
  const int n = L.n();
  if (n > cap_n || n > 63)
    throw TooLarge("brute_force_msd: instance exceeds the cap");
  // memo: zero-set mask -> (longest chain below, best first exposed set)
  std::unordered_map<uint64_t, std::pair<int, uint64_t>> memo;

  auto realizable = [&](uint64_t zero_mask, uint64_t dmask) {
    OrthantFace f{n, {}};
    std::vector<int> D;
    for (int i = 0; i < n; ++i) {
      if (zero_mask >> i & 1)
        f.zero_set.push_back(i);
      else if (dmask >> i & 1)
        D.push_back(i);
    }
    return solve_support_system(L, f, D);
  };

  auto dfs = [&](auto&& self, uint64_t zero_mask) -> int {
    auto it = memo.find(zero_mask);
    if (it != memo.end()) return it->second.first;
    uint64_t supp_mask = ~zero_mask & ((uint64_t{1} << n) - 1);
    int best = 0;
    uint64_t best_d = 0;
    for (uint64_t d = supp_mask; d != 0; d = (d - 1) & supp_mask) {
      if (!realizable(zero_mask, d)) continue;
      int v = 1 + self(self, zero_mask | d);
      if (v > best) {
        best = v;
        best_d = d;
      }
    }
    memo[zero_mask] = {best, best_d};
    return best;
  };

  const int msd = dfs(dfs, 0);
  if (witness) {
    witness->steps.clear();
    witness->faces.assign(1, OrthantFace::full(n));
    uint64_t zero_mask = 0;
    for (int k = 0; k < msd; ++k) {
      const uint64_t d = memo.at(zero_mask).second;
      auto y = realizable(zero_mask, d);
      if (!y) throw InternalError("brute_force_msd: witness step vanished");
      LpExposingVector st{*y, L.A.tmul(*y)};
      zero_mask |= d;
      OrthantFace f{n, {}};
      for (int i = 0; i < n; ++i)
        if (zero_mask >> i & 1) f.zero_set.push_back(i);
      witness->steps.push_back(std::move(st));
      witness->faces.push_back(std::move(f));
    }
  }
  return msd;
}

bool realizable_exposed_set(const LinearSet& L, const OrthantFace& face,
                            const std::vector<int>& D) {
  L.validate();
  face.validate();
  if (face.n != L.n())
    throw DimensionMismatch("face dimension does not match the system");
  if (D.empty()) throw InvalidArgument("candidate exposed set is empty");
  std::vector<int> d = D;
  std::sort(d.begin(), d.end());
  if (std::adjacent_find(d.begin(), d.end()) != d.end())
    throw InvalidArgument("candidate exposed set has duplicates");
  const auto supp = face.support();
  for (int i : d)
    if (!std::binary_search(supp.begin(), supp.end(), i))
      throw InvalidArgument("candidate exposed set leaves the support");
  return solve_support_system(L, face, d).has_value();
}

std::optional<long> msd_upper_bound_blocks(
    const std::vector<std::vector<int>>& columns, int dup) {
  if (columns.empty()) throw InvalidArgument("no columns given");
  if (dup != 2 * static_cast<int>(columns.size()))
    throw InvalidArgument("dup must be twice the column count");
  const size_t p = columns[0].size();
  if (p == 0) throw InvalidArgument("columns are empty");
  long total = 0;
  bool any_zero = false;
  int max_ones = 0;
  for (const auto& col : columns) {
    if (col.size() != p) throw InvalidArgument("column lengths differ");
    int ones = 0;
    for (int v : col) {
      if (v != 0 && v != 1) throw InvalidArgument("columns must be 0/1");
      ones += v;
    }
    if (ones == 0) any_zero = true;
    max_ones = std::max(max_ones, ones);
    total += ones + dup - 1;
  }
  if (!any_zero) return total;
  if (max_ones <= 3) return static_cast<long>(dup + 2) * (dup / 2 - 1);
  return std::nullopt;
}

OrthantFace minimal_cone_lp(const LinearSet& L) {
  L.validate();
  const int n = L.n();
  const int m = L.m();
  auto base_task = [&](int extra) {
    LpTask t;
    t.num_vars = n + extra;
    t.objective.assign(n + extra, Rational(0));
    for (int r = 0; r < m; ++r) {
      RatVec row(n + extra, Rational(0));
      for (int i = 0; i < n; ++i) row[i] = L.A.at(r, i);
      t.equalities.push_back({std::move(row), L.b[r]});
    }
    for (int i = 0; i < n; ++i) {
      RatVec row(n + extra, Rational(0));
      row[i] = 1;
      t.inequalities_geq.push_back({std::move(row), Rational(0)});
    }
    return t;
  };
  if (lp_solve(base_task(0)).status != LpStatus::Optimal)
    throw EmptyFeasibleSet("the feasible region is empty");

  std::vector<int> U(n);
  for (int i = 0; i < n; ++i) U[i] = i;
  while (!U.empty()) {
    const int u = static_cast<int>(U.size());
    LpTask t = base_task(u);
    for (int k = 0; k < u; ++k) {
      t.objective[n + k] = 1;
      RatVec cap(n + u, Rational(0));  // t_k <= x_{U_k}
      cap[U[k]] = 1;
      cap[n + k] = -1;
      t.inequalities_geq.push_back({std::move(cap), Rational(0)});
      RatVec lo(n + u, Rational(0));  // t_k >= 0
      lo[n + k] = 1;
      t.inequalities_geq.push_back({std::move(lo), Rational(0)});
      RatVec hi(n + u, Rational(0));  // t_k <= 1
      hi[n + k] = -1;
      t.inequalities_geq.push_back({std::move(hi), Rational(-1)});
    }
    auto res = lp_solve(t);
    if (res.status != LpStatus::Optimal)
      throw InternalError("minimal_cone_lp: support probe failed");
    if (sgn(res.value) == 0) break;
    std::vector<int> keep;
    for (int k = 0; k < u; ++k)
      if (sgn(res.point[n + k]) == 0) keep.push_back(U[k]);
    if (keep.size() == U.size())
      throw InternalError("minimal_cone_lp: no progress");
    U = std::move(keep);
  }
  return {n, U};
}

}  // namespace frtk
