#include "frtk/sat_reduce.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "frtk/errors.hpp"

namespace frtk {
namespace {

bool tautological(const Clause& c) {
  return c[0] == -c[1] || c[0] == -c[2] || c[1] == -c[2];
}

bool contains_literal(const Clause& c, int lit) {
  return c[0] == lit || c[1] == lit || c[2] == lit;
}

Assignment assignment_from_mask(int p, long mask) {
  Assignment a;
  a.values.resize(p);
  for (int i = 0; i < p; ++i) a.values[i] = (mask >> i) & 1;
  return a;
}

}  // namespace

void CnfInstance::validate() const {
  if (p < 0) throw MalformedTask("negative variable count");
  for (const Clause& c : clauses) {
    for (int lit : c) {
      if (lit == 0) throw MalformedTask("zero literal in a clause");
      if (std::abs(lit) > p)
        throw MalformedTask("variable index exceeds the variable count");
    }
    if (c[0] == c[1] || c[0] == c[2] || c[1] == c[2])
      throw MalformedTask("repeated literal in a clause");
  }
  if (!original_vars.empty() && static_cast<int>(original_vars.size()) != p)
    throw DimensionMismatch("original_vars length disagrees with p");
}

CnfInstance parse_dimacs(const std::string& text) {
  struct Tok {
    std::string s;
    int line, col;
  };
  std::vector<Tok> toks;
  {
    std::istringstream ss(text);
    std::string ln;
    int line = 1;
    bool stop = false;
    while (!stop && std::getline(ss, ln)) {
      size_t first = ln.find_first_not_of(" \t\r");
      if (first != std::string::npos && ln[first] == 'c') {
        ++line;
        continue;
      }
      size_t c = 0;
      while (c < ln.size()) {
        while (c < ln.size() && std::isspace(static_cast<unsigned char>(ln[c])))
          ++c;
        if (c >= ln.size()) break;
        size_t start = c;
        while (c < ln.size() &&
               !std::isspace(static_cast<unsigned char>(ln[c])))
          ++c;
        std::string t = ln.substr(start, c - start);
        if (t == "%") {  // conventional end-of-file marker
          stop = true;
          break;
        }
        toks.push_back({std::move(t), line, static_cast<int>(start) + 1});
      }
      ++line;
    }
  }

  auto as_int = [](const Tok& tk) {
    long v = 0;
    auto [ptr, ec] =
        std::from_chars(tk.s.data(), tk.s.data() + tk.s.size(), v);
    if (ec != std::errc() || ptr != tk.s.data() + tk.s.size())
      throw ParseError("expected an integer, got '" + tk.s + "'", tk.line,
                       tk.col);
    return v;
  };

  if (toks.size() < 4 || toks[0].s != "p" || toks[1].s != "cnf")
    throw ParseError("missing 'p cnf <vars> <clauses>' header",
                     toks.empty() ? 1 : toks[0].line,
                     toks.empty() ? 1 : toks[0].col);
  long vars = as_int(toks[2]);
  long count = as_int(toks[3]);
  if (vars < 0 || count < 0)
    throw ParseError("header counts must be nonnegative", toks[2].line,
                     toks[2].col);

  CnfInstance out;
  out.p = static_cast<int>(vars);
  std::vector<int> lits;
  int open_line = 0, open_col = 0;
  for (size_t t = 4; t < toks.size(); ++t) {
    long v = as_int(toks[t]);
    if (v == 0) {
      if (lits.empty())
        throw ParseError("empty clause", toks[t].line, toks[t].col);
      if (lits.size() != 3)
        throw NonTernaryClause("clause must have exactly three literals",
                               open_line, open_col);
      for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b)
          if (lits[a] == lits[b])
            throw NonTernaryClause("repeated literal in a clause", open_line,
                                   open_col);
      out.clauses.push_back({lits[0], lits[1], lits[2]});
      lits.clear();
      continue;
    }
    if (std::abs(v) > vars)
      throw ParseError("variable index out of range", toks[t].line,
                       toks[t].col);
    if (lits.empty()) {
      open_line = toks[t].line;
      open_col = toks[t].col;
    }
    lits.push_back(static_cast<int>(v));
  }
  if (!lits.empty())
    throw ParseError("unterminated clause at end of input", open_line,
                     open_col);
  if (static_cast<long>(out.clauses.size()) != count)
    throw ParseError("clause count disagrees with the header", toks[3].line,
                     toks[3].col);
  return out;
}

CnfInstance preprocess(const CnfInstance& cnf) {
  cnf.validate();
  std::vector<Clause> cl = cnf.clauses;

  bool changed = true;
  while (changed) {
    changed = false;
    size_t before = cl.size();
    cl.erase(std::remove_if(cl.begin(), cl.end(), tautological), cl.end());
    if (cl.size() != before) changed = true;

    std::vector<int> pos(cnf.p + 1, 0), neg(cnf.p + 1, 0);
    for (const Clause& c : cl)
      for (int lit : c) ++(lit > 0 ? pos[lit] : neg[-lit]);
    for (int v = 1; v <= cnf.p && !changed; ++v) {
      int drop = 0;  // literal whose clauses become satisfied
      if (pos[v] == 0 && neg[v] > 0) drop = -v;   // v fixed false
      if (neg[v] == 0 && pos[v] > 0) drop = v;    // v fixed true
      if (drop == 0) continue;
      cl.erase(std::remove_if(
                   cl.begin(), cl.end(),
                   [&](const Clause& c) { return contains_literal(c, drop); }),
               cl.end());
      changed = true;
    }
  }

  std::vector<int> newid(cnf.p + 1, 0);
  for (const Clause& c : cl)
    for (int lit : c) newid[std::abs(lit)] = 1;
  std::vector<int> survivors;
  for (int v = 1; v <= cnf.p; ++v)
    if (newid[v]) {
      survivors.push_back(v);
      newid[v] = static_cast<int>(survivors.size());
    }

  CnfInstance out;
  out.p = static_cast<int>(survivors.size());
  out.preprocessed = true;
  out.clauses.reserve(cl.size());
  for (Clause c : cl) {
    for (int& lit : c) lit = lit > 0 ? newid[lit] : -newid[-lit];
    out.clauses.push_back(c);
  }
  out.original_vars.reserve(survivors.size());
  for (int v : survivors)
    out.original_vars.push_back(
        cnf.original_vars.empty() ? v : cnf.original_vars[v - 1]);
  return out;
}

CnfInstance duplicate_clauses(const CnfInstance& cnf) {
  if (!cnf.preprocessed)
    throw NotPreprocessed("duplication requires a preprocessed formula");
  cnf.validate();
  const int qt = cnf.q();
  CnfInstance out;
  out.p = cnf.p;
  out.preprocessed = true;
  out.original_vars = cnf.original_vars;
  out.dup_factor = qt;
  out.clauses.reserve(static_cast<size_t>(2) * qt * qt);
  for (int j = 0; j < qt; ++j)
    for (int copy = 0; copy < 2 * qt; ++copy) out.clauses.push_back(cnf.clauses[j]);
  return out;
}

int IndexUniverse::index_of(const std::array<int, 3>& t) const {
  auto it = lookup.find(t);
  if (it == lookup.end())
    throw InvalidArgument("triple is not in the index universe");
  return it->second;
}

ReductionInstance build_msd_sdp(const CnfInstance& cnf) {
  cnf.validate();
  if (!cnf.preprocessed)
    throw NotPreprocessed("the reduction requires a preprocessed formula");
  for (const Clause& c : cnf.clauses)
    if (tautological(c))
      throw NotPreprocessed("clause contains a variable and its negation");
  if (cnf.q() == 0)
    throw MalformedTask("the reduction needs at least one clause");

  ReductionInstance R;
  R.cnf = cnf;
  R.p = cnf.p;
  R.q = cnf.q();
  R.q_tilde = cnf.dup_factor;
  R.d = R.p + R.q;

  for (int k = 1; k <= 2; ++k)
    for (int j = 1; j <= R.q; ++j) {
      std::array<int, 3> vars;
      for (int t = 0; t < 3; ++t) vars[t] = std::abs(cnf.clauses[j - 1][t]);
      std::sort(vars.begin(), vars.end());
      for (int i : vars) R.universe.triples.push_back({i, j, k});
    }
  R.universe.triples.push_back({0, 0, 0});
  for (int idx = 0; idx < R.universe.size(); ++idx)
    R.universe.lookup.emplace(R.universe.triples[idx], idx);

  R.pos_cells.resize(R.p);
  R.neg_cells.resize(R.p);
  R.pair_cells.resize(R.p);
  for (int j = 1; j <= R.q; ++j)
    for (int lit : cnf.clauses[j - 1]) {
      int v = std::abs(lit);
      (lit > 0 ? R.pos_cells : R.neg_cells)[v - 1].push_back({v, j, 1});
      R.pair_cells[v - 1].push_back({v, j, 2});
    }

  const int n = R.universe.size();
  const int corner = R.universe.corner();
  R.sdp.n = n;
  R.sdp.b.assign(2 * R.p + R.q, 0.0);
  R.sdp.labels = R.universe.triples;
  R.sdp.mats.assign(2 * R.p + R.q, SparseSym(n));
  for (int i = 1; i <= R.p; ++i) {
    for (const auto& t : R.pos_cells[i - 1]) {
      int x = R.universe.index_of(t);
      R.sdp.mats[i - 1].add(x, x, 1.0);
    }
    for (const auto& t : R.neg_cells[i - 1]) {
      int x = R.universe.index_of(t);
      R.sdp.mats[R.p + i - 1].add(x, x, 1.0);
    }
    for (const auto& t : R.pair_cells[i - 1]) {
      int x = R.universe.index_of(t);
      R.sdp.mats[i - 1].add(x, x, 1.0);
      R.sdp.mats[R.p + i - 1].add(x, x, 1.0);
    }
  }
  for (int j = 1; j <= R.q; ++j) {
    SparseSym& A = R.sdp.mats[2 * R.p + j - 1];
    for (int lit : cnf.clauses[j - 1]) {
      int v = std::abs(lit);
      int lit_cell = R.universe.index_of({v, j, 1});
      int pair_cell = R.universe.index_of({v, j, 2});
      A.add(lit_cell, lit_cell, 1.0);
      A.add(pair_cell, corner, 1.0);
    }
  }
  R.sdp.validate();
  return R;
}

bool satisfies(const CnfInstance& cnf, const Assignment& a) {
  if (static_cast<int>(a.values.size()) != cnf.p)
    throw DimensionMismatch("assignment length disagrees with the variable count");
  for (const Clause& c : cnf.clauses) {
    bool sat = false;
    for (int lit : c)
      if ((lit > 0) == static_cast<bool>(a.values[std::abs(lit) - 1])) {
        sat = true;
        break;
      }
    if (!sat) return false;
  }
  return true;
}

std::vector<std::vector<int>> literal_matrix(const ReductionInstance& R,
                                             const Assignment& a) {
  if (static_cast<int>(a.values.size()) != R.p)
    throw DimensionMismatch("assignment length disagrees with the variable count");
  std::vector<std::vector<int>> M(R.p, std::vector<int>(R.q, 0));
  for (int j = 0; j < R.q; ++j)
    for (int lit : R.cnf.clauses[j]) {
      int v = std::abs(lit);
      if ((lit > 0) == static_cast<bool>(a.values[v - 1])) M[v - 1][j] = 1;
    }
  return M;
}

FRSequenceSDP assignment_to_sequence(const ReductionInstance& R,
                                     const Assignment& a) {
  if (static_cast<int>(a.values.size()) != R.p)
    throw DimensionMismatch("assignment length disagrees with the variable count");
  for (int j = 0; j < R.q; ++j) {
    bool sat = false;
    for (int lit : R.cnf.clauses[j])
      if ((lit > 0) == static_cast<bool>(a.values[std::abs(lit) - 1]))
        sat = true;
    if (!sat)
      throw UnsatisfiedAssignment("assignment falsifies a clause", j + 1);
  }

  FRSequenceSDP seq;
  SdpFace cur = SdpFace::full(R.sdp.n);
  seq.faces.push_back(cur);
  const int m = R.sdp.m();
  auto push_step = [&](int idx) {
    SdpExposingVector E;
    E.y = Eigen::VectorXd::Zero(m);
    E.y(idx) = 1.0;
    E.W = R.sdp.mats[idx].dense();
    cur = apply_fr_step(cur, E);
    seq.steps.push_back(std::move(E));
    seq.faces.push_back(cur);
  };
  // A false variable spends its positive-side matrix, a true one its
  // negative side; either wipes the variable's pairing cells.
  for (int i = 1; i <= R.p; ++i)
    push_step(a.values[i - 1] ? R.p + i - 1 : i - 1);
  for (int j = 1; j <= R.q; ++j) push_step(2 * R.p + j - 1);
  return seq;
}

LinearSet reduced_lp_for_assignment(const ReductionInstance& R,
                                    const Assignment& a) {
  if (static_cast<int>(a.values.size()) != R.p)
    throw DimensionMismatch("assignment length disagrees with the variable count");
  std::vector<int> S;
  for (int i = 1; i <= R.p; ++i) {
    const auto& cells = a.values[i - 1] ? R.pos_cells[i - 1] : R.neg_cells[i - 1];
    for (const auto& t : cells) S.push_back(R.universe.index_of(t));
  }
  S.push_back(R.universe.corner());

  SdpProblem sub;
  sub.n = R.sdp.n;
  sub.b.assign(R.p + R.q, 0.0);
  sub.labels = R.sdp.labels;
  sub.mats.reserve(R.p + R.q);
  for (int i = 1; i <= R.p; ++i)
    sub.mats.push_back(R.sdp.mats[a.values[i - 1] ? i - 1 : R.p + i - 1]);
  for (int j = 1; j <= R.q; ++j) sub.mats.push_back(R.sdp.mats[2 * R.p + j - 1]);

  SdpProblem rest =
      simplify_blockdiag(sub, SdpFace::from_support(R.sdp.n, std::move(S)));
  auto L = sdp_to_lp_if_diagonal(rest);
  if (!L) throw InternalError("restricted reduction is not diagonal");
  return *L;
}

namespace {

// For duplicated instances: every surviving cell block is all-ones on its
// rows, so each nonzero block contributes at most ones + 2 q_tilde - 1 steps
// and zero blocks contribute nothing. Sound for any assignment.
long assignment_bound(const ReductionInstance& R,
                      const std::vector<std::vector<int>>& M) {
  const int dup = 2 * R.q_tilde;
  long ub = R.p;
  for (int jt = 0; jt < R.q_tilde; ++jt) {
    int col = jt * dup;
    int ones = 0;
    for (int i = 0; i < R.p; ++i) ones += M[i][col];
    if (ones > 0) ub += ones + dup - 1;
  }
  return ub;
}

}  // namespace

long exact_msd_of_reduction(const ReductionInstance& R, long budget,
                            int jobs) {
  if (jobs < 1) throw InvalidArgument("jobs must be positive");
  if (R.p >= 62 || (1L << R.p) > budget)
    throw BudgetExceeded("assignment enumeration exceeds the budget");
  const long total = 1L << R.p;
  std::atomic<long> best{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;

  auto worker = [&](int tid) {
    try {
      for (long mask = tid; mask < total && !failed.load(); mask += jobs) {
        Assignment a = assignment_from_mask(R.p, mask);
        if (R.q_tilde > 0) {
          auto M = literal_matrix(R, a);
          if (assignment_bound(R, M) <= best.load()) continue;
        }
        long val = R.p + msd_lp(reduced_lp_for_assignment(R, a));
        long cur = best.load();
        while (val > cur && !best.compare_exchange_weak(cur, val)) {
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mu);
      if (!error) error = std::current_exception();
      failed.store(true);
    }
  };

  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return best.load();
}

CertifyReport certify(const CnfInstance& cnf, long budget, int jobs) {
  CnfInstance pre = cnf.preprocessed ? cnf : preprocess(cnf);
  CertifyReport rep;
  if (pre.q() == 0) {
    rep.trivialized = true;
    rep.satisfiable = true;
    rep.msd = 0;
    rep.d = 0;
    return rep;
  }
  if (pre.p >= 62 || (1L << pre.p) > budget)
    throw BudgetExceeded("assignment enumeration exceeds the budget");

  CnfInstance dup = duplicate_clauses(pre);
  ReductionInstance R = build_msd_sdp(dup);
  rep.d = R.d;
  rep.msd = exact_msd_of_reduction(R, budget, jobs);

  std::optional<Assignment> sat;
  for (long mask = 0; mask < (1L << pre.p) && !sat; ++mask) {
    Assignment a = assignment_from_mask(pre.p, mask);
    if (satisfies(pre, a)) sat = std::move(a);
  }
  rep.satisfiable = sat.has_value();
  if (sat) {
    rep.witness_assignment = *sat;
    rep.witness_sequence = assignment_to_sequence(R, *sat);
    if (!verify_sequence_sdp(R.sdp, *rep.witness_sequence).valid)
      throw InternalError("witness sequence failed verification");
  }
  if ((rep.msd >= rep.d) != rep.satisfiable)
    throw ClaimViolated("degree criterion disagrees with satisfiability");
  return rep;
}

}  // namespace frtk
