#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "frtk/errors.hpp"
#include "frtk/sat_reduce.hpp"

using namespace frtk;

namespace {

// Single clause u1 or u2 or not-u3. Preprocessing would trivialize it (u1
// never occurs negated), so the flag is set by hand to study the raw
// construction on a formula small enough to check entry by entry.
CnfInstance worked_example() {
  CnfInstance c;
  c.p = 3;
  c.clauses = {{1, 2, -3}};
  c.preprocessed = true;
  return c;
}

// Smallest instance where every variable occurs with both polarities.
CnfInstance polarity_pair() {
  CnfInstance c;
  c.p = 3;
  c.clauses = {{1, 2, 3}, {-1, -2, -3}};
  return c;
}

Assignment make_assignment(std::initializer_list<bool> vals) {
  Assignment a;
  a.values.assign(vals);
  return a;
}

CnfInstance random_cnf(std::mt19937_64& rng, int p, int q,
                       bool with_tautology) {
  std::uniform_int_distribution<int> var(1, p);
  std::uniform_int_distribution<int> coin(0, 1);
  CnfInstance c;
  c.p = p;
  while (c.q() < q) {
    int a = var(rng), b = var(rng), d = var(rng);
    if (a == b || a == d || b == d) continue;
    c.clauses.push_back({coin(rng) ? a : -a, coin(rng) ? b : -b,
                         coin(rng) ? d : -d});
  }
  if (with_tautology && p >= 2) {
    int v = var(rng);
    int w = v == 1 ? 2 : 1;
    c.clauses.push_back({v, -v, w});
  }
  return c;
}

bool brute_sat(const CnfInstance& c) {
  for (long mask = 0; mask < (1L << c.p); ++mask) {
    Assignment a;
    a.values.resize(c.p);
    for (int i = 0; i < c.p; ++i) a.values[i] = (mask >> i) & 1;
    if (satisfies(c, a)) return true;
  }
  return false;
}

// Assignments are found by scanning masks; callers needing a satisfying one
// use this and skip unsatisfiable draws.
std::optional<Assignment> first_satisfying(const CnfInstance& c) {
  for (long mask = 0; mask < (1L << c.p); ++mask) {
    Assignment a;
    a.values.resize(c.p);
    for (int i = 0; i < c.p; ++i) a.values[i] = (mask >> i) & 1;
    if (satisfies(c, a)) return a;
  }
  return std::nullopt;
}

std::vector<int> face_support(const SdpFace& F) {
  REQUIRE(F.block_support.has_value());
  return *F.block_support;
}

}  // namespace

TEST_CASE("parse_dimacs reads the standard format") {
  auto c = parse_dimacs("p cnf 3 1\n1 2 -3 0\n");
  CHECK(c.p == 3);
  REQUIRE(c.q() == 1);
  CHECK(c.clauses[0] == Clause{1, 2, -3});
  CHECK_FALSE(c.preprocessed);

  auto multi = parse_dimacs(
      "c header comment\np cnf 4 2\nc mid comment\n1 -2\n3 0\n-3 -4 2 0\n");
  REQUIRE(multi.q() == 2);
  CHECK(multi.clauses[0] == Clause{1, -2, 3});
  CHECK(multi.clauses[1] == Clause{-3, -4, 2});

  // The conventional trailer: a '%' line ends the input.
  auto tail = parse_dimacs("p cnf 2 1\n1 -2 2 0\n%\n0\n");
  CHECK(tail.q() == 1);

  // A variable next to its own negation parses; preprocess removes it later.
  auto taut = parse_dimacs("p cnf 2 1\n1 -1 2 0\n");
  CHECK(taut.clauses[0] == Clause{1, -1, 2});
}

TEST_CASE("parse_dimacs rejects malformed input with positions") {
  CHECK_THROWS_AS(parse_dimacs(""), ParseError);
  CHECK_THROWS_AS(parse_dimacs("p dnf 2 1\n1 2 0\n"), ParseError);
  CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n1 x 2 0\n"), ParseError);
  CHECK_THROWS_AS(parse_dimacs("p cnf 3 1\n1 2 4 0\n"), ParseError);
  CHECK_THROWS_AS(parse_dimacs("p cnf 3 2\n1 2 3 0\n"), ParseError);
  CHECK_THROWS_AS(parse_dimacs("p cnf 3 1\n1 2 3\n"), ParseError);

  try {
    parse_dimacs("p cnf 3 2\n1 2 3 0\n0\n");
    FAIL("empty clause accepted");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
  }

  CHECK_THROWS_AS(parse_dimacs("p cnf 4 1\n1 2 3 4 0\n"), NonTernaryClause);
  CHECK_THROWS_AS(parse_dimacs("p cnf 4 1\n1 2 0\n"), NonTernaryClause);
  CHECK_THROWS_AS(parse_dimacs("p cnf 4 1\n1 1 2 0\n"), NonTernaryClause);
}

TEST_CASE("preprocess removes tautologies and one-sided variables") {
  // u1 occurs only positively: it is fixed true and the clause vanishes.
  auto triv = preprocess(parse_dimacs("p cnf 3 1\n1 2 -3 0\n"));
  CHECK(triv.preprocessed);
  CHECK(triv.q() == 0);
  CHECK(triv.p == 0);

  // The tautology goes first; what remains is one-sided and cascades away.
  auto casc = preprocess(parse_dimacs("p cnf 3 2\n1 -1 2 0\n1 2 3 0\n"));
  CHECK(casc.q() == 0);

  // A both-polarity kernel survives untouched up to renumbering.
  auto pair = preprocess(polarity_pair());
  CHECK(pair.preprocessed);
  CHECK(pair.p == 3);
  REQUIRE(pair.q() == 2);
  CHECK(pair.clauses == polarity_pair().clauses);
  CHECK(pair.original_vars == std::vector<int>{1, 2, 3});
  // Idempotent on its own output.
  auto again = preprocess(pair);
  CHECK(again.clauses == pair.clauses);
  CHECK(again.original_vars == pair.original_vars);

  // Renumbering records the surviving input variables.
  // Variable 2 appears only in the dropped clause: survivors are 1, 3, 4.
  CnfInstance gap;
  gap.p = 4;
  gap.clauses = {{1, 3, 4}, {-1, -3, -4}, {2, 1, 3}};
  auto g = preprocess(gap);
  CHECK(g.p == 3);
  CHECK(g.q() == 2);
  CHECK(g.original_vars == std::vector<int>{1, 3, 4});
  CHECK(g.clauses[0] == Clause{1, 2, 3});

  // Every surviving variable occurs with both polarities; no tautologies.
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    auto raw = random_cnf(rng, 3 + static_cast<int>(rng() % 2),
                          1 + static_cast<int>(rng() % 6), trial % 3 == 0);
    auto out = preprocess(raw);
    CHECK(out.preprocessed);
    CHECK(brute_sat(raw) == (out.q() == 0 ? true : brute_sat(out)));
    std::vector<int> pos(out.p + 1, 0), neg(out.p + 1, 0);
    for (const Clause& cl : out.clauses) {
      CHECK(std::abs(cl[0]) != std::abs(cl[1]));
      CHECK(std::abs(cl[0]) != std::abs(cl[2]));
      CHECK(std::abs(cl[1]) != std::abs(cl[2]));
      for (int lit : cl) ++(lit > 0 ? pos[lit] : neg[-lit]);
    }
    for (int v = 1; v <= out.p; ++v) {
      CHECK(pos[v] > 0);
      CHECK(neg[v] > 0);
    }
  }
}

TEST_CASE("duplicate_clauses repeats each clause 2q times in blocks") {
  auto pair = preprocess(polarity_pair());
  auto dup = duplicate_clauses(pair);
  CHECK(dup.dup_factor == 2);
  REQUIRE(dup.q() == 8);
  for (int c = 0; c < 4; ++c) CHECK(dup.clauses[c] == pair.clauses[0]);
  for (int c = 4; c < 8; ++c) CHECK(dup.clauses[c] == pair.clauses[1]);

  CnfInstance one;
  one.p = 3;
  one.clauses = {{1, 2, -3}};
  one.preprocessed = true;
  auto d1 = duplicate_clauses(one);
  CHECK(d1.q() == 2);
  CHECK(d1.dup_factor == 1);

  CnfInstance raw = polarity_pair();
  CHECK_THROWS_AS(duplicate_clauses(raw), NotPreprocessed);
}

TEST_CASE("build_msd_sdp lays out the worked single-clause instance") {
  auto R = build_msd_sdp(worked_example());
  CHECK(R.p == 3);
  CHECK(R.q == 1);
  CHECK(R.d == 4);
  CHECK(R.sdp.n == 7);
  CHECK(R.sdp.m() == 7);
  CHECK(R.sdp.labels.size() == 7);

  // Literal cells by (clause, variable), then pairing cells, corner last.
  std::vector<std::array<int, 3>> expect = {{1, 1, 1}, {2, 1, 1}, {3, 1, 1},
                                            {1, 1, 2}, {2, 1, 2}, {3, 1, 2},
                                            {0, 0, 0}};
  CHECK(R.universe.triples == expect);
  CHECK(R.universe.corner() == 6);
  for (int i = 0; i < 7; ++i) CHECK(R.universe.index_of(expect[i]) == i);
  CHECK_THROWS_AS(R.universe.index_of({9, 9, 9}), InvalidArgument);

  // All entries are exact zeros and ones.
  for (const auto& A : R.sdp.mats)
    for (const auto& e : A.entries) CHECK(e.v == 1.0);
  for (double bi : R.sdp.b) CHECK(bi == 0.0);

  // The positive matrix and negative matrix of a variable overlap exactly
  // on its pairing cells.
  for (int i = 1; i <= 3; ++i) {
    auto dpos = R.sdp.mats[i - 1].dense();
    auto dneg = R.sdp.mats[3 + i - 1].dense();
    for (int x = 0; x < 7; ++x) {
      bool both = dpos.m(x, x) == 1.0 && dneg.m(x, x) == 1.0;
      bool pairing = R.universe.triples[x] ==
                     std::array<int, 3>{i, 1, 2};
      CHECK(both == pairing);
    }
  }

  // Membership pattern of the constraint span: a random y assembles to the
  // displayed 7x7 form and nothing else.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  Eigen::VectorXd y(7);
  for (int i = 0; i < 7; ++i) y(i) = unif(rng);
  auto W = assemble_w(R.sdp, y);
  CHECK(W.m(0, 0) == y(0) + y(6));
  CHECK(W.m(1, 1) == y(1) + y(6));
  CHECK(W.m(2, 2) == y(5) + y(6));  // negative occurrence of u3
  CHECK(W.m(3, 3) == y(0) + y(3));
  CHECK(W.m(4, 4) == y(1) + y(4));
  CHECK(W.m(5, 5) == y(2) + y(5));
  CHECK(W.m(6, 6) == 0.0);
  for (int x = 3; x <= 5; ++x) CHECK(W.m(x, 6) == y(6));
  for (int a = 0; a < 7; ++a)
    for (int b = a + 1; b < 7; ++b)
      if (!(a >= 3 && a <= 5 && b == 6)) CHECK(W.m(a, b) == 0.0);

  // The clause coupling block on pairing cells + corner has spectrum
  // {sqrt(3), 0, 0, -sqrt(3)}.
  auto A7 = R.sdp.mats[6].dense();
  SymMatrixF blk(4);
  std::vector<int> rows = {3, 4, 5, 6};
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) blk.set(a, b, A7.m(rows[a], rows[b]));
  auto eig = sym_eig(blk);
  CHECK(eig.values(0) == doctest::Approx(std::sqrt(3.0)));
  CHECK(eig.values(1) == doctest::Approx(0.0));
  CHECK(eig.values(2) == doctest::Approx(0.0));
  CHECK(eig.values(3) == doctest::Approx(-std::sqrt(3.0)));

  CHECK_THROWS_AS(build_msd_sdp(polarity_pair()), NotPreprocessed);
  CnfInstance taut;
  taut.p = 2;
  taut.clauses = {{1, -1, 2}};
  taut.preprocessed = true;
  CHECK_THROWS_AS(build_msd_sdp(taut), NotPreprocessed);
}

TEST_CASE("assignment_to_sequence walks the worked example support chain") {
  auto R = build_msd_sdp(worked_example());
  auto a = make_assignment({true, false, false});
  auto seq = assignment_to_sequence(R, a);
  REQUIRE(seq.steps.size() == 4);  // p + q

  // Step matrices: negative side of u1 (true), positive sides of u2 and u3
  // (false), then the clause matrix.
  std::vector<int> expect_idx = {3, 1, 2, 6};
  for (size_t s = 0; s < 4; ++s) {
    for (int i = 0; i < 7; ++i)
      CHECK(seq.steps[s].y(i) == (i == expect_idx[s] ? 1.0 : 0.0));
  }

  REQUIRE(seq.faces.size() == 5);
  CHECK(face_support(seq.faces[0]) == std::vector<int>{0, 1, 2, 3, 4, 5, 6});
  CHECK(face_support(seq.faces[1]) == std::vector<int>{0, 1, 2, 4, 5, 6});
  CHECK(face_support(seq.faces[2]) == std::vector<int>{0, 2, 5, 6});
  CHECK(face_support(seq.faces[3]) == std::vector<int>{0, 2, 6});
  CHECK(face_support(seq.faces[4]) == std::vector<int>{6});  // corner alone

  auto rep = verify_sequence_sdp(R.sdp, seq);
  CHECK(rep.valid);
  CHECK(rep.rank_drops == std::vector<int>{1, 2, 1, 2});
  CHECK(rep.minimal_certified == std::vector<bool>{true, false, true, false});

  // Support recursion: each face keeps exactly the zero-diagonal cells.
  for (size_t s = 0; s < 4; ++s) {
    std::vector<int> expect_next;
    for (int x : face_support(seq.faces[s]))
      if (seq.steps[s].W.m(x, x) == 0.0) expect_next.push_back(x);
    CHECK(face_support(seq.faces[s + 1]) == expect_next);
  }

  try {
    assignment_to_sequence(R, make_assignment({false, false, true}));
    FAIL("falsifying assignment accepted");
  } catch (const UnsatisfiedAssignment& e) {
    CHECK(e.clause == 1);
  }
  CHECK_THROWS_AS(assignment_to_sequence(R, make_assignment({true, false})),
                  DimensionMismatch);
}

TEST_CASE("reduced_lp_for_assignment yields the exact incidence system") {
  auto R = build_msd_sdp(worked_example());
  auto L = reduced_lp_for_assignment(R, make_assignment({true, false, false}));
  // True cells: (1,1,1) for u1 true, (3,1,1) for u3 false. The corner column
  // is zero everywhere and is dropped.
  REQUIRE(L.n() == 2);
  REQUIRE(L.m() == 4);
  std::vector<std::vector<int>> expect = {
      {1, 0}, {0, 0}, {0, 1}, {1, 1}};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 2; ++c)
      CHECK(L.A.at(r, c) == Rational(expect[r][c]));
  for (const auto& bi : L.b) CHECK(sgn(bi) == 0);

  // Against the shared incidence fixture: same degree for every assignment
  // (the cell orders differ; the degree is permutation invariant).
  auto pair = preprocess(polarity_pair());
  auto RP = build_msd_sdp(pair);
  for (long mask = 0; mask < 8; ++mask) {
    Assignment a;
    a.values = {static_cast<bool>(mask & 1), static_cast<bool>(mask & 2),
                static_cast<bool>(mask & 4)};
    auto Lr = reduced_lp_for_assignment(RP, a);
    auto M = literal_matrix(RP, a);
    auto Lf = fixtures::incidence_lp(M);
    CHECK(Lr.m() == Lf.m());
    CHECK(Lr.n() == Lf.n());
    CHECK(msd_lp(Lr) == msd_lp(Lf));

    // Row r < p marks the cells of variable r+1; row p + j those of
    // clause j+1. Cells are ordered by (clause, variable).
    std::vector<std::pair<int, int>> cells;
    for (int j = 1; j <= RP.q; ++j)
      for (const auto& t : RP.universe.triples)
        if (t[2] == 1 && t[1] == j && M[t[0] - 1][j - 1])
          cells.emplace_back(t[0], j);
    REQUIRE(static_cast<int>(cells.size()) == Lr.n());
    for (int r = 0; r < RP.p; ++r)
      for (size_t e = 0; e < cells.size(); ++e)
        CHECK(Lr.A.at(r, static_cast<int>(e)) ==
              Rational(cells[e].first == r + 1 ? 1 : 0));
    for (int j = 0; j < RP.q; ++j)
      for (size_t e = 0; e < cells.size(); ++e)
        CHECK(Lr.A.at(RP.p + j, static_cast<int>(e)) ==
              Rational(cells[e].second == j + 1 ? 1 : 0));
  }
}

TEST_CASE("exact_msd_of_reduction maximizes over assignments") {
  auto R = build_msd_sdp(worked_example());
  // Hand enumeration: the assignment making all three literals true gives
  // the all-ones 3x1 incidence block, degree 3; so the maximum is 3 + 3.
  CHECK(exact_msd_of_reduction(R) == 6);
  CHECK(exact_msd_of_reduction(R, 1 << 20, 2) == 6);
  CHECK_THROWS_AS(exact_msd_of_reduction(R, 4), BudgetExceeded);
  CHECK_THROWS_AS(exact_msd_of_reduction(R, 1 << 20, 0), InvalidArgument);
}

TEST_CASE("duplicated satisfiable instances reach the target degree") {
  auto dup = duplicate_clauses(preprocess(polarity_pair()));
  auto R = build_msd_sdp(dup);
  CHECK(R.q_tilde == 2);
  CHECK(R.sdp.n == 6 * 8 + 1);
  CHECK(R.sdp.m() == 2 * 3 + 8);
  CHECK(R.d == 11);

  auto a = first_satisfying(dup);
  REQUIRE(a.has_value());
  auto seq = assignment_to_sequence(R, *a);
  CHECK(seq.steps.size() == 11);
  auto rep = verify_sequence_sdp(R.sdp, seq);
  CHECK(rep.valid);
  CHECK(face_support(rep.final_face) == std::vector<int>{R.universe.corner()});

  long msd = exact_msd_of_reduction(R);
  CHECK(msd >= R.d);
  // Block bound: both columns nonzero with t and 3 - t ones, dup = 4, so
  // the degree is at most p + (t + 3) + (3 - t + 3) = 12.
  CHECK(msd <= R.p + 9);
}

TEST_CASE("reduction instances satisfy the structural laws") {
  std::mt19937_64 rng(2101);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  int built = 0;
  for (int trial = 0; trial < 200 && built < 25; ++trial) {
    auto pre = preprocess(random_cnf(rng, 3 + static_cast<int>(rng() % 3),
                                     1 + static_cast<int>(rng() % 8),
                                     trial % 4 == 0));
    if (pre.q() == 0) continue;
    ++built;
    auto R = build_msd_sdp(pre);
    CHECK(R.sdp.n == 6 * R.q + 1);
    CHECK(R.sdp.m() == 2 * R.p + R.q);
    CHECK(R.universe.triples.back() == std::array<int, 3>{0, 0, 0});
    CHECK(std::is_sorted(
        R.universe.triples.begin(), R.universe.triples.end() - 1,
        [](const std::array<int, 3>& x, const std::array<int, 3>& y) {
          return std::array<int, 3>{x[2], x[1], x[0]} <
                 std::array<int, 3>{y[2], y[1], y[0]};
        }));
    for (const auto& A : R.sdp.mats)
      for (const auto& e : A.entries) CHECK(e.v == 1.0);

    // Sparsity law: a random span member has variable+clause sums on the
    // literal diagonal, variable pair sums on the pairing diagonal, the
    // clause coefficient on the pairing-corner border, zeros elsewhere.
    Eigen::VectorXd y(R.sdp.m());
    for (int i = 0; i < R.sdp.m(); ++i) y(i) = unif(rng);
    auto W = assemble_w(R.sdp, y);
    auto positive = [&](int i, int j) {
      for (const auto& t : R.pos_cells[i - 1])
        if (t[1] == j) return true;
      return false;
    };
    const int n = R.sdp.n;
    for (int x = 0; x < n; ++x) {
      auto t = R.universe.triples[x];
      double want = 0.0;
      if (t[2] == 1)
        want = y(positive(t[0], t[1]) ? t[0] - 1 : R.p + t[0] - 1) +
               y(2 * R.p + t[1] - 1);
      else if (t[2] == 2)
        want = y(t[0] - 1) + y(R.p + t[0] - 1);
      CHECK(W.m(x, x) == want);
    }
    for (int xa = 0; xa < n; ++xa)
      for (int xb = xa + 1; xb < n; ++xb) {
        auto ta = R.universe.triples[xa];
        double want = 0.0;
        if (xb == R.universe.corner() && ta[2] == 2)
          want = y(2 * R.p + ta[1] - 1);
        CHECK(W.m(xa, xb) == want);
      }
  }
  CHECK(built == 25);
}

TEST_CASE("assignment chains stay block-diagonal with the support recursion") {
  std::mt19937_64 rng(915);
  int done = 0;
  for (int trial = 0; trial < 40 && done < 5; ++trial) {
    auto pre = preprocess(random_cnf(rng, 3 + static_cast<int>(rng() % 2),
                                     2 + static_cast<int>(rng() % 5), false));
    if (pre.q() == 0) continue;
    auto sat = first_satisfying(pre);
    if (!sat) continue;
    ++done;
    auto R = build_msd_sdp(pre);
    auto seq = assignment_to_sequence(R, *sat);
    CHECK(static_cast<int>(seq.steps.size()) == R.p + R.q);
    for (size_t s = 0; s + 1 < seq.faces.size(); ++s) {
      std::vector<int> next;
      for (int x : face_support(seq.faces[s]))
        if (seq.steps[s].W.m(x, x) == 0.0) next.push_back(x);
      CHECK(face_support(seq.faces[s + 1]) == next);
    }
    CHECK(face_support(seq.faces.back()) ==
          std::vector<int>{R.universe.corner()});
    CHECK(verify_sequence_sdp(R.sdp, seq).valid);
  }
  CHECK(done == 5);
}

TEST_CASE("certify decides small instances end to end") {
  // Trivialized: preprocessing empties the formula.
  auto triv = certify(parse_dimacs("p cnf 3 1\n1 2 -3 0\n"));
  CHECK(triv.trivialized);
  CHECK(triv.satisfiable);
  CHECK(triv.msd == 0);
  CHECK(triv.d == 0);
  CHECK_FALSE(triv.witness_assignment.has_value());

  // Satisfiable kernel: degree reaches d = p + 2 q~^2 and the witness is a
  // verified sequence of that length.
  auto rep = certify(polarity_pair());
  CHECK_FALSE(rep.trivialized);
  CHECK(rep.satisfiable);
  CHECK(rep.d == 11);
  CHECK(rep.msd >= 11);
  REQUIRE(rep.witness_assignment.has_value());
  REQUIRE(rep.witness_sequence.has_value());
  CHECK(rep.witness_sequence->steps.size() == 11);
  CHECK(satisfies(preprocess(polarity_pair()), *rep.witness_assignment));

  // Preprocessing folds into certify: an extra one-sided clause changes
  // nothing about the kernel decision.
  CnfInstance padded = polarity_pair();
  padded.p = 4;
  padded.clauses.push_back({4, 1, 2});
  auto rep2 = certify(padded);
  CHECK(rep2.satisfiable);
  CHECK(rep2.d == 11);
  CHECK(rep2.msd == rep.msd);

  CHECK_THROWS_AS(certify(polarity_pair(), 4), BudgetExceeded);
}
