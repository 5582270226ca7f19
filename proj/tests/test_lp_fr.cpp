#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "frtk/errors.hpp"
#include "frtk/lp_fr.hpp"

using namespace frtk;
using fixtures::incidence_lp;

namespace {

Rational q(long num, long den = 1) { return rat(num, den); }

LinearSet rows(int n, const std::vector<std::pair<RatVec, Rational>>& rs) {
  LinearSet L;
  L.A = RatMatrix(static_cast<int>(rs.size()), n);
  for (int r = 0; r < L.A.rows(); ++r) {
    for (int c = 0; c < n; ++c) L.A.at(r, c) = rs[r].first[c];
    L.b.push_back(rs[r].second);
  }
  return L;
}

}  // namespace

TEST_CASE("orthant face support and validation") {
  OrthantFace f{5, {1, 3}};
  CHECK(f.support() == std::vector<int>{0, 2, 4});
  CHECK(OrthantFace::full(3).support() == std::vector<int>{0, 1, 2});
  CHECK_THROWS_AS((OrthantFace{3, {2, 1}}.validate()), InvalidArgument);
  CHECK_THROWS_AS((OrthantFace{3, {3}}.validate()), InvalidArgument);
}

TEST_CASE("find_exposing certifies or rules out a reduction step") {
  auto L = fixtures::sum_zero_instance();
  auto w = find_exposing(L, OrthantFace::full(2));
  REQUIRE(w.has_value());
  CHECK(w->w == RatVec{q(1, 2), q(1, 2)});
  CHECK(L.A.tmul(w->y) == w->w);

  CHECK_FALSE(find_exposing(fixtures::slater_instance(), OrthantFace::full(2))
                  .has_value());

  // Normalization: support entries sum to 1 even on a sub-face.
  LinearSet L3 = rows(3, {{{q(1), q(1), q(-1)}, q(0)}, {{q(0), q(0), q(1)}, q(0)}});
  auto w3 = find_exposing(L3, OrthantFace{3, {2}});
  REQUIRE(w3.has_value());
  CHECK(w3->w[0] + w3->w[1] == q(1));
  CHECK(sgn(w3->w[0]) >= 0);
  CHECK(sgn(w3->w[1]) >= 0);
}

TEST_CASE("find_minimal_exposing cannot be shrunk") {
  // x1 + x2 = 0 forces both coordinates together: neither e1 nor e2 lies in
  // the admissible cone alone.
  auto L = fixtures::sum_zero_instance();
  auto w = find_minimal_exposing(L, OrthantFace::full(2));
  REQUIRE(w.has_value());
  CHECK(exposed_set(OrthantFace::full(2), w->w) == std::vector<int>{0, 1});
  CHECK(is_minimal_step(L, OrthantFace::full(2), *w));

  // Worked 2x3 example: the minimal first step must also pass the drop test.
  auto Lx = fixtures::two_by_three_example();
  auto wx = find_minimal_exposing(Lx, OrthantFace::full(4));
  REQUIRE(wx.has_value());
  CHECK(is_minimal_step(Lx, OrthantFace::full(4), *wx));
}

TEST_CASE("first minimal step of a 2x3 all-ones block is one row or column") {
  auto L = incidence_lp(fixtures::all_ones_matrix(2, 3));
  auto w = find_minimal_exposing(L, OrthantFace::full(6));
  REQUIRE(w.has_value());
  auto T = exposed_set(OrthantFace::full(6), w->w);
  // Cells in row-major order: rows are {0,1,2} and {3,4,5}; columns are
  // {0,3}, {1,4}, {2,5}. A minimal exposed set is one full row or column.
  const std::vector<std::vector<int>> blocks = {
      {0, 1, 2}, {3, 4, 5}, {0, 3}, {1, 4}, {2, 5}};
  bool is_block = false;
  for (const auto& b : blocks) is_block = is_block || T == b;
  CHECK(is_block);
  CHECK(T.size() >= 2);
  CHECK(T.size() <= 3);
}

TEST_CASE("is_minimal_step rejects oversized steps and bad certificates") {
  auto L = incidence_lp(fixtures::all_ones_matrix(2, 2));
  // Sum of the two row functionals exposes every cell at once.
  LpExposingVector big;
  big.y = {q(1), q(1), q(0), q(0)};
  big.w = L.A.tmul(big.y);
  CHECK_FALSE(is_minimal_step(L, OrthantFace::full(4), big));

  LpExposingVector bad = big;
  bad.w[0] += 1;  // breaks w = A^T y
  CHECK_THROWS_AS(is_minimal_step(L, OrthantFace::full(4), bad),
                  InvalidCertificate);

  LpExposingVector zero;
  zero.y.assign(4, q(0));
  zero.w.assign(4, q(0));
  CHECK_THROWS_AS(is_minimal_step(L, OrthantFace::full(4), zero),
                  InvalidCertificate);
}

TEST_CASE("fra_minimal walks to the minimal cone") {
  auto L = incidence_lp(fixtures::all_ones_matrix(2, 3));
  auto seq = fra_minimal(L, OrthantFace::full(6));
  CHECK(seq.steps.size() == 4);  // p + q - 1
  CHECK(seq.faces.front().zero_set.empty());
  CHECK(seq.faces.back().zero_set.size() == 6);
  auto rep = verify_sequence_lp(L, seq);
  CHECK(rep.valid);
  CHECK(rep.minimal);

  CHECK(fra_minimal(fixtures::slater_instance(), OrthantFace::full(2))
            .steps.empty());
}

TEST_CASE("fra_minimal is deterministic and seed-reproducible") {
  auto L = fixtures::two_by_three_example();
  auto a = fra_minimal(L, OrthantFace::full(4));
  auto b = fra_minimal(L, OrthantFace::full(4));
  REQUIRE(a.steps.size() == b.steps.size());
  for (size_t i = 0; i < a.steps.size(); ++i) {
    CHECK(a.steps[i].w == b.steps[i].w);
    CHECK(a.steps[i].y == b.steps[i].y);
  }
  auto s7a = fra_minimal(L, OrthantFace::full(4), 7);
  auto s7b = fra_minimal(L, OrthantFace::full(4), 7);
  REQUIRE(s7a.steps.size() == s7b.steps.size());
  for (size_t i = 0; i < s7a.steps.size(); ++i)
    CHECK(s7a.steps[i].w == s7b.steps[i].w);
}

TEST_CASE("msd_lp matches the brute-force oracle on the worked example") {
  auto L = fixtures::two_by_three_example();
  CHECK(brute_force_msd(L) == 4);
  CHECK(msd_lp(L) == 4);
}

TEST_CASE("msd_lp on thin all-ones blocks") {
  CHECK(msd_lp(incidence_lp(fixtures::all_ones_matrix(3, 1))) == 3);
  CHECK(msd_lp(incidence_lp(fixtures::all_ones_matrix(1, 4))) == 4);
}

TEST_CASE("sd_lp is 0 or 1 with a maximum-support witness") {
  CHECK(sd_lp(fixtures::slater_instance()).sd == 0);

  auto r = sd_lp(fixtures::sum_zero_instance());
  CHECK(r.sd == 1);
  REQUIRE(r.max_support_step.has_value());
  CHECK(exposed_set(OrthantFace::full(2), r.max_support_step->w) ==
        std::vector<int>{0, 1});

  // The all-ones 2x3 instance has singularity degree 1: the sum of row
  // functionals exposes every cell, even though its MSD is 4.
  auto L = incidence_lp(fixtures::all_ones_matrix(2, 3));
  auto r2 = sd_lp(L);
  CHECK(r2.sd == 1);
  REQUIRE(r2.max_support_step.has_value());
  CHECK(exposed_set(OrthantFace::full(6), r2.max_support_step->w).size() == 6);
}

TEST_CASE("verify_sequence_lp flags tampered sequences") {
  auto L = incidence_lp(fixtures::all_ones_matrix(2, 2));
  auto seq = fra_minimal(L, OrthantFace::full(4));
  REQUIRE(seq.steps.size() == 3);

  auto tampered = seq;
  tampered.steps[1].w[0] += 1;
  auto rep = verify_sequence_lp(L, tampered);
  CHECK_FALSE(rep.valid);
  CHECK(rep.diagnoses[1] == "w != A^T y");

  auto zeroed = seq;
  zeroed.steps[1].y.assign(zeroed.steps[1].y.size(), q(0));
  zeroed.steps[1].w.assign(zeroed.steps[1].w.size(), q(0));
  CHECK_FALSE(verify_sequence_lp(L, zeroed).valid);

  auto chopped = seq;
  chopped.faces.pop_back();
  CHECK_FALSE(verify_sequence_lp(L, chopped).valid);

  // A valid but non-minimal sequence: single max-support step.
  auto sd = sd_lp(L);
  REQUIRE(sd.sd == 1);
  FRSequenceLP onestep;
  onestep.faces.push_back(OrthantFace::full(4));
  onestep.faces.push_back({4, {0, 1, 2, 3}});
  onestep.steps.push_back(*sd.max_support_step);
  auto rep2 = verify_sequence_lp(L, onestep);
  CHECK(rep2.valid);
  CHECK_FALSE(rep2.minimal);
}

TEST_CASE("swap_steps exchanges adjacent blocks in both directions") {
  // L^perp = span{(1,1,0), (0,0,1)}: the produced minimal sequence exposes
  // {0,1} first, then {2}.
  LinearSet L = rows(3, {{{q(1), q(1), q(0)}, q(0)}, {{q(0), q(0), q(1)}, q(0)}});
  auto seq = fra_minimal(L, OrthantFace::full(3));
  REQUIRE(seq.steps.size() == 2);
  REQUIRE(seq.faces[1].zero_set == std::vector<int>{0, 1});

  // Singleton second block: the swap needs a feasibility solve for the new
  // first step exposing {2} at the full face.
  auto swapped = swap_steps(L, seq, 1);
  CHECK(swapped.steps.size() == 2);
  CHECK(swapped.faces[1].zero_set == std::vector<int>{2});
  CHECK(swapped.faces[2].zero_set == std::vector<int>{0, 1, 2});
  auto rep = verify_sequence_lp(L, swapped);
  CHECK(rep.valid);
  CHECK(rep.minimal);

  // Swapping back starts from a singleton first block; length, minimality,
  // and the endpoints survive, only the intermediate face changes.
  auto back = swap_steps(L, swapped, 1);
  CHECK(back.faces[1].zero_set == std::vector<int>{0, 1});
  CHECK(verify_sequence_lp(L, back).valid);
}

TEST_CASE("swap_steps rejects out-of-range and non-applicable calls") {
  LinearSet L = rows(3, {{{q(1), q(1), q(0)}, q(0)}, {{q(0), q(0), q(1)}, q(0)}});
  auto seq = fra_minimal(L, OrthantFace::full(3));
  CHECK_THROWS_AS(swap_steps(L, seq, 0), InvalidArgument);
  CHECK_THROWS_AS(swap_steps(L, seq, 2), InvalidArgument);

  // Two adjacent non-singleton blocks with no exposing vector reaching the
  // swapped face: u + v pairs must leave together.
  LinearSet L2 = rows(4, {{{q(1), q(1), q(-1), q(-1)}, q(0)},
                          {{q(0), q(0), q(1), q(1)}, q(0)}});
  auto seq2 = fra_minimal(L2, OrthantFace::full(4));
  REQUIRE(seq2.steps.size() == 2);
  REQUIRE(seq2.faces[1].zero_set.size() == 2);
  CHECK_THROWS_AS(swap_steps(L2, seq2, 1), PreconditionFailed);
}

TEST_CASE("remove_variable case one drops the singleton step") {
  LinearSet L = rows(3, {{{q(1), q(1), q(0)}, q(0)}, {{q(0), q(0), q(1)}, q(0)}});
  auto seq = fra_minimal(L, OrthantFace::full(3));
  REQUIRE(seq.faces[1].zero_set == std::vector<int>{0, 1});

  // Variable 2 leaves in the singleton block {2}.
  auto res = remove_variable(L, seq, 2);
  CHECK(res.removal_case == 1);
  CHECK(res.minimal_out);  // e_3 = (0,0,1) is a constraint row itself
  CHECK(res.seq.steps.size() == seq.steps.size() - 1);
  CHECK(res.reduced.A.cols() == 2);
  auto rep = verify_sequence_lp(res.reduced, res.seq);
  CHECK(rep.valid);
  CHECK(rep.minimal);
}

TEST_CASE("remove_variable case one can lose minimality") {
  // L^perp = span{(1,1,0), (1,0,1)}. The produced minimal sequence exposes
  // {0,1} then {2}; removing variable 2 hits the singleton case with
  // e_3 not in L^perp, so the truncated sequence is valid but not minimal:
  // in the reduced system the surviving step exposes {0,1} while {0} alone
  // is already realizable.
  LinearSet L = rows(3, {{{q(1), q(1), q(0)}, q(0)}, {{q(1), q(0), q(1)}, q(0)}});
  auto seq = fra_minimal(L, OrthantFace::full(3));
  REQUIRE(seq.steps.size() == 2);
  REQUIRE(seq.faces[1].zero_set == std::vector<int>{0, 1});

  auto res = remove_variable(L, seq, 2);
  CHECK(res.removal_case == 1);
  CHECK_FALSE(res.minimal_out);
  CHECK(res.seq.steps.size() == 1);
  auto rep = verify_sequence_lp(res.reduced, res.seq);
  CHECK(rep.valid);
  CHECK_FALSE(rep.minimal);
}

TEST_CASE("remove_variable case two keeps all steps and minimality") {
  LinearSet L = rows(3, {{{q(1), q(1), q(0)}, q(0)}, {{q(0), q(0), q(1)}, q(0)}});
  auto seq = fra_minimal(L, OrthantFace::full(3));
  // Variable 0 leaves in the size-2 block {0,1}.
  auto res = remove_variable(L, seq, 0);
  CHECK(res.removal_case == 2);
  CHECK(res.minimal_out);
  CHECK(res.seq.steps.size() == seq.steps.size());
  auto rep = verify_sequence_lp(res.reduced, res.seq);
  CHECK(rep.valid);
  CHECK(rep.minimal);
}

TEST_CASE("remove_variable rejects non-redundant variables") {
  // Only {0,1} is zeroed; variable 2 carries the feasible ray (0,0,t).
  LinearSet L = rows(3, {{{q(1), q(1), q(0)}, q(0)}});
  auto seq = fra_minimal(L, OrthantFace::full(3));
  REQUIRE(seq.faces.back().zero_set == std::vector<int>{0, 1});
  CHECK_THROWS_AS(remove_variable(L, seq, 2), NotRedundant);
  CHECK_THROWS_AS(remove_variable(L, seq, 5), InvalidArgument);
}

TEST_CASE("brute_force_msd enforces its cap") {
  LinearSet L;
  L.A = RatMatrix(1, 13);
  for (int i = 0; i < 13; ++i) L.A.at(0, i) = 1;
  L.b.assign(1, q(0));
  CHECK_THROWS_AS(brute_force_msd(L), TooLarge);
  CHECK_THROWS_AS(brute_force_msd(L, 12), TooLarge);
}

TEST_CASE("realizable_exposed_set matches hand analysis") {
  auto L = fixtures::sum_zero_instance();
  auto F = OrthantFace::full(2);
  CHECK(realizable_exposed_set(L, F, {0, 1}));
  CHECK_FALSE(realizable_exposed_set(L, F, {0}));
  CHECK_FALSE(realizable_exposed_set(L, F, {1}));
  CHECK_THROWS_AS(realizable_exposed_set(L, F, {}), InvalidArgument);
  CHECK_THROWS_AS(realizable_exposed_set(L, F, {0, 0}), InvalidArgument);
  CHECK_THROWS_AS(realizable_exposed_set(L, F, {5}), InvalidArgument);
}

TEST_CASE("msd_upper_bound_blocks formulas and applicability") {
  // All nonzero columns: sum of (ones + dup - 1).
  auto b1 = msd_upper_bound_blocks({{1, 0}, {1, 1}}, 4);
  REQUIRE(b1.has_value());
  CHECK(*b1 == (1 + 3) + (2 + 3));

  // Single all-ones column with p = 2 and dup = 2: bound 3 = allone MSD.
  auto b2 = msd_upper_bound_blocks({{1, 1}}, 2);
  REQUIRE(b2.has_value());
  CHECK(*b2 == 3);

  // Zero column present, all columns at most 3 ones.
  auto b3 = msd_upper_bound_blocks({{0, 0, 0}, {1, 1, 1}}, 4);
  REQUIRE(b3.has_value());
  CHECK(*b3 == (4 + 2) * (4 / 2 - 1));

  // Zero column present but another column has 4 ones: neither case applies.
  CHECK_FALSE(msd_upper_bound_blocks({{0, 0, 0, 0}, {1, 1, 1, 1}}, 4)
                  .has_value());

  CHECK_THROWS_AS(msd_upper_bound_blocks({}, 2), InvalidArgument);
  CHECK_THROWS_AS(msd_upper_bound_blocks({{1}}, 4), InvalidArgument);
  CHECK_THROWS_AS(msd_upper_bound_blocks({{2}}, 2), InvalidArgument);
}

TEST_CASE("item-1 bound dominates brute force on assembled instances") {
  const std::vector<std::vector<std::vector<int>>> fixtures_cols = {
      {{1}},            // p=1, q~=1, n=2
      {{1, 1}},         // p=2, q~=1, n=4
      {{1, 0}, {0, 1}}, // p=2, q~=2, n=8
      {{1, 0}, {1, 1}}, // p=2, q~=2, n=12
  };
  for (const auto& cols : fixtures_cols) {
    const int dup = 2 * static_cast<int>(cols.size());
    auto bound = msd_upper_bound_blocks(cols, dup);
    REQUIRE(bound.has_value());
    auto L = incidence_lp(fixtures::duplicated_matrix(cols, dup));
    CHECK(brute_force_msd(L, 12) <= *bound);
  }
}

TEST_CASE("minimal_cone_lp finds the smallest containing face") {
  auto mz = minimal_cone_lp(fixtures::sum_zero_instance());
  CHECK(mz.zero_set == std::vector<int>{0, 1});

  CHECK(minimal_cone_lp(fixtures::slater_instance()).zero_set.empty());

  auto L = fixtures::two_by_three_example();
  CHECK(minimal_cone_lp(L).zero_set.size() == 4);

  LinearSet bad = rows(1, {{{q(1)}, q(-1)}});
  CHECK_THROWS_AS(minimal_cone_lp(bad), EmptyFeasibleSet);

  // Inhomogeneous case: x1 + x2 = 1 meets the open quadrant.
  LinearSet affine = rows(3, {{{q(1), q(1), q(0)}, q(1)},
                              {{q(0), q(0), q(1)}, q(0)}});
  CHECK(minimal_cone_lp(affine).zero_set == std::vector<int>{2});
}

TEST_CASE("minimal cone equals the final face of fra_minimal") {
  std::mt19937_64 rng(91);
  for (int t = 0; t < 25; ++t) {
    auto L = fixtures::random_feasible(rng, 6, 3);
    auto seq = fra_minimal(L, OrthantFace::full(L.n()));
    auto cone = minimal_cone_lp(L);
    CHECK(seq.faces.back().zero_set == cone.zero_set);
  }
}

TEST_CASE("inhomogeneous systems reduce correctly") {
  // (1, 0, 0) is the only feasible point: the two equalities force
  // 2 x2 + x3 = 0, so one step exposes {1, 2} and the chain stops.
  LinearSet L = rows(3, {{{q(1), q(1), q(1)}, q(1)},
                         {{q(1), q(-1), q(0)}, q(1)}});
  auto seq = fra_minimal(L, OrthantFace::full(3));
  auto rep = verify_sequence_lp(L, seq);
  CHECK(rep.valid);
  CHECK(rep.minimal);
  CHECK(seq.faces.back().zero_set == std::vector<int>{1, 2});
  CHECK(static_cast<int>(seq.steps.size()) == brute_force_msd(L));
  for (const auto& st : seq.steps) {
    Rational bty(0);
    for (int r = 0; r < L.m(); ++r) bty += L.b[r] * st.y[r];
    CHECK(sgn(bty) == 0);
  }
}
