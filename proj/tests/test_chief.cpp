#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "gfrref/chief.hpp"
#include "gfrref/generate.hpp"
#include "gfrref/jobs.hpp"
#include "gfrref/matrix.hpp"

using namespace gfrref;

namespace {

const FieldSpec kF3(3);

// The 6x6 reference input used throughout the task-level tests, assembled
// here as one matrix instead of four blocks.
const Matrix kC6 = mat_build(6, 6,
                             {{0, 2, 2, 0, 1, 0},
                              {0, 2, 2, 1, 2, 2},
                              {1, 0, 1, 0, 2, 1},
                              {2, 0, 1, 0, 2, 2},
                              {0, 1, 1, 2, 1, 1},
                              {1, 2, 2, 2, 0, 0}});

EchelonizeOptions opts(std::size_t block, int threads = 1,
                       bool with_transform = true) {
  EchelonizeOptions o;
  o.block = block;
  o.threads = threads;
  o.with_transform = with_transform;
  return o;
}

std::map<TaskKind, int> kind_counts(const RunReport& rep) {
  std::map<TaskKind, int> counts;
  for (const TraceRecord& t : rep.trace) counts[t.kind]++;
  return counts;
}

// Check the defining identity of a sequential elimination result directly:
// M maps the selected rows onto the reduced rows (-1 at pivot columns, the
// remnant elsewhere) and K plus the unit part annihilates the other rows.
void check_oracle_identity(const FieldSpec& f, const Matrix& C,
                           const EchResult& e) {
  const std::size_t m = C.rows(), n = C.cols(), r = e.gamma.size();
  REQUIRE(e.rho.universe == m);
  REQUIRE(e.gamma.universe == n);
  REQUIRE(e.rho.size() == r);
  REQUIRE(e.M.rows() == r);
  REQUIRE(e.M.cols() == r);
  REQUIRE(e.K.rows() == m - r);
  REQUIRE(e.K.cols() == r);
  REQUIRE(e.R.rows() == r);
  REQUIRE(e.R.cols() == n - r);

  const Matrix sel = take_rows(C, e.rho.members);
  const Matrix rest = take_rows(C, index_set_complement(e.rho).members);
  const Matrix top = mat_mul(f, e.M, sel);
  Matrix expected(r, n);
  const IndexSet gbar = index_set_complement(e.gamma);
  const Elem minus_one = f.neg(f.one());
  for (std::size_t p = 0; p < r; ++p) {
    expected.at(p, e.gamma.members[p]) = minus_one;
    for (std::size_t c = 0; c < gbar.size(); ++c)
      expected.at(p, gbar.members[c]) = e.R.at(p, c);
  }
  CHECK(mat_eq(top, expected));
  const Matrix bottom = mat_mul_add(f, rest, e.K, sel);
  CHECK(mat_eq(bottom, Matrix(m - r, n)));
}

}  // namespace

TEST_CASE("chop partitions rows and columns into block runs") {
  const ChopSpec cs = chop(6, 6, 3);
  CHECK(cs.a() == 2);
  CHECK(cs.b() == 2);
  CHECK(cs.row_parts == std::vector<std::size_t>{3, 3});
  CHECK(cs.col_parts == std::vector<std::size_t>{3, 3});
  CHECK(cs.rows() == 6);
  CHECK(cs.cols() == 6);
  CHECK(cs.row_offset(0) == 0);
  CHECK(cs.row_offset(1) == 3);
  CHECK(cs.col_offset(1) == 3);

  const ChopSpec uneven = chop(7, 7, 3);
  CHECK(uneven.row_parts == std::vector<std::size_t>{3, 3, 1});
  CHECK(uneven.col_parts == std::vector<std::size_t>{3, 3, 1});

  const ChopSpec head = chop(7, 7, 3, /*remainder_first=*/true);
  CHECK(head.row_parts == std::vector<std::size_t>{1, 3, 3});

  const ChopSpec single = chop(5, 4, 256);
  CHECK(single.a() == 1);
  CHECK(single.b() == 1);
  CHECK(single.row_parts == std::vector<std::size_t>{5});
  CHECK(single.col_parts == std::vector<std::size_t>{4});

  const ChopSpec empty_rows = chop(0, 5, 2);
  CHECK(empty_rows.a() == 0);
  CHECK(empty_rows.b() == 3);

  CHECK_THROWS_AS((void)chop(4, 4, 0), std::invalid_argument);

  // Offsets always telescope over the parts.
  for (std::size_t i = 0; i + 1 < uneven.a(); ++i)
    CHECK(uneven.row_offset(i + 1) ==
          uneven.row_offset(i) + uneven.row_parts[i]);
}

TEST_CASE("plan executes the expected task mix on a 2x2 grid") {
  RunReport rep;
  EchelonizeOptions o = opts(3);
  o.collect_trace = true;
  (void)echelonize(kC6, kF3, o, &rep);
  auto counts = kind_counts(rep);
  CHECK(counts[TaskKind::ClearDown] == 4);
  CHECK(counts[TaskKind::UpdateRow] == 2);
  CHECK(counts[TaskKind::UpdateRowTrafo] == 6);
  CHECK(counts[TaskKind::Extend] == 4);
  CHECK(counts[TaskKind::RowLengthen] == 4);
  CHECK(counts[TaskKind::Copy] == 2);
  CHECK(counts[TaskKind::PreClearUp] == 1);
  CHECK(counts[TaskKind::ClearUp] == 3);
  CHECK(rep.trace.size() == 26);

  RunReport rep2;
  EchelonizeOptions o2 = opts(3, 1, /*with_transform=*/false);
  o2.collect_trace = true;
  (void)echelonize(kC6, kF3, o2, &rep2);
  auto counts2 = kind_counts(rep2);
  CHECK(counts2[TaskKind::ClearDown] == 4);
  CHECK(counts2[TaskKind::UpdateRow] == 2);
  CHECK(counts2[TaskKind::UpdateRowTrafo] == 0);
  CHECK(counts2[TaskKind::Extend] == 4);
  CHECK(counts2[TaskKind::RowLengthen] == 0);
  CHECK(counts2[TaskKind::Copy] == 2);
  CHECK(counts2[TaskKind::PreClearUp] == 1);
  CHECK(counts2[TaskKind::ClearUp] == 1);
  CHECK(rep2.trace.size() == 14);
}

TEST_CASE("6x6 reference input: full blocked elimination output") {
  const EchelonOutput out = echelonize(kC6, kF3, opts(3));

  CHECK(out.rank == 5);
  REQUIRE(out.upsilon.size() == 2);
  CHECK(out.upsilon[0] == IndexSet(3, {0, 1, 2}));
  CHECK(out.upsilon[1] == IndexSet(3, {0, 2}));
  REQUIRE(out.varrho.size() == 2);
  CHECK(out.varrho[0] == IndexSet(3, {0, 1, 2}));
  CHECK(out.varrho[1] == IndexSet(3, {0, 2}));
  CHECK(out.global_upsilon() == std::vector<std::uint32_t>{0, 1, 2, 3, 5});
  CHECK(out.global_varrho() == std::vector<std::uint32_t>{0, 1, 2, 3, 5});

  REQUIRE(out.R_blocks.size() == 2);
  CHECK(out.R_blocks[0][0].rows() == 3);
  CHECK(out.R_blocks[0][0].cols() == 0);
  CHECK(mat_eq(out.R_blocks[0][1], mat_build(3, 1, {{0}, {0}, {1}})));
  CHECK(mat_eq(out.R_blocks[1][1], mat_build(2, 1, {{2}, {0}})));
  CHECK(mat_eq(out.assembled_R(),
               mat_build(5, 1, {{0}, {0}, {1}, {2}, {0}})));

  REQUIRE(out.with_transform);
  CHECK(mat_eq(out.T_M_blocks[0][0],
               mat_build(3, 3, {{1, 1, 2}, {1, 0, 2}, {0, 0, 1}})));
  CHECK(mat_eq(out.T_M_blocks[0][1],
               mat_build(3, 2, {{1, 1}, {2, 0}, {1, 0}})));
  CHECK(mat_eq(out.T_M_blocks[1][0],
               mat_build(2, 3, {{0, 1, 2}, {2, 2, 2}})));
  CHECK(mat_eq(out.T_M_blocks[1][1], mat_build(2, 2, {{1, 2}, {1, 2}})));
  CHECK(out.T_K_blocks[0][0].rows() == 0);
  CHECK(out.T_K_blocks[0][0].cols() == 3);
  CHECK(mat_eq(out.T_K_blocks[1][0], mat_build(1, 3, {{0, 1, 0}})));
  CHECK(mat_eq(out.T_K_blocks[1][1], mat_build(1, 2, {{0, 0}})));

  const Matrix t = materialize_transform(out);
  CHECK(mat_eq(t, mat_build(6, 6,
                            {{1, 1, 2, 1, 0, 1},
                             {1, 0, 2, 2, 0, 0},
                             {0, 0, 1, 1, 0, 0},
                             {0, 1, 2, 1, 0, 2},
                             {2, 2, 2, 1, 0, 2},
                             {0, 1, 0, 0, 1, 0}})));

  std::string diag;
  CHECK(verify(kC6, out, &diag));
  CHECK(diag.empty());
}

TEST_CASE("identity input reduces to the negated identity") {
  const std::size_t n = 6;
  Matrix id(n, n);
  for (std::size_t i = 0; i < n; ++i) id.at(i, i) = 1;
  const EchelonOutput out = echelonize(id, kF3, opts(2));
  CHECK(out.rank == n);
  CHECK(out.global_upsilon() == std::vector<std::uint32_t>{0, 1, 2, 3, 4, 5});
  CHECK(out.global_varrho() == std::vector<std::uint32_t>{0, 1, 2, 3, 4, 5});
  CHECK(out.assembled_R().cols() == 0);

  // The transformation is -1 times the identity, so diagonal grid blocks of
  // the M part are 2*I over GF(3) and off-diagonal blocks vanish.
  for (std::size_t j = 0; j < out.chop.b(); ++j) {
    for (std::size_t h = 0; h < out.chop.a(); ++h) {
      const Matrix& blk = out.T_M_blocks[j][h];
      Matrix want(blk.rows(), blk.cols());
      if (j == h)
        for (std::size_t d = 0; d < blk.rows(); ++d) want.at(d, d) = 2;
      CHECK(mat_eq(blk, want));
    }
  }
  Matrix two_id(n, n);
  for (std::size_t i = 0; i < n; ++i) two_id.at(i, i) = 2;
  CHECK(mat_eq(materialize_transform(out), two_id));
  CHECK(verify(id, out));
}

TEST_CASE("zero input has rank zero and an identity transformation") {
  const FieldSpec f5(5);
  const Matrix z(4, 5);
  const EchelonOutput out = echelonize(z, f5, opts(2));
  CHECK(out.rank == 0);
  for (const IndexSet& g : out.upsilon) CHECK(g.size() == 0);
  for (const IndexSet& r : out.varrho) CHECK(r.size() == 0);
  CHECK(out.assembled_R().rows() == 0);
  CHECK(out.assembled_R().cols() == 5);
  Matrix id4(4, 4);
  for (std::size_t i = 0; i < 4; ++i) id4.at(i, i) = 1;
  CHECK(mat_eq(materialize_transform(out), id4));
  CHECK(verify(z, out));
}

TEST_CASE("outputs are independent of the block size") {
  const FieldSpec f5(5);
  const Matrix C = random_matrix(f5, 20, 20, 0xb10cULL);
  const EchelonOutput base = echelonize(C, f5, opts(20));
  for (std::size_t block : {std::size_t(1), std::size_t(3), std::size_t(7),
                            std::size_t(13)}) {
    CAPTURE(block);
    const EchelonOutput out = echelonize(C, f5, opts(block));
    CHECK(out.rank == base.rank);
    CHECK(out.global_upsilon() == base.global_upsilon());
    CHECK(mat_eq(out.assembled_R(), base.assembled_R()));
    CHECK(verify(C, out));
  }

  const FieldSpec f7(7);
  const Matrix W = random_matrix(f7, 13, 17, 0x51deULL);
  const EchelonOutput wbase = echelonize(W, f7, opts(17));
  for (std::size_t block : {std::size_t(2), std::size_t(5)}) {
    CAPTURE(block);
    const EchelonOutput out = echelonize(W, f7, opts(block));
    CHECK(out.rank == wbase.rank);
    CHECK(out.global_upsilon() == wbase.global_upsilon());
    CHECK(mat_eq(out.assembled_R(), wbase.assembled_R()));
  }
}

TEST_CASE("outputs are identical across worker counts") {
  const Matrix C = random_matrix(kF3, 24, 24, 0x71ed5ULL);
  const EchelonOutput base = echelonize(C, kF3, opts(4, 1));
  for (int threads : {2, 4}) {
    CAPTURE(threads);
    const EchelonOutput out = echelonize(C, kF3, opts(4, threads));
    CHECK(out.rank == base.rank);
    CHECK(out.upsilon == base.upsilon);
    CHECK(out.varrho == base.varrho);
    REQUIRE(out.R_blocks.size() == base.R_blocks.size());
    for (std::size_t j = 0; j < base.R_blocks.size(); ++j)
      for (std::size_t l = j; l < base.R_blocks.size(); ++l)
        CHECK(mat_eq(out.R_blocks[j][l], base.R_blocks[j][l]));
    for (std::size_t j = 0; j < base.T_M_blocks.size(); ++j)
      for (std::size_t h = 0; h < base.T_M_blocks[j].size(); ++h)
        CHECK(mat_eq(out.T_M_blocks[j][h], base.T_M_blocks[j][h]));
    for (std::size_t i = 0; i < base.T_K_blocks.size(); ++i)
      for (std::size_t h = 0; h <= i; ++h)
        CHECK(mat_eq(out.T_K_blocks[i][h], base.T_K_blocks[i][h]));
  }
}

TEST_CASE("sequential reference elimination") {
  SUBCASE("3x3 example block") {
    const Matrix C = mat_build(3, 3, {{0, 2, 2}, {0, 2, 2}, {1, 0, 1}});
    const EchResult e = oracle_rref(kF3, C);
    CHECK(e.gamma == IndexSet(3, {0, 1}));
    CHECK(mat_eq(e.R, mat_build(2, 1, {{2}, {2}})));
    check_oracle_identity(kF3, C, e);
  }

  SUBCASE("agrees with the recursive elimination on the unique parts") {
    const FieldSpec f2(2);
    const Matrix C = random_matrix(f2, 8, 8, 0xdeadULL);
    const EchResult a = oracle_rref(f2, C);
    const EchResult b = ech(f2, C);
    CHECK(a.gamma == b.gamma);
    CHECK(mat_eq(a.R, b.R));
    check_oracle_identity(f2, C, a);
  }

  SUBCASE("identity holds across fields and shapes") {
    const FieldSpec f193(193);
    check_oracle_identity(f193, random_matrix(f193, 7, 9, 1),
                          oracle_rref(f193, random_matrix(f193, 7, 9, 1)));
    const FieldSpec f9(3, 2);
    check_oracle_identity(f9, random_matrix(f9, 6, 6, 2),
                          oracle_rref(f9, random_matrix(f9, 6, 6, 2)));
    const FieldSpec f1331(11, 3);
    check_oracle_identity(f1331, random_matrix(f1331, 4, 5, 3),
                          oracle_rref(f1331, random_matrix(f1331, 4, 5, 3)));
  }

  SUBCASE("degenerate shapes") {
    const EchResult a = oracle_rref(kF3, Matrix(0, 4));
    CHECK(a.gamma.size() == 0);
    CHECK(a.R.cols() == 4);
    const EchResult b = oracle_rref(kF3, Matrix(4, 0));
    CHECK(b.gamma.size() == 0);
    CHECK(b.K.rows() == 4);
  }
}

TEST_CASE("verification rejects tampered outputs") {
  EchelonOutput out = echelonize(kC6, kF3, opts(3));
  REQUIRE(verify(kC6, out));

  SUBCASE("remnant entry flipped") {
    out.R_blocks[0][1].at(2, 0) = 0;  // true value is 1
    std::string diag;
    CHECK_FALSE(verify(kC6, out, &diag));
    CHECK(diag.find("remnant differs") != std::string::npos);
    CHECK(diag.find("row 2") != std::string::npos);
    CHECK(diag.find("column 0") != std::string::npos);
  }

  SUBCASE("rank inflated") {
    out.rank = 6;
    std::string diag;
    CHECK_FALSE(verify(kC6, out, &diag));
    CHECK(diag == "select sets disagree with the reported rank");
  }

  SUBCASE("pivot column set shifted") {
    out.upsilon[1] = IndexSet(3, {0, 1});
    std::string diag;
    CHECK_FALSE(verify(kC6, out, &diag));
    CHECK(diag.find("pivot columns differ") != std::string::npos);
  }

  SUBCASE("transformation block tampered") {
    out.T_M_blocks[0][0].at(0, 0) = kF3.add(out.T_M_blocks[0][0].at(0, 0), 1);
    std::string diag;
    CHECK_FALSE(verify(kC6, out, &diag));
    CHECK(diag.find("transformed input differs") != std::string::npos);
  }
}

TEST_CASE("blocked elimination verifies across fields") {
  struct Case {
    FieldSpec f;
    std::size_t rows, cols, block;
  };
  const std::vector<Case> cases = {
      {FieldSpec(2), 12, 12, 5},
      {FieldSpec(193), 11, 14, 4},
      {FieldSpec(3, 2), 12, 12, 5},
      {FieldSpec(11, 3), 9, 7, 3},
  };
  std::uint64_t seed = 77;
  for (const Case& c : cases) {
    CAPTURE(c.f.order());
    const Matrix C = random_matrix(c.f, c.rows, c.cols, seed++);
    const EchelonOutput out = echelonize(C, c.f, opts(c.block, 2));
    std::string diag;
    CHECK(verify(C, out, &diag));
    CHECK(diag.empty());

    // Dropping the transformation must not change the unique parts.
    const EchelonOutput lean =
        echelonize(C, c.f, opts(c.block, 2, /*with_transform=*/false));
    CHECK(lean.rank == out.rank);
    CHECK(lean.upsilon == out.upsilon);
    CHECK(mat_eq(lean.assembled_R(), out.assembled_R()));
    CHECK(lean.T_M_blocks.empty());
    CHECK(verify(C, lean));
  }
}

TEST_CASE("generated matrices have the advertised rank structure") {
  const FieldSpec f5(5);
  const Matrix P = random_product_matrix(f5, 16, 16, 6, 42);
  const EchelonOutput out = echelonize(P, f5, opts(5));
  CHECK(out.rank <= 6);
  CHECK(verify(P, out));

  const FieldSpec f7(7);
  const Matrix W = well_conditioned_matrix(f7, 12, 43);
  const EchelonOutput wout = echelonize(W, f7, opts(4));
  CHECK(wout.rank == 12);
  CHECK(verify(W, wout));
}

TEST_CASE("empty inputs") {
  for (auto [rows, cols] : std::vector<std::pair<std::size_t, std::size_t>>{
           {0, 5}, {5, 0}, {0, 0}}) {
    CAPTURE(rows);
    CAPTURE(cols);
    const Matrix C(rows, cols);
    RunReport rep;
    EchelonizeOptions o = opts(2);
    o.collect_trace = true;
    const EchelonOutput out = echelonize(C, kF3, o, &rep);
    CHECK(out.rank == 0);
    CHECK(rep.trace.empty());
    CHECK(verify(C, out));
  }
}

TEST_CASE("recursion threshold does not change the result") {
  EchelonizeOptions deep = opts(3);
  deep.ech_threshold = 1;
  const EchelonOutput a = echelonize(kC6, kF3, deep);
  const EchelonOutput b = echelonize(kC6, kF3, opts(3));
  CHECK(a.rank == b.rank);
  CHECK(a.upsilon == b.upsilon);
  CHECK(mat_eq(a.assembled_R(), b.assembled_R()));
  for (std::size_t j = 0; j < a.T_M_blocks.size(); ++j)
    for (std::size_t h = 0; h < a.T_M_blocks[j].size(); ++h)
      CHECK(mat_eq(a.T_M_blocks[j][h], b.T_M_blocks[j][h]));
}

TEST_CASE("run report and trace carry pivot details") {
  RunReport rep;
  EchelonizeOptions o = opts(3);
  o.collect_trace = true;
  (void)echelonize(kC6, kF3, o, &rep);
  CHECK(rep.initial_live_bytes > 0);
  CHECK(rep.peak_live_bytes >= rep.initial_live_bytes);
  CHECK(rep.wall_ns >= 0);

  // Every pivot-hunting task reports how many new pivots it found, and the
  // per-column totals add up to the rank contribution of that column block.
  std::map<std::int32_t, int> new_pivots_by_column;
  for (const TraceRecord& t : rep.trace) {
    if (t.kind != TaskKind::ClearDown) continue;
    CHECK(t.detail >= 0);
    new_pivots_by_column[t.c1] += t.detail;
  }
  CHECK(new_pivots_by_column[0] == 3);
  CHECK(new_pivots_by_column[1] == 2);
}
