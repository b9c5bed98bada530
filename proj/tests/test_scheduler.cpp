#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "gfrref/scheduler.hpp"

using namespace gfrref;

namespace {

SlotKey key(PkgKind k, unsigned c0 = 0, unsigned c1 = 0, unsigned c2 = 0,
            unsigned version = 0) {
  SlotKey s;
  s.kind = k;
  s.c0 = std::uint16_t(c0);
  s.c1 = std::uint16_t(c1);
  s.c2 = std::uint16_t(c2);
  s.version = std::uint16_t(version);
  return s;
}

PackageValue scalar(Elem v) {
  Matrix m(1, 1);
  m.at(0, 0) = v;
  return m;
}

Elem scalar_of(const TaskGraph& g, std::int32_t slot_id) {
  const PackageValue* p = g.payload(slot_id);
  REQUIRE(p != nullptr);
  const Matrix& m = std::get<Matrix>(*p);
  REQUIRE(m.rows() == 1);
  REQUIRE(m.cols() == 1);
  return m.at(0, 0);
}

// ClearUp computes R + X*M; on 1x1 slots it is a convenient arithmetic node
// for exercising the scheduler with arbitrary dependency shapes.
std::int32_t add_cu(TaskGraph& g, std::int32_t r, std::int32_t x,
                    std::int32_t m, std::int32_t out, int priority = 0,
                    int c0 = -1, int c1 = -1, int c2 = -1) {
  TaskNode nd;
  nd.kind = TaskKind::ClearUp;
  nd.c0 = c0;
  nd.c1 = c1;
  nd.c2 = c2;
  nd.priority = priority;
  nd.in[0] = r;
  nd.in[1] = x;
  nd.in[2] = m;
  nd.n_in = 3;
  nd.out[0] = out;
  nd.n_out = 1;
  return g.plan_add(nd);
}

}  // namespace

TEST_CASE("a chain runs in order and computes the chained value") {
  TaskGraph g;
  g.set_field(FieldSpec(5));
  const auto x = g.add_input(key(PkgKind::X), scalar(2));
  const auto m = g.add_input(key(PkgKind::M), scalar(3));
  std::int32_t prev = g.add_input(key(PkgKind::R, 0), scalar(1));
  for (unsigned step = 1; step <= 4; ++step) {
    const auto out = g.require_slot(key(PkgKind::R, step));
    add_cu(g, prev, x, m, out, 0, int(step));
    prev = out;
  }
  const RunReport rep = run(g, RunOptions{1, true, false});
  // Each step adds 2*3 = 6 ≡ 1 (mod 5): 1 + 4 steps ≡ 0.
  CHECK(scalar_of(g, prev) == 0u);
  CHECK(rep.trace.size() == 4);
  for (std::size_t s = 0; s < rep.trace.size(); ++s) {
    CHECK(rep.trace[s].c0 == std::int32_t(s + 1));  // strict chain order
    CHECK(rep.trace[s].end_ns >= rep.trace[s].start_ns);
  }
}

TEST_CASE("a diamond joins both branches") {
  TaskGraph g;
  g.set_field(FieldSpec(7));
  const auto root = g.add_input(key(PkgKind::R, 0), scalar(1));
  const auto x1 = g.add_input(key(PkgKind::X, 1), scalar(2));
  const auto m1 = g.add_input(key(PkgKind::M, 1), scalar(3));
  const auto x2 = g.add_input(key(PkgKind::X, 2), scalar(4));
  const auto m2 = g.add_input(key(PkgKind::M, 2), scalar(5));
  const auto left = g.require_slot(key(PkgKind::R, 1));
  const auto right = g.require_slot(key(PkgKind::R, 2));
  const auto joined = g.require_slot(key(PkgKind::R, 3));
  add_cu(g, root, x1, m1, left);    // 1 + 6 = 0 mod 7
  add_cu(g, root, x2, m2, right);   // 1 + 20 = 0 mod 7
  add_cu(g, left, right, m1, joined);  // 0 + 0*3 = 0
  g.retain(left);
  g.retain(right);
  run(g, RunOptions{2, false, false});
  CHECK(scalar_of(g, left) == 0u);
  CHECK(scalar_of(g, right) == 0u);
  CHECK(scalar_of(g, joined) == 0u);
}

TEST_CASE("output slots accept exactly one producer") {
  TaskGraph g;
  g.set_field(FieldSpec(5));
  const auto r = g.add_input(key(PkgKind::R, 0), scalar(1));
  const auto x = g.add_input(key(PkgKind::X), scalar(1));
  const auto m = g.add_input(key(PkgKind::M), scalar(1));
  const auto out = g.require_slot(key(PkgKind::R, 1));
  add_cu(g, r, x, m, out);
  CHECK_THROWS_AS(add_cu(g, r, x, m, out), std::invalid_argument);
  // A born-ready slot cannot also be produced, and vice versa.
  CHECK_THROWS_AS(add_cu(g, r, x, m, r), std::invalid_argument);
  CHECK_THROWS_AS(g.add_input(key(PkgKind::R, 1), scalar(2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(g.add_input(key(PkgKind::R, 0), scalar(2)),
                  std::invalid_argument);
}

TEST_CASE("plan validation rejects malformed nodes") {
  TaskGraph g;
  g.set_field(FieldSpec(5));
  const auto r = g.add_input(key(PkgKind::R, 0), scalar(1));
  TaskNode nd;
  nd.kind = TaskKind::Copy;
  nd.in[0] = r;
  nd.n_in = 1;
  nd.n_out = 0;  // every task must produce something
  CHECK_THROWS_AS(g.plan_add(nd), std::invalid_argument);
  nd.n_out = 1;
  nd.out[0] = 99;  // unknown slot id
  CHECK_THROWS_AS(g.plan_add(nd), std::invalid_argument);
  CHECK_THROWS_AS(g.require_slot(key(PkgKind::R, 1u << 14)),
                  std::invalid_argument);
}

TEST_CASE("a dependency cycle is reported, not deadlocked") {
  TaskGraph g;
  g.set_field(FieldSpec(5));
  const auto x = g.add_input(key(PkgKind::X), scalar(1));
  const auto a = g.require_slot(key(PkgKind::R, 1));
  const auto b = g.require_slot(key(PkgKind::R, 2));
  add_cu(g, b, x, x, a);
  add_cu(g, a, x, x, b);
  CHECK_THROWS_WITH_AS(run(g, RunOptions{2, false, false}),
                       "cycle detected in task plan", std::runtime_error);
}

TEST_CASE("a never-produced slot is reported before running") {
  TaskGraph g;
  g.set_field(FieldSpec(5));
  const auto x = g.add_input(key(PkgKind::X), scalar(1));
  const auto hole = g.require_slot(key(PkgKind::R, 7));
  const auto out = g.require_slot(key(PkgKind::R, 8));
  add_cu(g, hole, x, x, out);
  CHECK_THROWS_WITH_AS(run(g, RunOptions{1, false, false}),
                       doctest::Contains("is never produced"),
                       std::runtime_error);
}

TEST_CASE("a failing task aborts the run with its coordinates") {
  TaskGraph g;
  g.set_field(FieldSpec(5));
  const auto r = g.add_input(key(PkgKind::R, 0), scalar(1));
  const auto x = g.add_input(key(PkgKind::X), scalar(1));
  const auto m = g.add_input(key(PkgKind::M), PackageValue(Matrix(2, 2)));
  const auto out = g.require_slot(key(PkgKind::R, 1));
  add_cu(g, r, x, m, out, 0, 7, 8, 9);  // 1x1 times 2x2: shape error
  CHECK_THROWS_WITH_AS(run(g, RunOptions{1, false, false}),
                       doctest::Contains("ClearUp(7,8,9)"),
                       std::runtime_error);
}

TEST_CASE("single worker honors priorities with insertion-order ties") {
  TaskGraph g;
  g.set_field(FieldSpec(5));
  const auto r = g.add_input(key(PkgKind::R, 0), scalar(1));
  const auto x = g.add_input(key(PkgKind::X), scalar(1));
  const auto m = g.add_input(key(PkgKind::M), scalar(1));
  // Insertion order A(pri 2, c0=0), B(pri 0, c0=1), C(pri 1, c0=2),
  // D(pri 0, c0=3). Expected run order: B, D (tie, insertion), C, A.
  add_cu(g, r, x, m, g.require_slot(key(PkgKind::R, 1)), 2, 0);
  add_cu(g, r, x, m, g.require_slot(key(PkgKind::R, 2)), 0, 1);
  add_cu(g, r, x, m, g.require_slot(key(PkgKind::R, 3)), 1, 2);
  add_cu(g, r, x, m, g.require_slot(key(PkgKind::R, 4)), 0, 3);
  const RunReport rep = run(g, RunOptions{1, true, false});
  REQUIRE(rep.trace.size() == 4);
  CHECK(rep.trace[0].c0 == 1);
  CHECK(rep.trace[1].c0 == 3);
  CHECK(rep.trace[2].c0 == 2);
  CHECK(rep.trace[3].c0 == 0);
}

TEST_CASE("results are identical across worker counts") {
  const unsigned width = 5, layers = 8;
  std::vector<std::vector<Elem>> finals;
  for (int workers : {1, 2, 4}) {
    TaskGraph g;
    g.set_field(FieldSpec(11));
    std::vector<std::int32_t> prev(width), mults(width);
    for (unsigned w = 0; w < width; ++w) {
      prev[w] = g.add_input(key(PkgKind::R, 0, w), scalar(w + 1));
      mults[w] = g.add_input(key(PkgKind::M, w), scalar(2 * w + 1));
    }
    for (unsigned l = 1; l <= layers; ++l) {
      std::vector<std::int32_t> cur(width);
      for (unsigned w = 0; w < width; ++w) {
        cur[w] = g.require_slot(key(PkgKind::R, l, w));
        add_cu(g, prev[w], prev[(w + 1) % width], mults[w], cur[w]);
      }
      prev = cur;
    }
    for (unsigned w = 0; w < width; ++w) g.retain(prev[w]);
    const RunReport rep = run(g, RunOptions{workers, false, false});
    CHECK(rep.workers == workers);
    std::vector<Elem> vals;
    for (unsigned w = 0; w < width; ++w) vals.push_back(scalar_of(g, prev[w]));
    finals.push_back(vals);
  }
  CHECK(finals[0] == finals[1]);
  CHECK(finals[0] == finals[2]);
}

TEST_CASE("payloads are released after their last consumer") {
  TaskGraph g;
  g.set_field(FieldSpec(5));
  const auto x = g.add_input(key(PkgKind::X), scalar(2));
  const auto m = g.add_input(key(PkgKind::M), scalar(3));
  const auto r0 = g.add_input(key(PkgKind::R, 0), scalar(1));
  const auto r1 = g.require_slot(key(PkgKind::R, 1));
  const auto r2 = g.require_slot(key(PkgKind::R, 2));
  add_cu(g, r0, x, m, r1);
  add_cu(g, r1, x, m, r2);
  g.retain(r1);
  run(g, RunOptions{1, false, false});
  CHECK(g.payload(r0) == nullptr);  // consumed, not retained
  CHECK(g.payload(r1) != nullptr);  // consumed but retained
  CHECK(g.payload(r2) != nullptr);  // never consumed
  // x and m each had two consumers and are released after both ran.
  CHECK(g.payload(x) == nullptr);
  CHECK(g.payload(m) == nullptr);
}

TEST_CASE("retain_all keeps every payload") {
  TaskGraph g;
  g.set_field(FieldSpec(5));
  const auto x = g.add_input(key(PkgKind::X), scalar(2));
  const auto m = g.add_input(key(PkgKind::M), scalar(3));
  const auto r0 = g.add_input(key(PkgKind::R, 0), scalar(1));
  const auto r1 = g.require_slot(key(PkgKind::R, 1));
  const auto r2 = g.require_slot(key(PkgKind::R, 2));
  add_cu(g, r0, x, m, r1);
  add_cu(g, r1, x, m, r2);
  run(g, RunOptions{1, false, true});
  for (std::int32_t s : {x, m, r0, r1, r2}) CHECK(g.payload(s) != nullptr);
}

TEST_CASE("live-byte accounting tracks releases") {
  // A long chain of 32x32 matrices: without releases the high-water mark
  // would grow with the chain length; with them it stays near a few blocks.
  const std::size_t block_bytes = Matrix(32, 32).byte_size();
  TaskGraph g;
  g.set_field(FieldSpec(5));
  const auto x = g.add_input(key(PkgKind::X), PackageValue(Matrix(32, 32)));
  const auto m = g.add_input(key(PkgKind::M), PackageValue(Matrix(32, 32)));
  std::int32_t prev = g.add_input(key(PkgKind::R, 0),
                                  PackageValue(Matrix(32, 32)));
  const unsigned chain = 20;
  for (unsigned step = 1; step <= chain; ++step) {
    const auto out = g.require_slot(key(PkgKind::R, step));
    add_cu(g, prev, x, m, out);
    prev = out;
  }
  const RunReport rep = run(g, RunOptions{1, false, false});
  CHECK(rep.initial_live_bytes == std::int64_t(3 * block_bytes));
  CHECK(rep.peak_live_bytes >= rep.initial_live_bytes);
  CHECK(rep.peak_live_bytes <= std::int64_t(5 * block_bytes));
  CHECK(rep.peak_live_bytes < std::int64_t(chain * block_bytes));
}

TEST_CASE("trace CSV format") {
  TaskGraph g;
  g.set_field(FieldSpec(5));
  const auto x = g.add_input(key(PkgKind::X), scalar(2));
  const auto m = g.add_input(key(PkgKind::M), scalar(3));
  const auto r0 = g.add_input(key(PkgKind::R, 0), scalar(1));
  const auto r1 = g.require_slot(key(PkgKind::R, 1));
  add_cu(g, r0, x, m, r1, 0, 4, 5, 6);
  const RunReport rep = run(g, RunOptions{1, true, false});
  REQUIRE(rep.trace.size() == 1);
  CHECK(rep.trace[0].kind == TaskKind::ClearUp);
  CHECK(rep.trace[0].worker == 0);
  CHECK(rep.trace[0].live_bytes >= 0);

  const std::string path = "sched_trace_check.csv";
  write_trace_csv(rep, path);
  std::ifstream in(path);
  REQUIRE(bool(in));
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  const bool more = bool(std::getline(in, extra));
  CHECK(header == "task_kind,i,j,k,worker,start_ns,end_ns,live_bytes");
  CHECK(row.substr(0, 14) == "ClearUp,4,5,6,");
  CHECK(!more);
  in.close();
  std::remove(path.c_str());
}

TEST_CASE("an empty plan runs cleanly") {
  TaskGraph g;
  g.set_field(FieldSpec(5));
  const RunReport rep = run(g, RunOptions{4, true, false});
  CHECK(rep.trace.empty());
  CHECK(rep.peak_live_bytes == 0);
}

TEST_CASE("slot keys print and pack distinctly") {
  CHECK(key(PkgKind::C, 1, 2, 3, 4).to_string() == "C(1,2,3)v4");
  CHECK(key(PkgKind::D).packed() != key(PkgKind::E).packed());
  CHECK(key(PkgKind::B, 1, 0).packed() != key(PkgKind::B, 0, 1).packed());
  CHECK(key(PkgKind::B, 0, 0, 0, 1).packed() !=
        key(PkgKind::B, 0, 0, 1, 0).packed());
}
