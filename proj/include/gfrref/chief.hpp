#pragma once

#include <cstddef>
#include <utility>
#include <string>
#include <vector>

#include "gfrref/scheduler.hpp"

namespace gfrref {

/// Row/column partition of an m×n matrix into a×b blocks.
struct ChopSpec {
  std::vector<std::size_t> row_parts;  // sizes, sum = m
  std::vector<std::size_t> col_parts;  // sizes, sum = n

  std::size_t a() const { return row_parts.size(); }
  std::size_t b() const { return col_parts.size(); }
  std::size_t rows() const;
  std::size_t cols() const;
  std::size_t row_offset(std::size_t i) const;
  std::size_t col_offset(std::size_t j) const;
};

/// Uniform chop with a trailing remainder part. With remainder_first the
/// remainder part leads instead (optional tweak, off by default).
ChopSpec chop(std::size_t m, std::size_t n, std::size_t block,
              bool remainder_first = false);

/// Result of the blocked echelonisation. All grids are indexed by 0-based
/// block coordinates; absent parts of the transformation (K blocks above the
/// diagonal, identity columns) are implicit and only materialized by verify().
struct EchelonOutput {
  FieldSpec field;
  ChopSpec chop;
  bool with_transform = false;
  std::size_t rank = 0;

  explicit EchelonOutput(FieldSpec f) : field(std::move(f)) {}

  // R_blocks[j][l] for j <= l: |gamma_j| × (col_parts[l] − |gamma_l|).
  std::vector<std::vector<Matrix>> R_blocks;
  // T_M_blocks[j][h]: |gamma_j| × |rho_h| (empty grid without transform).
  std::vector<std::vector<Matrix>> T_M_blocks;
  // T_K_blocks[i][h] for h <= i: (row_parts[i] − |rho_i|) × |rho_h|.
  std::vector<std::vector<Matrix>> T_K_blocks;
  // Per block row: selected pivot rows (universe row_parts[i]).
  std::vector<IndexSet> varrho;
  // Per block column: pivot columns (universe col_parts[j]).
  std::vector<IndexSet> upsilon;

  /// Global pivot columns / selected rows, ascending.
  std::vector<std::uint32_t> global_upsilon() const;
  std::vector<std::uint32_t> global_varrho() const;

  /// The assembled rank × (n − rank) remnant with pivot rows ordered by
  /// global pivot column and columns by ascending non-pivot column.
  Matrix assembled_R() const;
};

/// Slot ids of the plan's final packages, for assembly and inspection.
struct PlanHandles {
  std::vector<std::int32_t> d_final;                // per block column j
  std::vector<std::int32_t> e_final;                // per block row i
  std::vector<std::vector<std::int32_t>> r_final;   // [j][l], -1 below diag
  std::vector<std::vector<std::int32_t>> m_final;   // [j][h] (transform only)
  std::vector<std::vector<std::int32_t>> k_final;   // [i][h], h ≤ i
};

/// Emit the Chief's Steps 1–3 for C under `chop` into a fresh TaskGraph.
/// The returned handles address the output packages after run().
PlanHandles build_plan(TaskGraph& graph, const Matrix& C,
                       const FieldSpec& field, const ChopSpec& chop,
                       bool with_transform);

struct EchelonizeOptions {
  std::size_t block = 256;
  int threads = 1;
  bool with_transform = true;
  std::size_t ech_threshold = 256;
  bool remainder_first = false;
  bool collect_trace = false;
  bool retain_all = false;
};

/// Chop, plan, run, assemble. If `report` is non-null the scheduler's run
/// report (trace, peak bytes, wall time) is stored there.
EchelonOutput echelonize(const Matrix& C, const FieldSpec& field,
                         const EchelonizeOptions& options,
                         RunReport* report = nullptr);

/// Independent oracle: plain single-pass Gauss with full transformation
/// tracking, no recursion, no blocking. Shares no code with jobs::ech.
EchResult oracle_rref(const FieldSpec& f, const Matrix& C);

/// Materialize the full m×m transformation matrix encoded by out (M and K
/// blocks plus implicit identity), with rows ordered pivot rows first (by
/// global pivot column), then non-pivot rows by global row index. Column t
/// corresponds to original row t of the input.
Matrix materialize_transform(const EchelonOutput& out);

/// Check the defining block identity of the echelonisation exactly against C,
/// and (Υ, 𝓡) against oracle_rref (or `oracle` if supplied). On failure
/// returns false and, if diag is non-null, stores a first-mismatch message.
bool verify(const Matrix& C, const EchelonOutput& out,
            std::string* diag = nullptr, const EchResult* oracle = nullptr);

}  // namespace gfrref
