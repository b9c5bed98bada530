#pragma once

#include <cstddef>
#include <optional>
#include <utility>

#include "gfrref/packages.hpp"

namespace gfrref {

/// The composite tasks. Indices are 0-based: i is the block row, j the block
/// column, h a second block-row index, all as scheduled by the block driver.
/// Every task validates input shapes and throws std::invalid_argument on
/// inconsistency; the scheduler treats a throwing task as fatal for the run.

/// Eliminate block C (α×β) against the column state D, producing the extended
/// column state D' and the elimination package A for this (i, j).
/// For i == 0, D must be the empty state (rank 0) and is not consulted.
std::pair<PkgD, PkgA> clear_down(const FieldSpec& f, const Matrix& C,
                                 const PkgD& D, std::size_t i,
                                 std::size_t ech_threshold = 256);

/// Apply the elimination package A to a block C (α×β) to the right of the
/// pivot column, folding its selected rows into the pivotal-row store B
/// (r×β). For i == 0 there is no B yet; pass std::nullopt.
/// Returns (C', B').
std::pair<Matrix, Matrix> update_row(const FieldSpec& f, const PkgA& A,
                                     const Matrix& C,
                                     const std::optional<Matrix>& B,
                                     std::size_t i);

/// Transform-matrix counterpart of update_row for row block h at (i, j).
/// K is absent iff j == 0 (nothing cleaned yet in this block row);
/// M is absent iff h == i (this block row's own multiplier not started).
/// E is the pivot-row state E_{h,j} of block row h. Returns (K', M').
std::pair<Matrix, Matrix> update_row_trafo(const FieldSpec& f, const PkgA& A,
                                           const std::optional<Matrix>& K,
                                           const std::optional<Matrix>& M,
                                           const PkgE& E, std::size_t i,
                                           std::size_t h, std::size_t j);

/// Merge the new pivot rows A.rho_prime of step (i, j) into the block row's
/// pivot-row state. E is absent iff j == 0.
PkgE extend(const PkgA& A, const std::optional<PkgE>& E, std::size_t j);

/// Widen M (α×|E1.rho|) to α×|E2.rho| by inserting zero columns where E2 has
/// pivots that E1 lacks. Requires E1.rho ⊆ E2.rho.
Matrix row_lengthen(const Matrix& M, const PkgE& E1, const PkgE& E2);

/// Split the pivotal-row store B by the final pivot columns of column state
/// D: X = pivot-column slice, R = the rest.
std::pair<Matrix, Matrix> pre_clear_up(const Matrix& B, const PkgD& D);

/// R + X · M.
Matrix clear_up(const FieldSpec& f, const Matrix& R, const Matrix& X,
                const Matrix& M);

/// Extract D.R as the initial diagonal result block.
Matrix copy_d(const PkgD& D);

}  // namespace gfrref
