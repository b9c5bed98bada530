#pragma once

#include <cstddef>
#include <optional>

#include "gfrref/jobs.hpp"
#include "gfrref/matrix.hpp"

namespace gfrref {

/// Per-(block row, block column) elimination package produced by ClearDown.
///
/// M, K and rho_prime always exist. A, E and lambda describe how the new
/// pivots interleave with earlier ones and are produced only from the second
/// block row on (i > 0); accessing them on a first-row package is a logic
/// error, hence std::optional rather than empty placeholders.
struct PkgA {
  std::optional<Matrix> A;     // α×r slice of C under the prior pivot columns
  Matrix M;                    // r′×r′ multiplier
  Matrix K;                    // (α−r′)×r′ cleaner
  IndexSet rho_prime;          // new pivot rows, universe α
  std::optional<Matrix> E;     // r×r′ rows of D.R under the new pivot columns
  std::optional<BitString> lambda;  // riffle history, length r+r′

  std::size_t byte_size() const;
};

/// Accumulated state of one block column: remnant R (r×(β−r)) and the pivot
/// columns gamma found so far (universe β).
struct PkgD {
  Matrix R;
  IndexSet gamma;

  std::size_t rank() const { return gamma.size(); }
  std::size_t byte_size() const { return R.byte_size() + gamma.byte_size(); }
};

/// Accumulated pivot rows of one block row: the row set rho (universe = block
/// row height) and delta marking which of them are new in the producing step.
struct PkgE {
  IndexSet rho;
  BitString delta;

  std::size_t byte_size() const { return rho.byte_size() + delta.byte_size(); }
};

}  // namespace gfrref
