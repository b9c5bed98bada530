#pragma once

#include <cstddef>
#include <utility>

#include "gfrref/matrix.hpp"

namespace gfrref {

/// Result of echelonising a single block H (α×β) of rank r.
///
/// The defining identity, with P the permutation moving the selected rows
/// `rho` to the top (in order) and the column permutation putting the pivot
/// columns `gamma` first (in order):
///
///   [[M, 0], [K, 1]] · P · H · (gamma | gamma-complement) = [[-1, R], [0, 0]]
///
/// M is r×r, K is (α−r)×r, R is r×(β−r). Rows of M (and R) are ordered by
/// ascending pivot column.
struct EchResult {
  Matrix M;
  Matrix K;
  Matrix R;
  IndexSet rho;    // selected rows, universe α
  IndexSet gamma;  // pivot columns, universe β

  std::size_t rank() const { return gamma.size(); }
  std::size_t byte_size() const {
    return M.byte_size() + K.byte_size() + R.byte_size() + rho.byte_size() +
           gamma.byte_size();
  }
};

// The atomic jobs. All are pure functions of their inputs.

/// Returns a distinct copy of the input.
Matrix cpy(const Matrix& a);

/// b · c.
Matrix mul(const FieldSpec& f, const Matrix& b, const Matrix& c);

/// a + b · c.
Matrix mad(const FieldSpec& f, const Matrix& a, const Matrix& b,
           const Matrix& c);

/// Negative reduced echelonisation of h. Direct single-pass Gauss when
/// max(α,β) <= threshold, otherwise the longer dimension is split in half and
/// the parts are combined. (gamma, R) are independent of the threshold;
/// (rho, M, K) satisfy the identity but may differ between thresholds.
EchResult ech(const FieldSpec& f, const Matrix& h, std::size_t threshold = 256);

/// Column extract: (columns of h listed by gamma, remaining columns).
std::pair<Matrix, Matrix> cex(const Matrix& h, const IndexSet& gamma);

/// Row extract: (rows of h listed by rho, remaining rows).
std::pair<Matrix, Matrix> rex(const Matrix& h, const IndexSet& rho);

/// Union plus history. rho2 indexes into the ordered complement of rho1;
/// the result is rho1 with those complement elements merged in, and u marks
/// each element of the merged set with 0 (came from rho1) or 1 (new).
std::pair<IndexSet, BitString> unh(const IndexSet& rho1, const IndexSet& rho2);

/// unh with an empty first set over the same universe: (rho2, all-ones).
std::pair<IndexSet, BitString> un0(const IndexSet& rho2);

/// Marker bitstring of length |rho2|: bit ℓ = 1 iff rho2's ℓ-th element lies
/// in rho1. Requires rho1 ⊆ rho2.
BitString mkr(const IndexSet& rho1, const IndexSet& rho2);

/// Row riffle: output row ℓ is the next unused row of b if u_ℓ = 0, else the
/// next unused row of c. Requires #zeros(u) = rows(b), #ones(u) = rows(c).
Matrix rrf(const BitString& u, const Matrix& b, const Matrix& c);

/// Column riffle with zero columns: output has out_cols columns; the columns
/// of m are placed in order at the 1-positions of lambda, zero columns at the
/// 0-positions. Requires lambda length = out_cols and #ones(lambda) = cols(m).
Matrix crz(const Matrix& m, const BitString& lambda, std::size_t out_cols);

/// Add identity columns: copy of k where row i gets a 1 at the position of
/// the i-th 1-bit of delta. Requires #ones(delta) <= rows(k) and
/// delta length = cols(k).
Matrix adi(const Matrix& k, const BitString& delta);

}  // namespace gfrref
