#pragma once

#include <cstdint>

#include "gfrref/matrix.hpp"

namespace gfrref {

/// splitmix64: the 64-bit PRNG of Steele, Lea and Flood's SplittableRandom,
/// chosen for its tiny fully specified state so seeded runs reproduce across
/// platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform draw in [0, bound) via rejection (no modulo bias).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

/// Matrix with independent uniform entries.
Matrix random_matrix(const FieldSpec& f, std::size_t rows, std::size_t cols,
                     std::uint64_t seed);

/// Product P·Q with inner dimension `inner` and uniform factors: rank ≤ inner.
Matrix random_product_matrix(const FieldSpec& f, std::size_t rows,
                             std::size_t cols, std::size_t inner,
                             std::uint64_t seed);

/// n×n matrix whose leading t×t submatrices are nonsingular for every t ≤ n
/// (built as unit-lower-triangular times upper-triangular with nonzero
/// diagonal, both with uniform off-diagonal entries).
Matrix well_conditioned_matrix(const FieldSpec& f, std::size_t n,
                               std::uint64_t seed);

}  // namespace gfrref
