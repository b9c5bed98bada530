#include "gfrref/generate.hpp"

namespace gfrref {

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  if (bound <= 1) return 0;
  // Largest multiple of bound that fits, for rejection without modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v;
  do {
    v = next();
  } while (v >= limit);
  return v % bound;
}

Matrix random_matrix(const FieldSpec& f, std::size_t rows, std::size_t cols,
                     std::uint64_t seed) {
  SplitMix64 rng(seed);
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      m.at(r, c) = Elem(rng.below(f.order()));
  return m;
}

Matrix random_product_matrix(const FieldSpec& f, std::size_t rows,
                             std::size_t cols, std::size_t inner,
                             std::uint64_t seed) {
  SplitMix64 rng(seed);
  Matrix p(rows, inner), q(inner, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < inner; ++c)
      p.at(r, c) = Elem(rng.below(f.order()));
  for (std::size_t r = 0; r < inner; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      q.at(r, c) = Elem(rng.below(f.order()));
  return mat_mul(f, p, q);
}

Matrix well_conditioned_matrix(const FieldSpec& f, std::size_t n,
                               std::uint64_t seed) {
  SplitMix64 rng(seed);
  Matrix lower(n, n), upper(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    lower.at(r, r) = f.one();
    for (std::size_t c = 0; c < r; ++c)
      lower.at(r, c) = Elem(rng.below(f.order()));
    upper.at(r, r) = Elem(1 + rng.below(f.order() - 1));
    for (std::size_t c = r + 1; c < n; ++c)
      upper.at(r, c) = Elem(rng.below(f.order()));
  }
  return mat_mul(f, lower, upper);
}

}  // namespace gfrref
