#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gfrref/field.hpp"

namespace gfrref {

/// Dense row-major matrix over a finite field. Zero-dimensional shapes
/// (0 x n, m x 0, 0 x 0) are fully supported; they carry shape information
/// and no data.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<Elem> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Elem at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  Elem& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Elem* row(std::size_t r) const { return data_.data() + r * cols_; }
  Elem* row(std::size_t r) { return data_.data() + r * cols_; }

  const std::vector<Elem>& data() const { return data_; }

  bool operator==(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
  }
  bool operator!=(const Matrix& other) const { return !(*this == other); }

  /// Approximate heap footprint, used by the scheduler's live-byte accounting.
  std::size_t byte_size() const { return data_.size() * sizeof(Elem) + 48; }

 private:
  std::size_t rows_, cols_;
  std::vector<Elem> data_;
};

/// Build a matrix from nested row lists; all rows must have equal length.
Matrix mat_build(std::size_t rows, std::size_t cols,
                 const std::vector<std::vector<Elem>>& entries);

/// Entry-wise equality including shape.
bool mat_eq(const Matrix& a, const Matrix& b);

/// A sorted subset of {0, ..., universe-1}.
struct IndexSet {
  std::size_t universe = 0;
  std::vector<std::uint32_t> members;  // strictly increasing

  IndexSet() = default;
  IndexSet(std::size_t universe, std::vector<std::uint32_t> members);

  std::size_t size() const { return members.size(); }
  bool operator==(const IndexSet& o) const {
    return universe == o.universe && members == o.members;
  }
  bool operator!=(const IndexSet& o) const { return !(*this == o); }
  std::size_t byte_size() const {
    return members.size() * sizeof(std::uint32_t) + 32;
  }
  std::string to_string() const;
};

/// The complement within the same universe, sorted.
IndexSet index_set_complement(const IndexSet& s);

/// A bit string, used for interleaving histories.
struct BitString {
  std::vector<std::uint8_t> bits;

  BitString() = default;
  explicit BitString(std::vector<std::uint8_t> b) : bits(std::move(b)) {}

  std::size_t size() const { return bits.size(); }
  std::size_t count_ones() const;
  std::size_t count_zeros() const { return size() - count_ones(); }
  bool operator==(const BitString& o) const { return bits == o.bits; }
  std::size_t byte_size() const { return bits.size() + 32; }
  std::string to_string() const;
};

/// out = b * c. Shapes: (m x t) * (t x n) -> m x n. Throws on mismatch.
Matrix mat_mul(const FieldSpec& f, const Matrix& b, const Matrix& c);

/// out = a + b * c. Throws on shape mismatch.
Matrix mat_mul_add(const FieldSpec& f, const Matrix& a, const Matrix& b,
                   const Matrix& c);

/// Entry-wise sum.
Matrix mat_add(const FieldSpec& f, const Matrix& a, const Matrix& b);

/// Row selection: rows listed in `rows`, in the given order.
Matrix take_rows(const Matrix& m, const std::vector<std::uint32_t>& rows);

/// Column selection: columns listed in `cols`, in the given order.
Matrix take_cols(const Matrix& m, const std::vector<std::uint32_t>& cols);

/// [a ; b] stacked vertically (equal column counts).
Matrix vcat(const Matrix& a, const Matrix& b);

/// [a | b] side by side (equal row counts).
Matrix hcat(const Matrix& a, const Matrix& b);

}  // namespace gfrref
