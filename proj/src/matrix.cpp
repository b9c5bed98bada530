#include "gfrref/matrix.hpp"

#include <sstream>
#include <stdexcept>

namespace gfrref {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<Elem> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols)
    throw std::invalid_argument("matrix: data size does not match shape");
}

Matrix mat_build(std::size_t rows, std::size_t cols,
                 const std::vector<std::vector<Elem>>& entries) {
  if (entries.size() != rows)
    throw std::invalid_argument("mat_build: row count mismatch");
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (entries[r].size() != cols)
      throw std::invalid_argument("mat_build: column count mismatch");
    for (std::size_t c = 0; c < cols; ++c) m.at(r, c) = entries[r][c];
  }
  return m;
}

bool mat_eq(const Matrix& a, const Matrix& b) { return a == b; }

IndexSet::IndexSet(std::size_t universe, std::vector<std::uint32_t> members)
    : universe(universe), members(std::move(members)) {
  for (std::size_t i = 0; i < this->members.size(); ++i) {
    if (this->members[i] >= universe)
      throw std::invalid_argument("index set: member out of universe");
    if (i > 0 && this->members[i] <= this->members[i - 1])
      throw std::invalid_argument("index set: members must be increasing");
  }
}

std::string IndexSet::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i) os << ',';
    os << members[i];
  }
  os << "}/" << universe;
  return os.str();
}

IndexSet index_set_complement(const IndexSet& s) {
  IndexSet out;
  out.universe = s.universe;
  out.members.reserve(s.universe - s.members.size());
  std::size_t next = 0;
  for (std::uint32_t v = 0; v < s.universe; ++v) {
    if (next < s.members.size() && s.members[next] == v) {
      ++next;
    } else {
      out.members.push_back(v);
    }
  }
  return out;
}

std::size_t BitString::count_ones() const {
  std::size_t n = 0;
  for (auto b : bits) n += b ? 1 : 0;
  return n;
}

std::string BitString::to_string() const {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

namespace {

// Shared multiply kernel: out = (addend ? *addend : 0) + b · c.
Matrix mul_add_kernel(const FieldSpec& f, const Matrix* addend, const Matrix& b,
                      const Matrix& c) {
  if (b.cols() != c.rows())
    throw std::invalid_argument("mul: inner dimensions disagree");
  if (addend && (addend->rows() != b.rows() || addend->cols() != c.cols()))
    throw std::invalid_argument("mad: addend shape mismatch");
  const std::size_t m = b.rows(), inner = b.cols(), n = c.cols();
  Matrix out(m, n);
  if (m == 0 || n == 0) return out;

  if (f.k() == 1) {
    // Prime field: accumulate rows in 64-bit lanes and reduce once at the
    // end. Safe: inner · (p-1)^2 < 2^63 for all supported shapes.
    const std::uint64_t p = f.p();
    std::vector<std::uint64_t> acc(n);
    for (std::size_t i = 0; i < m; ++i) {
      if (addend) {
        const Elem* arow = addend->row(i);
        for (std::size_t j = 0; j < n; ++j) acc[j] = arow[j];
      } else {
        std::fill(acc.begin(), acc.end(), std::uint64_t(0));
      }
      const Elem* brow = b.row(i);
      for (std::size_t t = 0; t < inner; ++t) {
        const std::uint64_t v = brow[t];
        if (v == 0) continue;
        const Elem* crow = c.row(t);
        for (std::size_t j = 0; j < n; ++j) acc[j] += v * crow[j];
      }
      Elem* orow = out.row(i);
      for (std::size_t j = 0; j < n; ++j) orow[j] = Elem(acc[j] % p);
    }
    return out;
  }

  // Extension field: table-driven element ops.
  for (std::size_t i = 0; i < m; ++i) {
    Elem* orow = out.row(i);
    if (addend) {
      const Elem* arow = addend->row(i);
      for (std::size_t j = 0; j < n; ++j) orow[j] = arow[j];
    }
    const Elem* brow = b.row(i);
    for (std::size_t t = 0; t < inner; ++t) {
      const Elem v = brow[t];
      if (v == 0) continue;
      const Elem* crow = c.row(t);
      for (std::size_t j = 0; j < n; ++j)
        orow[j] = f.add(orow[j], f.mul(v, crow[j]));
    }
  }
  return out;
}

}  // namespace

Matrix mat_mul(const FieldSpec& f, const Matrix& b, const Matrix& c) {
  return mul_add_kernel(f, nullptr, b, c);
}

Matrix mat_mul_add(const FieldSpec& f, const Matrix& a, const Matrix& b,
                   const Matrix& c) {
  return mul_add_kernel(f, &a, b, c);
}

Matrix mat_add(const FieldSpec& f, const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("mat_add: shape mismatch");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      out.at(i, j) = f.add(a.at(i, j), b.at(i, j));
  return out;
}

Matrix take_rows(const Matrix& m, const std::vector<std::uint32_t>& rows) {
  Matrix out(rows.size(), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= m.rows())
      throw std::invalid_argument("take_rows: index out of range");
    for (std::size_t j = 0; j < m.cols(); ++j)
      out.at(i, j) = m.at(rows[i], j);
  }
  return out;
}

Matrix take_cols(const Matrix& m, const std::vector<std::uint32_t>& cols) {
  Matrix out(m.rows(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    if (cols[j] >= m.cols())
      throw std::invalid_argument("take_cols: index out of range");
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      out.at(i, j) = m.at(i, cols[j]);
  return out;
}

Matrix vcat(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols())
    throw std::invalid_argument("vcat: column counts disagree");
  Matrix out(a.rows() + b.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out.at(i, j) = a.at(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j)
      out.at(a.rows() + i, j) = b.at(i, j);
  return out;
}

Matrix hcat(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows())
    throw std::invalid_argument("hcat: row counts disagree");
  Matrix out(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out.at(i, j) = a.at(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j)
      out.at(i, a.cols() + j) = b.at(i, j);
  }
  return out;
}

}  // namespace gfrref
