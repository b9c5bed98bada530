#include "gfrref/jobs.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace gfrref {
namespace {

// Column riffle of two matrices: output column l comes from the next unused
// column of `zeros_side` when u_l = 0, else of `ones_side`. The column
// counterpart of rrf, used by the vertical ech combine.
Matrix col_riffle(const BitString& u, const Matrix& zeros_side,
                  const Matrix& ones_side) {
  if (zeros_side.rows() != ones_side.rows())
    throw std::invalid_argument("col_riffle: row counts disagree");
  if (u.count_zeros() != zeros_side.cols() ||
      u.count_ones() != ones_side.cols())
    throw std::invalid_argument("col_riffle: bit counts disagree");
  Matrix out(zeros_side.rows(), u.size());
  std::size_t zc = 0, oc = 0;
  for (std::size_t l = 0; l < u.size(); ++l) {
    const Matrix& src = u.bits[l] ? ones_side : zeros_side;
    const std::size_t c = u.bits[l] ? oc++ : zc++;
    for (std::size_t i = 0; i < out.rows(); ++i) out.at(i, l) = src.at(i, c);
  }
  return out;
}

// Single-pass Gauss with explicit transformation tracking. Pivot of each
// processed row is its first nonzero entry after eliminating earlier pivots;
// pivot rows are normalized so the pivot entry is -1 and earlier rows are
// cleaned upward immediately.
EchResult direct_gauss(const FieldSpec& f, const Matrix& h) {
  const std::size_t alpha = h.rows(), beta = h.cols();
  Matrix w = h;
  // t[i] = row i of the accumulated row-operation matrix (alpha x alpha).
  Matrix t(alpha, alpha);
  for (std::size_t i = 0; i < alpha; ++i) t.at(i, i) = 1;

  std::vector<std::pair<std::uint32_t, std::uint32_t>> piv;  // (col, row)
  std::vector<std::uint32_t> rest;                           // non-pivot rows

  auto add_scaled_row = [&](Matrix& m, std::size_t dst, Elem coef,
                            std::size_t src) {
    Elem* d = m.row(dst);
    const Elem* s = m.row(src);
    for (std::size_t j = 0; j < m.cols(); ++j)
      d[j] = f.add(d[j], f.mul(coef, s[j]));
  };

  for (std::size_t i = 0; i < alpha; ++i) {
    for (const auto& [pc, pr] : piv) {
      const Elem v = w.at(i, pc);
      if (v == 0) continue;
      add_scaled_row(w, i, v, pr);  // pivot entry is -1, so this clears
      add_scaled_row(t, i, v, pr);
    }
    std::size_t pivot_col = beta;
    for (std::size_t j = 0; j < beta; ++j) {
      if (w.at(i, j) != 0) {
        pivot_col = j;
        break;
      }
    }
    if (pivot_col == beta) {
      rest.push_back(std::uint32_t(i));
      continue;
    }
    const Elem scale = f.neg(f.inv(w.at(i, pivot_col)));
    for (std::size_t j = 0; j < beta; ++j)
      w.at(i, j) = f.mul(scale, w.at(i, j));
    for (std::size_t j = 0; j < alpha; ++j)
      t.at(i, j) = f.mul(scale, t.at(i, j));
    for (const auto& [pc, pr] : piv) {
      (void)pc;
      const Elem v = w.at(pr, pivot_col);
      if (v == 0) continue;
      add_scaled_row(w, pr, v, i);
      add_scaled_row(t, pr, v, i);
    }
    piv.emplace_back(std::uint32_t(pivot_col), std::uint32_t(i));
  }

  std::sort(piv.begin(), piv.end());
  const std::size_t r = piv.size();

  std::vector<std::uint32_t> rho_members;
  rho_members.reserve(r);
  for (const auto& [pc, pr] : piv) {
    (void)pc;
    rho_members.push_back(pr);
  }
  std::sort(rho_members.begin(), rho_members.end());

  EchResult out;
  out.rho = IndexSet(alpha, rho_members);
  std::vector<std::uint32_t> gamma_members;
  gamma_members.reserve(r);
  for (const auto& [pc, pr] : piv) {
    (void)pr;
    gamma_members.push_back(pc);
  }
  out.gamma = IndexSet(beta, gamma_members);
  const IndexSet gamma_rest = index_set_complement(out.gamma);

  out.M = Matrix(r, r);
  out.R = Matrix(r, beta - r);
  for (std::size_t ti = 0; ti < r; ++ti) {
    const std::uint32_t row = piv[ti].second;
    for (std::size_t s = 0; s < r; ++s)
      out.M.at(ti, s) = t.at(row, rho_members[s]);
    for (std::size_t j = 0; j < beta - r; ++j)
      out.R.at(ti, j) = w.at(row, gamma_rest.members[j]);
  }
  out.K = Matrix(alpha - r, r);
  for (std::size_t u = 0; u < rest.size(); ++u)
    for (std::size_t s = 0; s < r; ++s)
      out.K.at(u, s) = t.at(rest[u], rho_members[s]);
  return out;
}

// Combine for a row split H = [H1; H2]. e1 covers H1; e2 covers H2 after its
// rows were updated against e1's pivots.
EchResult combine_horizontal(const FieldSpec& f, const Matrix& h2,
                             const EchResult& e1, std::size_t alpha1,
                             std::size_t threshold) {
  auto [a_cols, h2_rest] = cex(h2, e1.gamma);
  const Matrix h2_clean = mad(f, h2_rest, a_cols, e1.R);
  const EchResult e2 = ech(f, h2_clean, threshold);

  auto [a_sel, a_rest] = rex(a_cols, e2.rho);
  auto [e_mid, r1_rest] = cex(e1.R, e2.gamma);
  auto [gamma, lam] = unh(e1.gamma, e2.gamma);

  // Transform rows of the new pivots, written in the combined coordinates
  // (coefficients on H's rho1 rows, then on H2's rho2 rows).
  const Matrix mc = mul(f, mul(f, e2.M, a_sel), e1.M);
  const Matrix ma = mad(f, e1.M, e_mid, mc);
  const Matrix mb = mul(f, e_mid, e2.M);

  EchResult out;
  out.gamma = std::move(gamma);
  out.M = rrf(lam, hcat(ma, mb), hcat(mc, e2.M));
  out.R = rrf(lam, mad(f, r1_rest, e_mid, e2.R), e2.R);

  const Matrix k_bottom_left = mul(f, mad(f, a_rest, e2.K, a_sel), e1.M);
  out.K = vcat(hcat(e1.K, Matrix(e1.K.rows(), e2.rho.size())),
               hcat(k_bottom_left, e2.K));

  std::vector<std::uint32_t> rho_members = e1.rho.members;
  for (std::uint32_t v : e2.rho.members)
    rho_members.push_back(std::uint32_t(alpha1) + v);
  out.rho = IndexSet(alpha1 + h2.rows(), std::move(rho_members));
  return out;
}

// Combine for a column split H = [H1 | H2]. e1 covers H1; e2 covers the
// non-selected rows of H2 after cleaning with e1's K.
EchResult combine_vertical(const FieldSpec& f, const Matrix& h2,
                           const EchResult& e1, std::size_t beta1,
                           std::size_t threshold) {
  auto [h2_sel, h2_rest] = rex(h2, e1.rho);
  const Matrix x = mul(f, e1.M, h2_sel);
  const Matrix h2_clean = mad(f, h2_rest, e1.K, h2_sel);
  const EchResult e2 = ech(f, h2_clean, threshold);

  auto [rho, u] = unh(e1.rho, e2.rho);
  auto [k1_sel, k1_rest] = rex(e1.K, e2.rho);
  const Matrix g = mul(f, e2.M, k1_sel);
  auto [x_piv, x_rest] = cex(x, e2.gamma);

  EchResult out;
  out.rho = std::move(rho);
  std::vector<std::uint32_t> gamma_members = e1.gamma.members;
  for (std::uint32_t v : e2.gamma.members)
    gamma_members.push_back(std::uint32_t(beta1) + v);
  out.gamma = IndexSet(beta1 + h2.cols(), std::move(gamma_members));

  out.M = col_riffle(u,
                     vcat(mad(f, e1.M, x_piv, g), g),
                     vcat(mul(f, x_piv, e2.M), e2.M));
  out.R = vcat(hcat(e1.R, mad(f, x_rest, x_piv, e2.R)),
               hcat(Matrix(e2.rho.size(), e1.R.cols()), e2.R));
  out.K = col_riffle(u, mad(f, k1_rest, e2.K, k1_sel), e2.K);
  return out;
}

}  // namespace

Matrix cpy(const Matrix& a) { return a; }

Matrix mul(const FieldSpec& f, const Matrix& b, const Matrix& c) {
  return mat_mul(f, b, c);
}

Matrix mad(const FieldSpec& f, const Matrix& a, const Matrix& b,
           const Matrix& c) {
  return mat_mul_add(f, a, b, c);
}

EchResult ech(const FieldSpec& f, const Matrix& h, std::size_t threshold) {
  if (threshold < 1) threshold = 1;
  const std::size_t alpha = h.rows(), beta = h.cols();
  if (alpha <= threshold && beta <= threshold) return direct_gauss(f, h);

  if (alpha >= beta) {
    const std::size_t alpha1 = alpha / 2;
    std::vector<std::uint32_t> top(alpha1);
    for (std::size_t i = 0; i < alpha1; ++i) top[i] = std::uint32_t(i);
    std::vector<std::uint32_t> bottom(alpha - alpha1);
    for (std::size_t i = 0; i < bottom.size(); ++i)
      bottom[i] = std::uint32_t(alpha1 + i);
    const EchResult e1 = ech(f, take_rows(h, top), threshold);
    return combine_horizontal(f, take_rows(h, bottom), e1, alpha1, threshold);
  }
  const std::size_t beta1 = beta / 2;
  std::vector<std::uint32_t> left(beta1);
  for (std::size_t j = 0; j < beta1; ++j) left[j] = std::uint32_t(j);
  std::vector<std::uint32_t> right(beta - beta1);
  for (std::size_t j = 0; j < right.size(); ++j)
    right[j] = std::uint32_t(beta1 + j);
  const EchResult e1 = ech(f, take_cols(h, left), threshold);
  return combine_vertical(f, take_cols(h, right), e1, beta1, threshold);
}

std::pair<Matrix, Matrix> cex(const Matrix& h, const IndexSet& gamma) {
  if (gamma.universe != h.cols())
    throw std::invalid_argument("cex: universe mismatch");
  const IndexSet rest = index_set_complement(gamma);
  return {take_cols(h, gamma.members), take_cols(h, rest.members)};
}

std::pair<Matrix, Matrix> rex(const Matrix& h, const IndexSet& rho) {
  if (rho.universe != h.rows())
    throw std::invalid_argument("rex: universe mismatch");
  const IndexSet rest = index_set_complement(rho);
  return {take_rows(h, rho.members), take_rows(h, rest.members)};
}

std::pair<IndexSet, BitString> unh(const IndexSet& rho1, const IndexSet& rho2) {
  const IndexSet comp = index_set_complement(rho1);
  if (rho2.universe != comp.size())
    throw std::invalid_argument("unh: universe of rho2 must be the complement size");
  std::vector<std::uint32_t> merged;
  merged.reserve(rho1.size() + rho2.size());
  std::vector<std::uint32_t> embedded;
  embedded.reserve(rho2.size());
  for (std::uint32_t idx : rho2.members) embedded.push_back(comp.members[idx]);
  std::size_t i = 0, j = 0;
  BitString u;
  u.bits.reserve(rho1.size() + rho2.size());
  while (i < rho1.size() || j < embedded.size()) {
    if (j >= embedded.size() ||
        (i < rho1.size() && rho1.members[i] < embedded[j])) {
      merged.push_back(rho1.members[i++]);
      u.bits.push_back(0);
    } else {
      merged.push_back(embedded[j++]);
      u.bits.push_back(1);
    }
  }
  return {IndexSet(rho1.universe, std::move(merged)), std::move(u)};
}

std::pair<IndexSet, BitString> un0(const IndexSet& rho2) {
  BitString u;
  u.bits.assign(rho2.size(), 1);
  return {rho2, std::move(u)};
}

BitString mkr(const IndexSet& rho1, const IndexSet& rho2) {
  BitString out;
  out.bits.assign(rho2.size(), 0);
  std::size_t i = 0;
  for (std::size_t l = 0; l < rho2.members.size(); ++l) {
    if (i < rho1.members.size() && rho1.members[i] == rho2.members[l]) {
      out.bits[l] = 1;
      ++i;
    }
  }
  if (i != rho1.members.size())
    throw std::invalid_argument("mkr: rho1 must be a subset of rho2");
  return out;
}

Matrix rrf(const BitString& u, const Matrix& b, const Matrix& c) {
  if (u.count_zeros() != b.rows() || u.count_ones() != c.rows())
    throw std::invalid_argument("rrf: bit counts do not match row counts");
  if (b.cols() != c.cols() && b.rows() != 0 && c.rows() != 0)
    throw std::invalid_argument("rrf: column counts disagree");
  const std::size_t cols = b.rows() != 0 || c.rows() == 0 ? b.cols() : c.cols();
  Matrix out(u.size(), cols);
  std::size_t bi = 0, ci = 0;
  for (std::size_t l = 0; l < u.size(); ++l) {
    const Matrix& src = u.bits[l] ? c : b;
    const std::size_t row = u.bits[l] ? ci++ : bi++;
    for (std::size_t j = 0; j < cols; ++j) out.at(l, j) = src.at(row, j);
  }
  return out;
}

Matrix crz(const Matrix& m, const BitString& lambda, std::size_t out_cols) {
  if (lambda.size() != out_cols)
    throw std::invalid_argument("crz: lambda length must equal out_cols");
  if (lambda.count_ones() != m.cols())
    throw std::invalid_argument("crz: ones count must equal input columns");
  Matrix out(m.rows(), out_cols);
  std::size_t src = 0;
  for (std::size_t l = 0; l < out_cols; ++l) {
    if (!lambda.bits[l]) continue;
    for (std::size_t i = 0; i < m.rows(); ++i) out.at(i, l) = m.at(i, src);
    ++src;
  }
  return out;
}

Matrix adi(const Matrix& k, const BitString& delta) {
  if (delta.size() != k.cols())
    throw std::invalid_argument("adi: delta length must equal columns");
  if (delta.count_ones() > k.rows())
    throw std::invalid_argument("adi: more marked positions than rows");
  Matrix out = k;
  std::size_t i = 0;
  for (std::size_t l = 0; l < delta.size(); ++l) {
    if (!delta.bits[l]) continue;
    out.at(i, l) = 1;
    ++i;
  }
  return out;
}

}  // namespace gfrref
