#include "gfrref/tasks.hpp"

#include <stdexcept>

namespace gfrref {

std::size_t PkgA::byte_size() const {
  std::size_t n = M.byte_size() + K.byte_size() + rho_prime.byte_size();
  if (A) n += A->byte_size();
  if (E) n += E->byte_size();
  if (lambda) n += lambda->byte_size();
  return n;
}

std::pair<PkgD, PkgA> clear_down(const FieldSpec& f, const Matrix& C,
                                 const PkgD& D, std::size_t i,
                                 std::size_t ech_threshold) {
  PkgA a;
  PkgD d;
  if (i == 0) {
    EchResult e = ech(f, C, ech_threshold);
    a.M = std::move(e.M);
    a.K = std::move(e.K);
    a.rho_prime = std::move(e.rho);
    d.R = std::move(e.R);
    d.gamma = std::move(e.gamma);
    return {std::move(d), std::move(a)};
  }
  if (D.gamma.universe != C.cols())
    throw std::invalid_argument("clear_down: column state universe mismatch");
  auto [a_cols, c_rest] = cex(C, D.gamma);
  const Matrix h = mad(f, c_rest, a_cols, D.R);
  EchResult e = ech(f, h, ech_threshold);
  auto [e_mid, r_old] = cex(D.R, e.gamma);
  const Matrix r_updated = mad(f, r_old, e_mid, e.R);
  auto [gamma_merged, lam] = unh(D.gamma, e.gamma);
  d.R = rrf(lam, r_updated, e.R);
  d.gamma = std::move(gamma_merged);
  a.A = std::move(a_cols);
  a.M = std::move(e.M);
  a.K = std::move(e.K);
  a.rho_prime = std::move(e.rho);
  a.E = std::move(e_mid);
  a.lambda = std::move(lam);
  return {std::move(d), std::move(a)};
}

std::pair<Matrix, Matrix> update_row(const FieldSpec& f, const PkgA& A,
                                     const Matrix& C,
                                     const std::optional<Matrix>& B,
                                     std::size_t i) {
  if ((i == 0) == B.has_value())
    throw std::invalid_argument("update_row: B must be given iff i > 0");
  if (i > 0 && (!A.A || !A.E || !A.lambda))
    throw std::invalid_argument("update_row: package lacks merge data");
  const Matrix z = i == 0 ? C : mad(f, C, *A.A, *B);
  auto [v, w] = rex(z, A.rho_prime);
  const Matrix x = mul(f, A.M, v);
  Matrix b_out;
  if (i == 0) {
    b_out = x;
  } else {
    const Matrix s = mad(f, *B, *A.E, x);
    b_out = rrf(*A.lambda, s, x);
  }
  Matrix c_out = mad(f, w, A.K, v);
  return {std::move(c_out), std::move(b_out)};
}

std::pair<Matrix, Matrix> update_row_trafo(const FieldSpec& f, const PkgA& A,
                                           const std::optional<Matrix>& K,
                                           const std::optional<Matrix>& M,
                                           const PkgE& E, std::size_t i,
                                           std::size_t h, std::size_t j) {
  if (h > i) throw std::invalid_argument("update_row_trafo: h must be <= i");
  if ((j == 0) == K.has_value())
    throw std::invalid_argument("update_row_trafo: K must be given iff j > 0");
  if ((h == i) == M.has_value())
    throw std::invalid_argument("update_row_trafo: M must be given iff h < i");

  // Expand K's columns to the current pivot set of block row h: the zero bits
  // of E.delta mark the previously known pivots K's columns refer to.
  Matrix kx;
  if (j > 0) {
    BitString old_marks;
    old_marks.bits.reserve(E.delta.size());
    for (std::uint8_t bit : E.delta.bits) old_marks.bits.push_back(bit ^ 1u);
    kx = crz(*K, old_marks, E.delta.size());
  }

  Matrix m_out, k_out;
  if (h == i && j == 0) {
    m_out = A.M;
    if (i != 0) {
      const Matrix s = mul(f, *A.E, m_out);
      m_out = rrf(*A.lambda, s, m_out);
    }
    k_out = A.K;
    return {std::move(k_out), std::move(m_out)};
  }

  Matrix z;
  if (h != i) {
    if (!A.A) throw std::invalid_argument("update_row_trafo: package lacks A");
    z = j > 0 ? mad(f, kx, *A.A, *M) : mul(f, *A.A, *M);
  } else {
    z = std::move(kx);
  }
  auto [v, w] = rex(z, A.rho_prime);
  if (h == i) v = adi(v, E.delta);
  const Matrix x = mul(f, A.M, v);

  if (h == i && i == 0) {
    m_out = x;
  } else {
    if (!A.E || !A.lambda)
      throw std::invalid_argument("update_row_trafo: package lacks merge data");
    const Matrix s = h != i ? mad(f, *M, *A.E, x) : mul(f, *A.E, x);
    m_out = rrf(*A.lambda, s, x);
  }
  k_out = mad(f, w, A.K, v);
  return {std::move(k_out), std::move(m_out)};
}

PkgE extend(const PkgA& A, const std::optional<PkgE>& E, std::size_t j) {
  if ((j == 0) == E.has_value())
    throw std::invalid_argument("extend: E must be given iff j > 0");
  PkgE out;
  if (j == 0) {
    auto [rho, delta] = un0(A.rho_prime);
    out.rho = std::move(rho);
    out.delta = std::move(delta);
  } else {
    auto [rho, delta] = unh(E->rho, A.rho_prime);
    out.rho = std::move(rho);
    out.delta = std::move(delta);
  }
  return out;
}

Matrix row_lengthen(const Matrix& M, const PkgE& E1, const PkgE& E2) {
  const BitString marks = mkr(E1.rho, E2.rho);
  return crz(M, marks, marks.size());
}

std::pair<Matrix, Matrix> pre_clear_up(const Matrix& B, const PkgD& D) {
  return cex(B, D.gamma);
}

Matrix clear_up(const FieldSpec& f, const Matrix& R, const Matrix& X,
                const Matrix& M) {
  return mad(f, R, X, M);
}

Matrix copy_d(const PkgD& D) { return D.R; }

}  // namespace gfrref
