#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace gfrref {

/// A field element in encoded form. For prime fields the encoding is the
/// canonical representative in [0, p). For extension fields GF(p^k) an element
/// sum_i c_i * x^i (0 <= c_i < p) is encoded as the integer sum_i c_i * p^i,
/// so encodings range over [0, p^k).
using Elem = std::uint32_t;

/// Description of GF(p^k). Cheap to copy; the table data is shared.
///
/// Limits: p prime < 2^16, p^k < 2^20. For k > 1 a monic irreducible modulus
/// of degree k is required; arithmetic is polynomial arithmetic mod (modulus, p).
class FieldSpec {
 public:
  /// Prime field GF(p).
  explicit FieldSpec(std::uint32_t p);

  /// Extension field GF(p^k) with the given monic modulus, listed as k+1
  /// coefficients c0..ck from the constant term up; ck must be 1.
  /// If `modulus` is empty a default modulus is chosen deterministically
  /// (the lexicographically first monic irreducible of degree k, constant
  /// coefficient varying fastest).
  FieldSpec(std::uint32_t p, std::uint32_t k,
            std::vector<std::uint32_t> modulus = {});

  std::uint32_t p() const { return data_->p; }
  std::uint32_t k() const { return data_->k; }
  std::uint32_t order() const { return data_->q; }
  /// Modulus coefficients c0..ck (size k+1); for k == 1 returns {0, 1}
  /// standing for the polynomial x (unused by arithmetic).
  const std::vector<std::uint32_t>& modulus() const { return data_->modulus; }

  Elem zero() const { return 0; }
  Elem one() const { return 1; }

  bool valid(Elem a) const { return a < data_->q; }

  Elem add(Elem a, Elem b) const {
    const Data& d = *data_;
    if (d.k == 1) {
      const std::uint32_t s = a + b;
      return s >= d.p ? s - d.p : s;
    }
    if (d.p == 2) return a ^ b;
    if (a == 0) return b;
    if (b == 0) return a;
    const std::uint32_t order = d.q - 1;
    const std::uint32_t la = d.log_[a], lb = d.log_[b];
    const std::uint32_t diff = lb >= la ? lb - la : lb + order - la;
    const std::uint32_t z = d.zech_[diff];
    if (z == kZechZero) return 0;
    const std::uint32_t e = la + z;
    return d.exp_[e >= order ? e - order : e];
  }

  Elem neg(Elem a) const {
    const Data& d = *data_;
    if (d.k == 1) return a == 0 ? 0 : d.p - a;
    if (d.p == 2) return a;
    if (a == 0) return 0;
    const std::uint32_t order = d.q - 1;
    // -1 is encoded as p-1 (the constant polynomial p-1).
    const std::uint32_t e = d.log_[a] + d.log_[d.p - 1];
    return d.exp_[e >= order ? e - order : e];
  }

  Elem sub(Elem a, Elem b) const { return add(a, neg(b)); }

  Elem mul(Elem a, Elem b) const {
    const Data& d = *data_;
    if (d.k == 1) return Elem(std::uint64_t(a) * b % d.p);
    if (a == 0 || b == 0) return 0;
    const std::uint32_t order = d.q - 1;
    const std::uint32_t e = d.log_[a] + d.log_[b];
    return d.exp_[e >= order ? e - order : e];
  }

  /// Multiplicative inverse. Throws std::domain_error for 0.
  Elem inv(Elem a) const;

  bool operator==(const FieldSpec& other) const;
  bool operator!=(const FieldSpec& other) const { return !(*this == other); }

  /// "GF(p)" or "GF(p^k)".
  std::string name() const;

 private:
  static constexpr std::uint32_t kZechZero = 0xffffffffu;  // 1 + g^n == 0

  struct Data {
    std::uint32_t p = 0;
    std::uint32_t k = 1;
    std::uint32_t q = 0;                  // p^k
    std::vector<std::uint32_t> modulus;   // c0..ck
    // Discrete log tables, built only for k > 1: exp_[i] = g^i for a fixed
    // generator g, log_[e] = i with exp_[i] == e (log_[0] unused), and Zech
    // logarithms zech_[n] = log(1 + g^n) for constant-time addition.
    std::vector<Elem> exp_;
    std::vector<std::uint32_t> log_;
    std::vector<std::uint32_t> zech_;
  };
  std::shared_ptr<const Data> data_;
};

/// Field operations in free-function form.
Elem ff_add(const FieldSpec& f, Elem a, Elem b);
Elem ff_mul(const FieldSpec& f, Elem a, Elem b);
Elem ff_inv(const FieldSpec& f, Elem a);

/// The deterministic default modulus for GF(p^k), as chosen by FieldSpec when
/// none is given. Exposed for tests and the CLI.
std::vector<std::uint32_t> default_modulus(std::uint32_t p, std::uint32_t k);

}  // namespace gfrref
