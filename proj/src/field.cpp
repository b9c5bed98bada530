#include "gfrref/field.hpp"

#include <limits>
#include <stdexcept>

namespace gfrref {
namespace {

bool is_prime(std::uint32_t p) {
  if (p < 2) return false;
  for (std::uint32_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

std::uint32_t pow_u32_checked(std::uint32_t p, std::uint32_t k) {
  std::uint64_t q = 1;
  for (std::uint32_t i = 0; i < k; ++i) {
    q *= p;
    if (q >= (1u << 20) + 1) break;
  }
  return q > (1u << 20) ? 0 : std::uint32_t(q);
}

// Polynomials over GF(p), little-endian coefficient vectors, no trailing
// zero normalization requirements beyond deg().
using Poly = std::vector<std::uint32_t>;

int deg(const Poly& a) {
  for (int i = int(a.size()) - 1; i >= 0; --i)
    if (a[std::size_t(i)] != 0) return i;
  return -1;
}

Poly poly_mod(Poly a, const Poly& m, std::uint32_t p) {
  const int dm = deg(m);
  for (int i = deg(a); i >= dm && dm >= 0; i = deg(a)) {
    if (i < dm) break;
    // m is monic, so the quotient coefficient is just the leading coeff.
    const std::uint64_t c = a[std::size_t(i)];
    for (int t = 0; t <= dm; ++t) {
      std::uint64_t v = a[std::size_t(i - dm + t)] + (p - m[std::size_t(t)]) % p * c;
      a[std::size_t(i - dm + t)] = std::uint32_t(v % p);
    }
  }
  return a;
}

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& m, std::uint32_t p) {
  Poly r(a.size() + b.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j)
      r[i + j] = std::uint32_t((r[i + j] + std::uint64_t(a[i]) * b[j]) % p);
  }
  return poly_mod(std::move(r), m, p);
}

// True iff `m` (monic, degree k ≥ 1) has no monic divisor of degree 1..k/2.
bool poly_irreducible(const Poly& m, std::uint32_t p) {
  const int k = deg(m);
  if (k < 1) return false;
  for (int d = 1; 2 * d <= k; ++d) {
    // All monic degree-d candidates, low coefficients counting up.
    std::uint64_t count = 1;
    for (int i = 0; i < d; ++i) count *= p;
    for (std::uint64_t c = 0; c < count; ++c) {
      Poly div(std::size_t(d) + 1, 0);
      std::uint64_t t = c;
      for (int i = 0; i < d; ++i) {
        div[std::size_t(i)] = std::uint32_t(t % p);
        t /= p;
      }
      div[std::size_t(d)] = 1;
      if (deg(poly_mod(m, div, p)) < 0) return false;
    }
  }
  return true;
}

Elem encode(const Poly& a, std::uint32_t p, std::uint32_t k) {
  std::uint64_t v = 0;
  for (std::uint32_t i = k; i-- > 0;)
    v = v * p + (i < a.size() ? a[i] : 0);
  return Elem(v);
}

Poly decode(Elem e, std::uint32_t p, std::uint32_t k) {
  Poly a(k, 0);
  for (std::uint32_t i = 0; i < k; ++i) {
    a[i] = e % p;
    e /= p;
  }
  return a;
}

Elem add_by_digits(Elem a, Elem b, std::uint32_t p, std::uint32_t k) {
  Elem out = 0;
  std::uint32_t scale = 1;
  for (std::uint32_t i = 0; i < k; ++i) {
    out += (a % p + b % p) % p * scale;
    a /= p;
    b /= p;
    scale *= p;
  }
  return out;
}

std::vector<std::uint32_t> prime_factors(std::uint32_t n) {
  std::vector<std::uint32_t> fs;
  for (std::uint32_t d = 2; std::uint64_t(d) * d <= n; ++d) {
    if (n % d == 0) {
      fs.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) fs.push_back(n);
  return fs;
}

}  // namespace

std::vector<std::uint32_t> default_modulus(std::uint32_t p, std::uint32_t k) {
  if (!is_prime(p)) throw std::invalid_argument("field: p must be prime");
  if (k == 1) return {0, 1};
  std::uint64_t count = 1;
  for (std::uint32_t i = 0; i < k; ++i) count *= p;
  for (std::uint64_t c = 0; c < count; ++c) {
    Poly m(k + 1, 0);
    std::uint64_t t = c;
    for (std::uint32_t i = 0; i < k; ++i) {
      m[i] = std::uint32_t(t % p);
      t /= p;
    }
    m[k] = 1;
    if (poly_irreducible(m, p)) return m;
  }
  throw std::logic_error("field: no irreducible modulus found");  // unreachable
}

FieldSpec::FieldSpec(std::uint32_t p) : FieldSpec(p, 1, {}) {}

FieldSpec::FieldSpec(std::uint32_t p, std::uint32_t k,
                     std::vector<std::uint32_t> modulus) {
  if (!is_prime(p)) throw std::invalid_argument("field: p must be prime");
  if (p >= (1u << 16)) throw std::invalid_argument("field: p must be < 2^16");
  if (k < 1) throw std::invalid_argument("field: k must be >= 1");
  const std::uint32_t q = pow_u32_checked(p, k);
  if (q == 0) throw std::invalid_argument("field: p^k must be < 2^20");

  auto data = std::make_shared<Data>();
  data->p = p;
  data->k = k;
  data->q = q;

  if (k == 1) {
    data->modulus = {0, 1};
    data_ = std::move(data);
    return;
  }

  if (modulus.empty()) modulus = default_modulus(p, k);
  if (modulus.size() != std::size_t(k) + 1 || modulus[k] != 1)
    throw std::invalid_argument("field: modulus must be monic of degree k");
  for (std::uint32_t c : modulus)
    if (c >= p) throw std::invalid_argument("field: modulus coefficient >= p");
  if (!poly_irreducible(modulus, p))
    throw std::invalid_argument("field: modulus is not irreducible");
  data->modulus = modulus;

  // Find a generator of the multiplicative group, then fill discrete-log,
  // antilog and Zech (1 + g^n) tables.
  const std::uint32_t order = q - 1;
  const auto factors = prime_factors(order);
  const Poly mod_poly(modulus.begin(), modulus.end());
  auto pow_elem = [&](const Poly& base, std::uint32_t e) {
    Poly r{1};
    Poly b = base;
    while (e) {
      if (e & 1) r = poly_mulmod(r, b, mod_poly, p);
      b = poly_mulmod(b, b, mod_poly, p);
      e >>= 1;
    }
    return r;
  };
  Poly gen;
  for (Elem cand = 2; cand < q; ++cand) {
    Poly g = decode(cand, p, k);
    bool primitive = true;
    for (std::uint32_t f : factors) {
      if (encode(pow_elem(g, order / f), p, k) == 1) {
        primitive = false;
        break;
      }
    }
    if (primitive) {
      gen = g;
      break;
    }
  }
  if (gen.empty()) throw std::logic_error("field: no generator");  // unreachable

  data->exp_.assign(order, 0);
  data->log_.assign(q, 0);
  Poly cur{1};
  for (std::uint32_t i = 0; i < order; ++i) {
    const Elem e = encode(cur, p, k);
    data->exp_[i] = e;
    data->log_[e] = i;
    cur = poly_mulmod(cur, gen, mod_poly, p);
  }
  data->zech_.assign(order, kZechZero);
  for (std::uint32_t n = 0; n < order; ++n) {
    const Elem s = add_by_digits(1, data->exp_[n], p, k);
    data->zech_[n] = (s == 0) ? kZechZero : data->log_[s];
  }
  data_ = std::move(data);
}

Elem FieldSpec::inv(Elem a) const {
  if (a == 0) throw std::domain_error("field: inverse of zero");
  const Data& d = *data_;
  if (d.k == 1) {
    // Fermat: a^(p-2).
    std::uint64_t r = 1, b = a;
    std::uint32_t e = d.p - 2;
    while (e) {
      if (e & 1) r = r * b % d.p;
      b = b * b % d.p;
      e >>= 1;
    }
    return Elem(r);
  }
  const std::uint32_t order = d.q - 1;
  const std::uint32_t l = d.log_[a];
  return d.exp_[l == 0 ? 0 : order - l];
}

bool FieldSpec::operator==(const FieldSpec& other) const {
  return data_->p == other.data_->p && data_->k == other.data_->k &&
         data_->modulus == other.data_->modulus;
}

std::string FieldSpec::name() const {
  if (k() == 1) return "GF(" + std::to_string(p()) + ")";
  return "GF(" + std::to_string(p()) + "^" + std::to_string(k()) + ")";
}

Elem ff_add(const FieldSpec& f, Elem a, Elem b) { return f.add(a, b); }
Elem ff_mul(const FieldSpec& f, Elem a, Elem b) { return f.mul(a, b); }
Elem ff_inv(const FieldSpec& f, Elem a) { return f.inv(a); }

}  // namespace gfrref
