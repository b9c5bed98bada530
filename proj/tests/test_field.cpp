#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "gfrref/field.hpp"

using namespace gfrref;

namespace {

// Exhaustive field-axiom check; quadratic/cubic loops, keep order small.
void check_axioms(const FieldSpec& f) {
  const std::uint32_t q = f.order();
  REQUIRE(q >= 2);
  CHECK(f.zero() == 0u);
  CHECK(f.one() == 1u);
  for (Elem a = 0; a < q; ++a) {
    CHECK(f.add(a, 0) == a);
    CHECK(f.mul(a, 1) == a);
    CHECK(f.mul(a, 0) == 0u);
    CHECK(f.add(a, f.neg(a)) == 0u);
    CHECK(f.sub(a, a) == 0u);
    if (a != 0) {
      const Elem ai = f.inv(a);
      CHECK(ai != 0u);
      CHECK(f.mul(a, ai) == 1u);
    }
    for (Elem b = 0; b < q; ++b) {
      CHECK(f.add(a, b) == f.add(b, a));
      CHECK(f.mul(a, b) == f.mul(b, a));
      CHECK(f.valid(f.add(a, b)));
      CHECK(f.valid(f.mul(a, b)));
      CHECK(f.sub(f.add(a, b), b) == a);
    }
  }
  // Associativity and distributivity on a full triple loop for tiny orders,
  // else on a strided subset.
  const std::uint32_t step = q <= 16 ? 1 : q / 11 + 1;
  for (Elem a = 0; a < q; a += step)
    for (Elem b = 0; b < q; b += step)
      for (Elem c = 0; c < q; c += step) {
        CHECK(f.add(f.add(a, b), c) == f.add(a, f.add(b, c)));
        CHECK(f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c)));
        CHECK(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)));
      }
}

}  // namespace

TEST_CASE("prime field basics") {
  const FieldSpec f2(2);
  CHECK(f2.order() == 2u);
  CHECK(f2.add(1, 1) == 0u);
  CHECK(f2.neg(1) == 1u);
  CHECK(f2.inv(1) == 1u);

  const FieldSpec f3(3);
  CHECK(f3.add(2, 2) == 1u);
  CHECK(f3.mul(2, 2) == 1u);
  CHECK(f3.neg(1) == 2u);
  CHECK(f3.inv(2) == 2u);

  const FieldSpec f193(193);
  CHECK(f193.inv(2) == 97u);
  CHECK(f193.mul(2, 97) == 1u);
  CHECK(f193.add(192, 1) == 0u);
}

TEST_CASE("axioms hold exhaustively on small orders") {
  for (std::uint32_t p : {2u, 3u, 5u, 7u, 13u}) check_axioms(FieldSpec(p));
  check_axioms(FieldSpec(2, 2));
  check_axioms(FieldSpec(2, 3));
  check_axioms(FieldSpec(2, 4));
  check_axioms(FieldSpec(3, 2));
  check_axioms(FieldSpec(3, 3));
  check_axioms(FieldSpec(5, 2));
  check_axioms(FieldSpec(193));
  check_axioms(FieldSpec(11, 3));
}

TEST_CASE("default moduli are the first monic irreducibles") {
  CHECK(default_modulus(2, 2) == std::vector<std::uint32_t>{1, 1, 1});
  CHECK(default_modulus(2, 3) == std::vector<std::uint32_t>{1, 1, 0, 1});
  CHECK(default_modulus(3, 2) == std::vector<std::uint32_t>{1, 0, 1});
  CHECK(default_modulus(3, 3) == std::vector<std::uint32_t>{1, 2, 0, 1});
  CHECK(default_modulus(11, 3) == std::vector<std::uint32_t>{4, 1, 0, 1});
  CHECK(FieldSpec(3, 2).modulus() == std::vector<std::uint32_t>{1, 0, 1});
  CHECK(FieldSpec(11, 3).modulus() == std::vector<std::uint32_t>{4, 1, 0, 1});
}

TEST_CASE("GF(9) arithmetic in the x^2+1 basis") {
  const FieldSpec f(3, 2);
  CHECK(f.order() == 9u);
  // Element 3 encodes x; x*x = -1 = 2.
  CHECK(f.mul(3, 3) == 2u);
  CHECK(f.inv(3) == 6u);  // x * 2x = 2x^2 = -2 = 1
  CHECK(f.mul(3, 6) == 1u);
  // (1+x) + (2+x) = 2x -> 6; (1+x)*(1+x) = 1+2x+x^2 = 2x -> 6.
  CHECK(f.add(4, 5) == 6u);
  CHECK(f.mul(4, 4) == 6u);
}

TEST_CASE("GF(1331) arithmetic in the x^3+x+4 basis") {
  const FieldSpec f(11, 3);
  CHECK(f.order() == 1331u);
  // Element 11 encodes x, 121 encodes x^2; x^3 = -x-4 = 10x+7 -> 117.
  CHECK(f.mul(11, 11) == 121u);
  CHECK(f.mul(121, 11) == 117u);
  for (Elem a : {1u, 2u, 10u, 11u, 121u, 117u, 1000u, 1330u}) {
    CHECK(f.mul(a, f.inv(a)) == 1u);
    CHECK(f.add(a, f.neg(a)) == 0u);
  }
}

TEST_CASE("explicit modulus is honored") {
  const FieldSpec f(3, 2, {2, 1, 1});  // x^2 + x + 2
  CHECK(f.modulus() == std::vector<std::uint32_t>{2, 1, 1});
  // x*x = -x-2 = 2x+1 -> 7.
  CHECK(f.mul(3, 3) == 7u);
  check_axioms(f);
  CHECK(f != FieldSpec(3, 2));
  CHECK(f == FieldSpec(3, 2, {2, 1, 1}));
}

TEST_CASE("free-function wrappers match the methods") {
  const FieldSpec f(3, 2);
  for (Elem a = 0; a < f.order(); ++a)
    for (Elem b = 0; b < f.order(); ++b) {
      CHECK(ff_add(f, a, b) == f.add(a, b));
      CHECK(ff_mul(f, a, b) == f.mul(a, b));
      if (b != 0) CHECK(ff_inv(f, b) == f.inv(b));
    }
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS(FieldSpec(1));
  CHECK_THROWS(FieldSpec(4));        // not prime
  CHECK_THROWS(FieldSpec(6));        // not prime
  CHECK_THROWS(FieldSpec(65537));    // characteristic too large
  CHECK_THROWS(FieldSpec(2, 21));    // order too large
  CHECK_THROWS(FieldSpec(2, 2, {1, 0, 1}));  // x^2+1 = (x+1)^2 over GF(2)
  CHECK_THROWS(FieldSpec(3, 2, {0, 0, 1}));  // x^2 reducible
  CHECK_THROWS(FieldSpec(3, 2, {1, 0, 2}));  // not monic
  CHECK_THROWS(FieldSpec(3, 2, {1, 0}));     // wrong length
  CHECK_THROWS(FieldSpec(0, 2));
}

TEST_CASE("field names and equality") {
  CHECK(FieldSpec(3).name() == "GF(3)");
  CHECK(FieldSpec(3, 2).name() == "GF(3^2)");
  CHECK(FieldSpec(2) == FieldSpec(2));
  CHECK(FieldSpec(2) != FieldSpec(3));
  CHECK(FieldSpec(3) != FieldSpec(3, 2));
}

TEST_CASE("largest supported prime works") {
  const FieldSpec f(65521);
  CHECK(f.order() == 65521u);
  CHECK(f.mul(2, f.inv(2)) == 1u);
  CHECK(f.mul(65520, 65520) == 1u);  // (-1)^2
}
