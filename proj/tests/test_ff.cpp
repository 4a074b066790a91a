#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "gl2lg/ff.hpp"

using namespace gl2lg;

namespace {

// Independent oracle: the set of nonzero squares, by enumeration.
std::set<uint64_t> squares_mod(uint64_t ell) {
  std::set<uint64_t> s;
  for (uint64_t x = 1; x < ell; ++x) s.insert(x * x % ell);
  return s;
}

const uint64_t kSmallPrimes[] = {3, 5, 7, 11, 13, 17, 19, 97};

}  // namespace

TEST_CASE("modulus validation") {
  CHECK_THROWS_AS(PrimeField(0), std::invalid_argument);
  CHECK_THROWS_AS(PrimeField(1), std::invalid_argument);
  CHECK_THROWS_AS(PrimeField(2), std::invalid_argument);
  CHECK_THROWS_AS(PrimeField(9), std::invalid_argument);
  CHECK_THROWS_AS(PrimeField(uint64_t(1) << 31), std::invalid_argument);
  CHECK_THROWS_AS(PrimeField((uint64_t(1) << 31) + 11), std::invalid_argument);
  CHECK_NOTHROW(PrimeField(3));
  CHECK_NOTHROW(PrimeField(2147483647));  // 2^31 - 1
}

TEST_CASE("legendre agrees with square enumeration") {
  for (uint64_t ell : kSmallPrimes) {
    PrimeField F(ell);
    auto sq = squares_mod(ell);
    CHECK(sq.size() == (ell - 1) / 2);
    for (uint64_t a = 0; a < ell; ++a) {
      int expect = a == 0 ? 0 : sq.count(a) ? 1 : -1;
      CHECK(F.legendre(a) == expect);
    }
  }
}

TEST_CASE("legendre pinned values") {
  CHECK(PrimeField(7).legendre(2) == 1);
  CHECK(PrimeField(7).legendre(3) == -1);
  // 2^31 - 1 is 7 mod 8, so 2 is a square
  CHECK(PrimeField(2147483647).legendre(2) == 1);
}

TEST_CASE("smallest nonresidue") {
  CHECK(PrimeField(3).delta() == 2);
  CHECK(PrimeField(5).delta() == 2);
  CHECK(PrimeField(7).delta() == 3);
  CHECK(PrimeField(11).delta() == 2);
  CHECK(PrimeField(13).delta() == 2);
  CHECK(PrimeField(17).delta() == 3);
  for (uint64_t ell : kSmallPrimes) {
    PrimeField F(ell);
    auto sq = squares_mod(ell);
    CHECK(sq.count(F.delta()) == 0);
    for (uint64_t a = 2; a < F.delta(); ++a) CHECK(sq.count(a) == 1);
  }
}

TEST_CASE("field ops") {
  PrimeField F(13);
  CHECK(F.reduce(-1) == 12);
  CHECK(F.reduce(-27) == 12);
  CHECK(F.sub(3, 7) == 9);
  for (uint64_t a = 1; a < 13; ++a) {
    CHECK(F.mul(a, F.inv(a)) == 1);
    CHECK(F.pow(a, 12) == 1);
    CHECK(F.add(a, F.neg(a)) == 0);
  }
  CHECK_THROWS_AS(F.inv(0), std::domain_error);
}

TEST_CASE("sqrt inverts squaring") {
  for (uint64_t ell : kSmallPrimes) {
    PrimeField F(ell);
    for (uint64_t a = 0; a < ell; ++a) {
      auto r = F.sqrt(a);
      if (F.legendre(a) == -1) {
        CHECK(!r);
      } else {
        REQUIRE(r);
        CHECK(F.mul(*r, *r) == a);
      }
    }
  }
  // also exercise the ell = 1 mod 4 Tonelli-Shanks branch at a larger prime
  PrimeField F(1000033);
  for (uint64_t x : {2u, 3u, 999999u, 123456u}) {
    auto r = F.sqrt(F.mul(x, x));
    REQUIRE(r);
    CHECK(F.mul(*r, *r) == F.mul(x, x));
  }
}

TEST_CASE("quadratic extension arithmetic") {
  PrimeField F(13);
  Fp2 alpha{0, 1};
  CHECK(fp2_norm(F, alpha) == F.neg(F.delta()));
  CHECK(fp2_trace(F, alpha) == 0);
  CHECK(fp2_mul(F, alpha, alpha) == Fp2{F.delta(), 0});

  // u * conj(u) = N(u), u + conj(u) = Tr(u)
  for (uint64_t x = 0; x < 13; ++x)
    for (uint64_t y = 0; y < 13; ++y) {
      Fp2 u{x, y};
      Fp2 p = fp2_mul(F, u, fp2_conj(F, u));
      CHECK(p == Fp2{fp2_norm(F, u), 0});
      CHECK(fp2_add(F, u, fp2_conj(F, u)) == Fp2{fp2_trace(F, u), 0});
      if (!fp2_is_zero(u)) {
        CHECK(fp2_mul(F, u, fp2_inv(F, u)) == Fp2{1, 0});
        // multiplicative group has order ell^2 - 1
        CHECK(fp2_pow(F, u, 13 * 13 - 1) == Fp2{1, 0});
        // Frobenius is x -> x^ell
        CHECK(fp2_pow(F, u, 13) == fp2_conj(F, u));
      }
    }
}

TEST_CASE("norm is multiplicative") {
  PrimeField F(13);
  std::mt19937 rng(2024);
  for (int i = 0; i < 100; ++i) {
    Fp2 u{rng() % 13, rng() % 13}, v{rng() % 13, rng() % 13};
    CHECK(fp2_norm(F, fp2_mul(F, u, v)) == F.mul(fp2_norm(F, u), fp2_norm(F, v)));
  }
}
