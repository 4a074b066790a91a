#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "gl2lg/mat.hpp"

using namespace gl2lg;

namespace {

std::vector<Mat2> all_invertible(const PrimeField& F) {
  std::vector<Mat2> out;
  uint64_t ell = F.ell();
  for (uint64_t a = 0; a < ell; ++a)
    for (uint64_t b = 0; b < ell; ++b)
      for (uint64_t c = 0; c < ell; ++c)
        for (uint64_t d = 0; d < ell; ++d)
          if (mat_det(F, {a, b, c, d}) != 0) out.push_back({a, b, c, d});
  return out;
}

Mat2 random_invertible(const PrimeField& F, std::mt19937& rng) {
  for (;;) {
    Mat2 g{rng() % F.ell(), rng() % F.ell(), rng() % F.ell(), rng() % F.ell()};
    if (mat_det(F, g) != 0) return g;
  }
}

}  // namespace

TEST_CASE("group order of GL2") {
  // |GL_2(F_ell)| = (ell^2 - 1)(ell^2 - ell)
  for (uint64_t ell : {3, 5, 7}) {
    PrimeField F(ell);
    CHECK(all_invertible(F).size() == (ell * ell - 1) * (ell * ell - ell));
  }
}

TEST_CASE("matrix algebra basics") {
  PrimeField F(13);
  std::mt19937 rng(7);
  for (int i = 0; i < 200; ++i) {
    Mat2 g = random_invertible(F, rng), h = random_invertible(F, rng),
         k = random_invertible(F, rng);
    CHECK(mat_mul(F, mat_mul(F, g, h), k) == mat_mul(F, g, mat_mul(F, h, k)));
    CHECK(mat_mul(F, g, mat_inv(F, g)) == mat_identity());
    CHECK(mat_det(F, mat_mul(F, g, h)) == F.mul(mat_det(F, g), mat_det(F, h)));
    // Cayley-Hamilton: g^2 - tr(g) g + det(g) = 0
    Mat2 g2 = mat_mul(F, g, g);
    uint64_t t = mat_tr(F, g), d = mat_det(F, g);
    Mat2 ch = {F.add(F.sub(g2.a, F.mul(t, g.a)), d), F.sub(g2.b, F.mul(t, g.b)),
               F.sub(g2.c, F.mul(t, g.c)), F.add(F.sub(g2.d, F.mul(t, g.d)), d)};
    CHECK(ch == Mat2{0, 0, 0, 0});
  }
}

TEST_CASE("orders") {
  PrimeField F(13);
  CHECK(element_order(F, mat_identity()) == 1);
  CHECK(element_order(F, {0, 1, 12, 0}) == 4);   // rotation by i
  CHECK(pgl_order(F, {0, 1, 12, 0}) == 2);
  CHECK(element_order(F, {1, 1, 0, 1}) == 13);   // unipotent
  CHECK(pgl_order(F, {1, 1, 0, 1}) == 13);
  CHECK(pgl_order(F, mat_scalar(5)) == 1);
  CHECK(pgl_order_capped(F, {1, 1, 0, 1}, 6) == 0);
  CHECK(pgl_order_capped(F, {1, 1, 0, 1}, 13) == 13);

  std::mt19937 rng(11);
  uint64_t gl2 = (13 * 13 - 1) * (13 * 13 - 13);
  for (int i = 0; i < 100; ++i) {
    Mat2 g = random_invertible(F, rng);
    uint64_t n = element_order(F, g);
    CHECK(gl2 % n == 0);
    CHECK(n % pgl_order(F, g) == 0);
  }
}

TEST_CASE("charpoly discriminant classes") {
  PrimeField F(13);
  CHECK(charpoly_disc(F, {2, 0, 0, 5}) == F.reduce((2 + 5) * (2 + 5) - 4 * 10));
  CHECK(F.legendre(charpoly_disc(F, {2, 0, 0, 5})) == 1);   // distinct rational eigenvalues
  CHECK(charpoly_disc(F, {3, 1, 0, 3}) == 0);               // repeated eigenvalue
  CHECK(F.legendre(charpoly_disc(F, {0, 2, 1, 0})) == -1);  // x^2 - 2 irreducible mod 13
}

TEST_CASE("projective line indexing and action") {
  for (uint64_t ell : {5, 13}) {
    PrimeField F(ell);
    for (uint64_t i = 0; i <= ell; ++i)
      CHECK(line_index(F, line_from_index(F, i)) == i);
    CHECK(line_index(F, {2, 6}) == F.mul(F.inv(2), 6));
    CHECK(line_index(F, {0, 5}) == ell);

    // the action permutes the lines
    std::mt19937 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      Mat2 g = random_invertible(F, rng);
      std::set<uint64_t> image;
      for (uint64_t i = 0; i <= ell; ++i) image.insert(act_index(F, g, i));
      CHECK(image.size() == ell + 1);
      // compatible with multiplication
      Mat2 h = random_invertible(F, rng);
      for (uint64_t i = 0; i <= ell; ++i)
        CHECK(act_index(F, mat_mul(F, g, h), i) == act_index(F, g, act_index(F, h, i)));
    }
  }
}

TEST_CASE("projective canonicalization") {
  PrimeField F(7);
  std::mt19937 rng(5);
  for (int i = 0; i < 50; ++i) {
    Mat2 g = random_invertible(F, rng);
    Mat2 cg = proj_canon(F, g);
    for (uint64_t lam = 1; lam < 7; ++lam) {
      Mat2 scaled = {F.mul(lam, g.a), F.mul(lam, g.b), F.mul(lam, g.c), F.mul(lam, g.d)};
      CHECK(proj_canon(F, scaled) == cg);
    }
  }
}

TEST_CASE("orbit profile pinned examples") {
  {
    PrimeField F(5);
    OrbitProfile p = orbit_profile(F, {1, 1, 0, 1});  // unipotent: one fixed line
    CHECK(p.r == 5);
    CHECK(p.k == 1);
    CHECK(p.s == 2);
    CHECK(p.sigma == 1);

    p = orbit_profile(F, {2, 0, 0, 1});  // diag(2,1), 2 a generator mod 5
    CHECK(p.r == 4);
    CHECK(p.k == 2);
    CHECK(p.s == 3);
    CHECK(p.sigma == -1);
  }
  {
    PrimeField F(7);
    OrbitProfile p = orbit_profile(F, {0, 3, 1, 0});  // square root of 3I: fixed-point free
    CHECK(p.r == 2);
    CHECK(p.k == 0);
    CHECK(p.s == 4);
    CHECK(p.sigma == 1);
  }
}

TEST_CASE("orbit structure, exhaustive at small ell") {
  for (uint64_t ell : {3, 5, 7}) {
    PrimeField F(ell);
    for (const Mat2& g : all_invertible(F)) {
      OrbitProfile p = orbit_profile(F, g);
      bool scalar = mat_is_scalar(g);
      CHECK((p.k == 0 || p.k == 1 || p.k == 2 || p.k == ell + 1));
      CHECK((p.k == ell + 1) == scalar);
      // sign of the permutation is (-1)^s, and +1 exactly on square det
      CHECK(p.sigma == ((p.s % 2 == 0) ? 1 : -1));
      CHECK((p.sigma == 1) == (F.legendre(mat_det(F, g)) == 1));
      // nontrivial orbits all have length r: total count accounts for it
      CHECK(p.k + (ell + 1 - p.k) / p.r * p.r == ell + 1);
      CHECK(p.s == p.k + (ell + 1 - p.k) / std::max<uint64_t>(p.r, 1));
    }
  }
}
