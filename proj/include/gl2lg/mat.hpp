#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

#include "gl2lg/ff.hpp"

namespace gl2lg {

// Row-major 2x2 matrix over F_ell.
struct Mat2 {
  uint64_t a = 0, b = 0, c = 0, d = 0;
  bool operator==(const Mat2&) const = default;
};

inline Mat2 mat_identity() { return {1, 0, 0, 1}; }
inline Mat2 mat_scalar(uint64_t lam) { return {lam, 0, 0, lam}; }

inline Mat2 mat_reduce(const PrimeField& F, int64_t a, int64_t b, int64_t c, int64_t d) {
  return {F.reduce(a), F.reduce(b), F.reduce(c), F.reduce(d)};
}

inline uint64_t mat_det(const PrimeField& F, const Mat2& g) {
  return F.sub(F.mul(g.a, g.d), F.mul(g.b, g.c));
}

inline uint64_t mat_tr(const PrimeField& F, const Mat2& g) { return F.add(g.a, g.d); }

inline bool mat_is_scalar(const Mat2& g) { return g.b == 0 && g.c == 0 && g.a == g.d; }

inline Mat2 mat_mul(const PrimeField& F, const Mat2& g, const Mat2& h) {
  return {F.add(F.mul(g.a, h.a), F.mul(g.b, h.c)),
          F.add(F.mul(g.a, h.b), F.mul(g.b, h.d)),
          F.add(F.mul(g.c, h.a), F.mul(g.d, h.c)),
          F.add(F.mul(g.c, h.b), F.mul(g.d, h.d))};
}

inline Mat2 mat_inv(const PrimeField& F, const Mat2& g) {
  uint64_t di = F.inv(mat_det(F, g));
  return {F.mul(di, g.d), F.mul(di, F.neg(g.b)), F.mul(di, F.neg(g.c)), F.mul(di, g.a)};
}

inline Mat2 mat_pow(const PrimeField& F, Mat2 b, uint64_t e) {
  Mat2 r = mat_identity();
  for (; e; e >>= 1) {
    if (e & 1) r = mat_mul(F, r, b);
    b = mat_mul(F, b, b);
  }
  return r;
}

// disc(charpoly) = tr^2 - 4 det.  Zero iff repeated eigenvalue; a nonzero
// square iff two distinct rational eigenvalues; a nonresidue iff the
// eigenvalues are conjugate in F_{ell^2}.
inline uint64_t charpoly_disc(const PrimeField& F, const Mat2& g) {
  uint64_t t = mat_tr(F, g);
  return F.sub(F.mul(t, t), F.mul(4, mat_det(F, g)));
}

// Multiplicative order; caller guarantees g is invertible.
inline uint64_t element_order(const PrimeField& F, const Mat2& g) {
  Mat2 p = g;
  uint64_t n = 1;
  while (!(p == mat_identity())) p = mat_mul(F, p, g), ++n;
  return n;
}

// Order of the image in PGL_2: least n with g^n scalar.
inline uint64_t pgl_order(const PrimeField& F, const Mat2& g) {
  Mat2 p = g;
  uint64_t n = 1;
  while (!mat_is_scalar(p)) p = mat_mul(F, p, g), ++n;
  return n;
}

// As pgl_order but gives up past `cap` (returns 0).  Used by searches that
// only care about small orders.
inline uint64_t pgl_order_capped(const PrimeField& F, const Mat2& g, uint64_t cap) {
  Mat2 p = g;
  for (uint64_t n = 1; n <= cap; ++n) {
    if (mat_is_scalar(p)) return n;
    p = mat_mul(F, p, g);
  }
  return 0;
}

// Scale so the first nonzero entry (reading a, b, c, d) is 1.  Canonical
// representative of the class of g in PGL_2.
inline Mat2 proj_canon(const PrimeField& F, const Mat2& g) {
  uint64_t lead = g.a ? g.a : g.b ? g.b : g.c ? g.c : g.d;
  uint64_t s = F.inv(lead);
  return {F.mul(s, g.a), F.mul(s, g.b), F.mul(s, g.c), F.mul(s, g.d)};
}

// --- the projective line over F_ell ---
//
// Lines through the origin in F_ell^2, normalized so the first nonzero
// coordinate is 1, and indexed 0..ell: index t < ell is [1 : t], index
// ell is [0 : 1].

struct ProjLine {
  uint64_t x = 0, y = 0;
  bool operator==(const ProjLine&) const = default;
};

inline uint64_t line_count(const PrimeField& F) { return F.ell() + 1; }

inline ProjLine line_from_index(const PrimeField& F, uint64_t i) {
  assert(i <= F.ell());
  return i < F.ell() ? ProjLine{1, i} : ProjLine{0, 1};
}

inline uint64_t line_index(const PrimeField& F, const ProjLine& L) {
  assert(!(L.x == 0 && L.y == 0));
  return L.x % F.ell() != 0 ? F.mul(F.inv(L.x), L.y) : F.ell();
}

// g.[x : y] = [a x + b y : c x + d y].
inline ProjLine act(const PrimeField& F, const Mat2& g, const ProjLine& L) {
  uint64_t u = F.add(F.mul(g.a, L.x), F.mul(g.b, L.y));
  uint64_t v = F.add(F.mul(g.c, L.x), F.mul(g.d, L.y));
  assert(!(u == 0 && v == 0));  // g invertible
  if (u != 0) return {1, F.mul(F.inv(u), v)};
  return {0, 1};
}

inline uint64_t act_index(const PrimeField& F, const Mat2& g, uint64_t i) {
  return line_index(F, act(F, g, line_from_index(F, i)));
}

// Same for P^1(F_{ell^2}); only needed by consistency checks against the
// honest line action, so no indexing scheme here.
struct ProjLine2 {
  Fp2 x, y;
  bool operator==(const ProjLine2&) const = default;
};

inline ProjLine2 line2_normalize(const PrimeField& F, Fp2 x, Fp2 y) {
  assert(!(fp2_is_zero(x) && fp2_is_zero(y)));
  if (!fp2_is_zero(x)) {
    Fp2 s = fp2_inv(F, x);
    return {{1, 0}, fp2_mul(F, s, y)};
  }
  return {{0, 0}, {1, 0}};
}

inline ProjLine2 act2(const PrimeField& F, const Mat2& g, const ProjLine2& L) {
  Fp2 u = fp2_add(F, fp2_scale(F, g.a, L.x), fp2_scale(F, g.b, L.y));
  Fp2 v = fp2_add(F, fp2_scale(F, g.c, L.x), fp2_scale(F, g.d, L.y));
  return line2_normalize(F, u, v);
}

// --- orbit structure on P^1(F_ell) ---
//
// For h of order r in PGL_2 acting on the ell + 1 lines: every nontrivial
// orbit has size exactly r (the stabilizer of a non-fixed line is trivial
// in the cyclic group <h>), the fixed count k is 0, 1, 2 or ell + 1, and
// the permutation sign sigma equals (-1)^s where s is the orbit count.
struct OrbitProfile {
  uint64_t r = 0;      // order of the image of h in PGL_2
  uint64_t k = 0;      // fixed lines
  uint64_t s = 0;      // orbits, fixed lines included
  int sigma = 0;       // permutation sign
};

inline OrbitProfile orbit_profile(const PrimeField& F, const Mat2& h) {
  uint64_t n = line_count(F);
  std::vector<uint64_t> img(n);
  for (uint64_t i = 0; i < n; ++i) img[i] = act_index(F, h, i);

  OrbitProfile p;
  p.r = pgl_order(F, h);
  std::vector<bool> seen(n, false);
  uint64_t transpositions = 0;
  for (uint64_t i = 0; i < n; ++i) {
    if (seen[i]) continue;
    uint64_t len = 0;
    for (uint64_t j = i; !seen[j]; j = img[j]) seen[j] = true, ++len;
    ++p.s;
    if (len == 1) ++p.k;
    // a cycle of length len is a product of len - 1 transpositions
    transpositions += len - 1;
    assert(len == 1 || len == p.r);
  }
  p.sigma = transpositions % 2 == 0 ? 1 : -1;
  return p;
}

}  // namespace gl2lg
