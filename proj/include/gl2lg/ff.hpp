#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace gl2lg {

// Arithmetic mod an odd prime ell, 3 <= ell < 2^31.  Residues live in
// uint64_t so products never overflow before reduction.  The quadratic
// extension F_{ell^2} is realized as F_ell(alpha) with alpha^2 = delta,
// delta the smallest positive nonresidue (deterministic, so every run
// of the tool agrees on coordinates).
class PrimeField {
 public:
  explicit PrimeField(uint64_t ell) : ell_(ell) {
    if (ell < 3 || ell >= (uint64_t(1) << 31) || ell % 2 == 0 || !is_prime(ell))
      throw std::invalid_argument("modulus must be an odd prime in [3, 2^31): " +
                                  std::to_string(ell));
    delta_ = find_nonresidue();
  }

  uint64_t ell() const { return ell_; }
  uint64_t delta() const { return delta_; }

  uint64_t reduce(int64_t a) const {
    int64_t r = a % int64_t(ell_);
    return r < 0 ? uint64_t(r + int64_t(ell_)) : uint64_t(r);
  }
  uint64_t add(uint64_t a, uint64_t b) const { return (a + b) % ell_; }
  uint64_t sub(uint64_t a, uint64_t b) const { return (a + ell_ - b % ell_) % ell_; }
  uint64_t neg(uint64_t a) const { return a % ell_ == 0 ? 0 : ell_ - a % ell_; }
  uint64_t mul(uint64_t a, uint64_t b) const { return (a % ell_) * (b % ell_) % ell_; }

  uint64_t pow(uint64_t a, uint64_t e) const {
    uint64_t r = 1, b = a % ell_;
    for (; e; e >>= 1) {
      if (e & 1) r = r * b % ell_;
      b = b * b % ell_;
    }
    return r;
  }

  uint64_t inv(uint64_t a) const {
    if (a % ell_ == 0) throw std::domain_error("inverse of zero");
    return pow(a, ell_ - 2);
  }

  // Euler's criterion: 0 on zero, +1 on nonzero squares, -1 otherwise.
  int legendre(uint64_t a) const {
    if (a % ell_ == 0) return 0;
    return pow(a, (ell_ - 1) / 2) == 1 ? 1 : -1;
  }

  // Tonelli-Shanks.  Returns the smaller of the two roots, nothing if a
  // is a nonresidue.
  std::optional<uint64_t> sqrt(uint64_t a) const {
    a %= ell_;
    if (a == 0) return 0;
    if (legendre(a) != 1) return std::nullopt;
    uint64_t r;
    if (ell_ % 4 == 3) {
      r = pow(a, (ell_ + 1) / 4);
    } else {
      uint64_t q = ell_ - 1;
      unsigned s = 0;
      while (q % 2 == 0) q >>= 1, ++s;
      uint64_t z = delta_;  // any nonresidue works
      uint64_t m = s, c = pow(z, q), t = pow(a, q);
      r = pow(a, (q + 1) / 2);
      while (t != 1) {
        uint64_t t2 = t;
        unsigned i = 0;
        while (t2 != 1) t2 = t2 * t2 % ell_, ++i;
        uint64_t b = c;
        for (unsigned j = 0; j + i + 1 < m; ++j) b = b * b % ell_;
        m = i, c = b * b % ell_;
        t = t * c % ell_, r = r * b % ell_;
      }
    }
    return r <= ell_ - r ? r : ell_ - r;
  }

  static bool is_prime(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t d = 2; d * d <= n; ++d)
      if (n % d == 0) return false;
    return true;
  }

 private:
  uint64_t find_nonresidue() const {
    for (uint64_t a = 2; a < ell_; ++a)
      if (legendre(a) == -1) return a;
    throw std::logic_error("no nonresidue found");  // unreachable for odd prime
  }

  uint64_t ell_;
  uint64_t delta_;
};

// x + y*alpha with alpha^2 = delta.
struct Fp2 {
  uint64_t x = 0, y = 0;
  bool operator==(const Fp2&) const = default;
};

inline bool fp2_is_zero(const Fp2& u) { return u.x == 0 && u.y == 0; }

inline Fp2 fp2_add(const PrimeField& F, const Fp2& u, const Fp2& v) {
  return {F.add(u.x, v.x), F.add(u.y, v.y)};
}

inline Fp2 fp2_sub(const PrimeField& F, const Fp2& u, const Fp2& v) {
  return {F.sub(u.x, v.x), F.sub(u.y, v.y)};
}

inline Fp2 fp2_mul(const PrimeField& F, const Fp2& u, const Fp2& v) {
  return {F.add(F.mul(u.x, v.x), F.mul(F.delta(), F.mul(u.y, v.y))),
          F.add(F.mul(u.x, v.y), F.mul(u.y, v.x))};
}

inline Fp2 fp2_scale(const PrimeField& F, uint64_t c, const Fp2& u) {
  return {F.mul(c, u.x), F.mul(c, u.y)};
}

// N(x + y*alpha) = x^2 - delta*y^2, the product with the conjugate.
inline uint64_t fp2_norm(const PrimeField& F, const Fp2& u) {
  return F.sub(F.mul(u.x, u.x), F.mul(F.delta(), F.mul(u.y, u.y)));
}

inline uint64_t fp2_trace(const PrimeField& F, const Fp2& u) {
  return F.add(u.x, u.x);
}

// Frobenius x + y*alpha -> x - y*alpha (alpha^ell = -alpha since delta is
// a nonresidue).
inline Fp2 fp2_conj(const PrimeField& F, const Fp2& u) {
  return {u.x, F.neg(u.y)};
}

inline Fp2 fp2_inv(const PrimeField& F, const Fp2& u) {
  if (fp2_is_zero(u)) throw std::domain_error("inverse of zero in F_{ell^2}");
  uint64_t n = F.inv(fp2_norm(F, u));
  return fp2_scale(F, n, fp2_conj(F, u));
}

inline Fp2 fp2_pow(const PrimeField& F, Fp2 b, uint64_t e) {
  Fp2 r{1, 0};
  for (; e; e >>= 1) {
    if (e & 1) r = fp2_mul(F, r, b);
    b = fp2_mul(F, b, b);
  }
  return r;
}

}  // namespace gl2lg
