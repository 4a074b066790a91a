#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "gl2lg/cartan.hpp"
#include "gl2lg/ff.hpp"
#include "gl2lg/subgrp.hpp"

namespace gl2lg {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/*
  j-invariants arrive as factored expressions like

      -2^12*5^3*11*13^4/3^13

  grammar: ['-'] factor (('*' | '/') factor)*, factor = digits ['^' digits].
  Plain integers and simple fractions are the degenerate cases.
*/
inline BigRational parse_j_expression(const std::string& s) {
  size_t i = 0;
  auto skip = [&] {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  };
  auto digits = [&]() -> BigInt {
    skip();
    size_t start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == start) throw std::invalid_argument("expected digits in j expression: " + s);
    return BigInt(s.substr(start, i - start));
  };
  auto factor = [&]() -> BigInt {
    BigInt base = digits();
    skip();
    if (i < s.size() && s[i] == '^') {
      ++i;
      BigInt e = digits();
      if (e < 0 || e > 100000) throw std::invalid_argument("exponent out of range: " + s);
      return boost::multiprecision::pow(base, e.convert_to<unsigned>());
    }
    return base;
  };

  skip();
  bool negative = false;
  if (i < s.size() && s[i] == '-') {
    negative = true;
    ++i;
  }
  BigRational value(factor());
  skip();
  while (i < s.size() && (s[i] == '*' || s[i] == '/')) {
    char op = s[i++];
    BigInt f = factor();
    if (op == '*') {
      value *= f;
    } else {
      if (f == 0) throw std::invalid_argument("division by zero in j expression: " + s);
      value /= f;
    }
    skip();
  }
  if (i != s.size()) throw std::invalid_argument("trailing junk in j expression: " + s);
  return negative ? -value : value;
}

struct Curve {
  BigRational a;  // y^2 = x^3 + a x + b
  BigRational b;
  BigRational j;
};

inline BigRational curve_j_invariant(const BigRational& a, const BigRational& b) {
  BigRational d = 4 * a * a * a + 27 * b * b;
  if (d == 0) throw std::invalid_argument("singular model: 4a^3 + 27b^2 = 0");
  return 1728 * (4 * a * a * a) / d;
}

/*
  One fixed curve with the requested j-invariant:

      a = 3 j (1728 - j),  b = 2 j (1728 - j)^2

  gives 4a^3 + 27b^2 = 108 * 1728 * j^2 (1728 - j)^3, so the recomputed
  j-invariant collapses back to j.  Any other choice differs by a twist,
  which the scan predicates cannot see.
*/
inline Curve curve_from_j(const BigRational& j) {
  Curve e;
  e.j = j;
  if (j == 0) {
    e.a = 0;
    e.b = 1;
  } else if (j == 1728) {
    e.a = 1;
    e.b = 0;
  } else {
    e.a = 3 * j * (1728 - j);
    e.b = 2 * j * (1728 - j) * (1728 - j);
  }
  if (curve_j_invariant(e.a, e.b) != j) throw std::logic_error("j-invariant self-check failed");
  return e;
}

struct ApRecord {
  uint64_t p = 0;
  int64_t ap = 0;
  bool good = false;
  std::array<bool, 5> compatible{};  // per StandardTarget, valid when good
};

namespace detail {

// value of a rational mod p, or nullopt when p divides the denominator
inline std::optional<uint64_t> rational_mod(const BigRational& q, const PrimeField& P) {
  BigInt den = boost::multiprecision::denominator(q) % P.ell();
  if (den == 0) return std::nullopt;
  BigInt num = boost::multiprecision::numerator(q) % int64_t(P.ell());
  uint64_t n = ((num + int64_t(P.ell())) % int64_t(P.ell())).convert_to<uint64_t>();
  return P.mul(n, P.inv(den.convert_to<uint64_t>()));
}

}  // namespace detail

/*
  Naive point count by the quadratic character sum:

      #E(F_p) = p + 1 + sum_x chi(x^3 + a x + b),

  so a_p = p + 1 - #E = -sum_x chi(x^3 + a x + b).  O(p) per prime, which
  is all a 10^4 scan needs.
*/
inline ApRecord trace_of_frobenius(const Curve& e, uint64_t p) {
  ApRecord r;
  r.p = p;
  PrimeField P(p);
  auto a = detail::rational_mod(e.a, P);
  auto b = detail::rational_mod(e.b, P);
  if (!a || !b) return r;
  uint64_t disc = P.add(P.mul(4, P.mul(*a, P.mul(*a, *a))), P.mul(27, P.mul(*b, *b)));
  if (disc == 0) return r;
  r.good = true;
  int64_t sum = 0;
  for (uint64_t x = 0; x < p; ++x) {
    uint64_t f = P.add(P.mul(x, P.mul(x, x)), P.add(P.mul(*a, x), *b));
    sum += P.legendre(f);
  }
  r.ap = -sum;
  if (r.ap * r.ap > int64_t(4 * p)) throw std::logic_error("Hasse bound violated");
  return r;
}

/*
  What a_p alone reveals about the Frobenius class mod ell: its
  characteristic polynomial x^2 - a_p x + p, hence the discriminant
  D = a_p^2 - 4p.  D a nonzero square means split semisimple, a nonsquare
  means irreducible, and a_p = 0 puts the class in the swapping coset of
  both normalizers.  D = 0 stays compatible with everything: a scalar and a
  non-semisimple class are indistinguishable from here, and inclusive
  counting can never fabricate a violation.
*/
inline bool frobenius_compatible(int64_t ap, uint64_t p, const PrimeField& F, StandardTarget t) {
  uint64_t ell = F.ell();
  int64_t dd = (ap * ap - int64_t(4 * p)) % int64_t(ell);
  uint64_t d = uint64_t((dd + int64_t(ell)) % int64_t(ell));
  bool trace_zero = (ap % int64_t(ell) + int64_t(ell)) % int64_t(ell) == 0;
  int chi = F.legendre(d);
  switch (t) {
    case StandardTarget::Borel:
    case StandardTarget::SplitCartan: return chi >= 0;
    case StandardTarget::NonsplitCartan: return chi <= 0;
    case StandardTarget::SplitNormalizer: return chi >= 0 || trace_zero;
    case StandardTarget::NonsplitNormalizer: return chi <= 0 || trace_zero;
  }
  return false;
}

struct ScanReport {
  BigRational j;
  uint64_t ell = 0;
  StandardTarget target = StandardTarget::SplitNormalizer;
  uint64_t p_max = 0;
  size_t scanned = 0;                 // good primes counted
  size_t skipped = 0;                 // bad reduction or p = ell
  std::vector<uint64_t> incompatible;
  std::optional<uint64_t> first_violation;
  std::vector<ApRecord> records;
  bool consistent = false;
};

// Every odd prime up to p_max in order; ell and bad-reduction primes are
// recorded but never counted as violations.
inline ScanReport local_scan(const Curve& e, const PrimeField& F, StandardTarget t,
                             uint64_t p_max, unsigned threads = 1) {
  if (p_max < 50) throw std::invalid_argument("scan bound too small to mean anything");
  ScanReport rep;
  rep.j = e.j;
  rep.ell = F.ell();
  rep.target = t;
  rep.p_max = p_max;

  std::vector<uint64_t> primes;
  for (uint64_t p = 3; p <= p_max; p += 2)
    if (PrimeField::is_prime(p)) primes.push_back(p);

  rep.records.resize(primes.size());
  detail::parallel_for(primes.size(), threads, [&](size_t i, unsigned) {
    uint64_t p = primes[i];
    if (p == F.ell()) {
      rep.records[i].p = p;
      return;
    }
    ApRecord r = trace_of_frobenius(e, p);
    if (r.good)
      for (StandardTarget tt : kAllTargets)
        r.compatible[size_t(tt)] = frobenius_compatible(r.ap, p, F, tt);
    rep.records[i] = r;
  });

  for (const ApRecord& r : rep.records) {
    if (!r.good) {
      ++rep.skipped;
      continue;
    }
    ++rep.scanned;
    if (!r.compatible[size_t(t)]) {
      rep.incompatible.push_back(r.p);
      if (!rep.first_violation) rep.first_violation = r.p;
    }
  }
  rep.consistent = rep.incompatible.empty();
  return rep;
}

inline std::string scan_to_machine(const ScanReport& r) {
  std::ostringstream os;
  os << "# gl2lg frobenius scan v1\n";
  os << "# j=" << r.j << " ell=" << r.ell << " target=" << target_name(r.target)
     << " p_max=" << r.p_max << '\n';
  os << "# columns: p,ap,good,compatible\n";
  for (const ApRecord& rec : r.records)
    os << rec.p << ',' << (rec.good ? rec.ap : 0) << ',' << (rec.good ? 1 : 0) << ','
       << (rec.good && rec.compatible[size_t(r.target)] ? 1 : 0) << '\n';
  os << "# scanned=" << r.scanned << " skipped=" << r.skipped
     << " violations=" << r.incompatible.size() << '\n';
  os << "# consistent=" << (r.consistent ? 1 : 0) << '\n';
  return os.str();
}

inline std::string scan_to_text(const ScanReport& r) {
  std::ostringstream os;
  os << "frobenius scan of j=" << r.j << " against " << target_name(r.target)
     << " mod " << r.ell << ", p <= " << r.p_max << '\n';
  os << "  good primes: " << r.scanned << " (skipped " << r.skipped << ")\n";
  if (r.consistent) {
    os << "  consistent: every good Frobenius class fits the target\n";
  } else {
    os << "  INCONSISTENT at " << r.incompatible.size() << " prime"
       << (r.incompatible.size() == 1 ? "" : "s") << ", first " << *r.first_violation << '\n';
    size_t shown = 0;
    os << "  violating primes:";
    for (uint64_t p : r.incompatible) {
      if (++shown > 12) {
        os << " ...";
        break;
      }
      os << ' ' << p;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace gl2lg
