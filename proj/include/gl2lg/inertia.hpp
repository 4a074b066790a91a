#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gl2lg/cartan.hpp"
#include "gl2lg/ff.hpp"

namespace gl2lg {

// The non-global, non-escape shapes a mod-ell image can take: the three
// exceptional projective images plus the Klein four group sitting across a
// normalizer pair.
enum class ExceptionalImage { A4, S4, A5, KleinFour };

inline constexpr ExceptionalImage kAllExceptionalImages[] = {
    ExceptionalImage::A4, ExceptionalImage::S4, ExceptionalImage::A5,
    ExceptionalImage::KleinFour};

inline const char* exceptional_image_name(ExceptionalImage im) {
  switch (im) {
    case ExceptionalImage::A4: return "A4";
    case ExceptionalImage::S4: return "S4";
    case ExceptionalImage::A5: return "A5";
    case ExceptionalImage::KleinFour: return "KleinFour";
  }
  return "?";
}

inline ExceptionalImage parse_exceptional_image(const std::string& s) {
  for (ExceptionalImage im : kAllExceptionalImages)
    if (s == exceptional_image_name(im)) return im;
  throw std::invalid_argument("unknown image: " + s + " (want A4, S4, A5 or KleinFour)");
}

// largest element order in the projective image
inline uint64_t exceptional_image_h(ExceptionalImage im) {
  switch (im) {
    case ExceptionalImage::A4: return 3;
    case ExceptionalImage::S4: return 4;
    case ExceptionalImage::A5: return 5;
    case ExceptionalImage::KleinFour: return 2;
  }
  return 0;
}

/*
  Over a degree-d number field, the image of an inertia group at a prime
  above ell contains a cyclic piece of order at least (ell - 1)/e with
  e <= 3d (tame character of the semistabilized curve).  An image whose
  elements have projective order at most h therefore forces

      (ell - 1)/(3d) <= h,  i.e.  ell <= 3*d*h + 1.
*/
inline uint64_t exceptional_bound(uint64_t degree_d, ExceptionalImage im) {
  if (degree_d == 0) throw std::invalid_argument("number-field degree must be positive");
  return 3 * degree_d * exceptional_image_h(im) + 1;
}

// Residue class (mod m) where the (image, target) failure can live, per the
// classification; nullopt when that pairing never produces a failure.  The
// Borel and split-Cartan columns coincide, and the Klein four shape only
// arises across the two normalizers.
inline std::optional<std::pair<uint64_t, uint64_t>> failure_congruence(ExceptionalImage im,
                                                                      StandardTarget t) {
  using ST = StandardTarget;
  uint64_t m = 0;
  switch (im) {
    case ExceptionalImage::A4: m = 12; break;
    case ExceptionalImage::S4: m = 24; break;
    case ExceptionalImage::A5: m = 60; break;
    case ExceptionalImage::KleinFour:
      if (t == ST::SplitNormalizer) return std::pair<uint64_t, uint64_t>{4, 3};
      if (t == ST::NonsplitNormalizer) return std::pair<uint64_t, uint64_t>{4, 1};
      return std::nullopt;
  }
  switch (t) {
    case ST::Borel:
    case ST::SplitCartan: return std::pair<uint64_t, uint64_t>{m, 1};
    case ST::NonsplitCartan: return std::pair<uint64_t, uint64_t>{m, m - 1};
    case ST::SplitNormalizer: return std::pair<uint64_t, uint64_t>{m, m == 12 ? 7 : m == 24 ? 13 : 31};
    case ST::NonsplitNormalizer:
      return std::pair<uint64_t, uint64_t>{m, m == 12 ? 5 : m == 24 ? 11 : 29};
  }
  return std::nullopt;
}

// True when the failure forces det(G) inside the squares, i.e. the base
// field must contain the quadratic subfield of the ell-th cyclotomic field.
// Only the S4 normalizer cases escape this: their sign character realizes
// nonsquare determinants.
inline bool requires_square_determinants(ExceptionalImage im, StandardTarget t) {
  return !(im == ExceptionalImage::S4 &&
           (t == StandardTarget::SplitNormalizer || t == StandardTarget::NonsplitNormalizer));
}

// Odd primes up to the inertia bound lying in the failure class.  ell = 3
// qualifies for the Klein four split-normalizer case and really occurs
// there (quaternion image); the exceptional congruences start at 5 on
// their own.
inline std::vector<uint64_t> feasible_exceptional_primes(uint64_t degree_d, ExceptionalImage im,
                                                         StandardTarget t) {
  std::vector<uint64_t> out;
  auto cong = failure_congruence(im, t);
  if (!cong) return out;
  uint64_t bound = exceptional_bound(degree_d, im);
  for (uint64_t ell = 3; ell <= bound; ell += 2)
    if (PrimeField::is_prime(ell) && ell % cong->first == cong->second) out.push_back(ell);
  return out;
}

}  // namespace gl2lg
