#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gl2lg/ff.hpp"
#include "gl2lg/mat.hpp"

namespace gl2lg {

enum class StandardTarget { Borel, SplitCartan, NonsplitCartan, SplitNormalizer, NonsplitNormalizer };

constexpr std::array<StandardTarget, 5> kAllTargets = {
    StandardTarget::Borel, StandardTarget::SplitCartan, StandardTarget::NonsplitCartan,
    StandardTarget::SplitNormalizer, StandardTarget::NonsplitNormalizer};

inline const char* target_name(StandardTarget t) {
  switch (t) {
    case StandardTarget::Borel: return "Borel";
    case StandardTarget::SplitCartan: return "Csp";
    case StandardTarget::NonsplitCartan: return "Cns";
    case StandardTarget::SplitNormalizer: return "Nsp";
    case StandardTarget::NonsplitNormalizer: return "Nns";
  }
  return "?";
}

inline std::optional<StandardTarget> parse_target(const std::string& s) {
  for (StandardTarget t : kAllTargets)
    if (s == target_name(t)) return t;
  return std::nullopt;
}

// A split Cartan subgroup is cut out by an unordered pair of distinct
// rational lines (its two eigenlines); a nonsplit one by the pair of
// conjugate lines [1 : alpha], [1 : alpha^ell] for alpha in F_{ell^2}
// outside F_ell, which is determined by (Tr(alpha), N(alpha)).
struct SplitFrame {
  uint64_t l1 = 0, l2 = 0;  // line indices, l1 < l2
  bool operator==(const SplitFrame&) const = default;
};

struct NonsplitFrame {
  uint64_t tr = 0, nrm = 0;  // x^2 - tr x + nrm irreducible over F_ell
  bool operator==(const NonsplitFrame&) const = default;
};

// A Borel subgroup is the stabilizer of a single line; carrying it in the
// same variant lets containment searches report a witness for every
// standard target.
struct BorelFrame {
  uint64_t line = 0;
  bool operator==(const BorelFrame&) const = default;
};

using CartanFrame = std::variant<SplitFrame, NonsplitFrame, BorelFrame>;

inline std::string frame_to_string(const CartanFrame& f) {
  if (const auto* sf = std::get_if<SplitFrame>(&f))
    return "lines{" + std::to_string(sf->l1) + "," + std::to_string(sf->l2) + "}";
  if (const auto* bf = std::get_if<BorelFrame>(&f))
    return "line{" + std::to_string(bf->line) + "}";
  const auto& nf = std::get<NonsplitFrame>(f);
  return "minpoly{tr=" + std::to_string(nf.tr) + ",norm=" + std::to_string(nf.nrm) + "}";
}

inline std::vector<SplitFrame> all_split_frames(const PrimeField& F) {
  std::vector<SplitFrame> out;
  uint64_t n = line_count(F);
  out.reserve(n * (n - 1) / 2);
  for (uint64_t i = 0; i < n; ++i)
    for (uint64_t j = i + 1; j < n; ++j) out.push_back({i, j});
  return out;
}

inline std::vector<NonsplitFrame> all_nonsplit_frames(const PrimeField& F) {
  std::vector<NonsplitFrame> out;
  out.reserve(F.ell() * (F.ell() - 1) / 2);
  for (uint64_t t = 0; t < F.ell(); ++t)
    for (uint64_t n = 0; n < F.ell(); ++n)
      if (F.legendre(F.sub(F.mul(t, t), F.mul(4, n))) == -1) out.push_back({t, n});
  return out;
}

// Literal element sets of the standard groups.  Orders: Borel
// ell(ell-1)^2, split Cartan (ell-1)^2 with normalizer twice that,
// nonsplit Cartan ell^2 - 1 with normalizer twice that.
inline std::vector<Mat2> standard_group(const PrimeField& F, StandardTarget t) {
  std::vector<Mat2> out;
  uint64_t ell = F.ell(), delta = F.delta();
  switch (t) {
    case StandardTarget::Borel:
      for (uint64_t a = 1; a < ell; ++a)
        for (uint64_t d = 1; d < ell; ++d)
          for (uint64_t b = 0; b < ell; ++b) out.push_back({a, b, 0, d});
      break;
    case StandardTarget::SplitCartan:
      for (uint64_t a = 1; a < ell; ++a)
        for (uint64_t d = 1; d < ell; ++d) out.push_back({a, 0, 0, d});
      break;
    case StandardTarget::SplitNormalizer:
      out = standard_group(F, StandardTarget::SplitCartan);
      for (uint64_t b = 1; b < ell; ++b)
        for (uint64_t c = 1; c < ell; ++c) out.push_back({0, b, c, 0});
      break;
    case StandardTarget::NonsplitCartan:
      for (uint64_t a = 0; a < ell; ++a)
        for (uint64_t b = 0; b < ell; ++b)
          if (a || b) out.push_back({a, F.mul(delta, b), b, a});
      break;
    case StandardTarget::NonsplitNormalizer:
      out = standard_group(F, StandardTarget::NonsplitCartan);
      for (uint64_t a = 0; a < ell; ++a)
        for (uint64_t b = 0; b < ell; ++b)
          if (a || b) out.push_back({a, F.neg(F.mul(delta, b)), b, F.neg(a)});
      break;
  }
  return out;
}

enum class FrameMembership { No, InCartan, InNormalizerOnly };

// Membership of g in the Cartan subgroup attached to a frame, or in its
// normalizer.  For a split frame this is literal: fix both eigenlines,
// or swap them.  For a nonsplit frame with minimal polynomial
// x^2 - t x + n, writing g = (a b; c d):
//
//   g fixes [1 : alpha]       <=>  g scalar, or b != 0 with
//                                  (d - a)/b = t and -c/b = n
//   g swaps [1 : alpha] and its conjugate
//                             <=>  tr(g) = 0 and a t + b n - c = 0
//
// both read off from (c + d alpha) = alpha (a + b alpha), resp.
// = alpha^ell (a + b alpha), using alpha^2 = t alpha - n.
inline FrameMembership in_frame(const PrimeField& F, const Mat2& g, const CartanFrame& f) {
  if (const auto* sf = std::get_if<SplitFrame>(&f)) {
    uint64_t i1 = act_index(F, g, sf->l1), i2 = act_index(F, g, sf->l2);
    if (i1 == sf->l1 && i2 == sf->l2) return FrameMembership::InCartan;
    if (i1 == sf->l2 && i2 == sf->l1) return FrameMembership::InNormalizerOnly;
    return FrameMembership::No;
  }
  if (const auto* bf = std::get_if<BorelFrame>(&f))
    return act_index(F, g, bf->line) == bf->line ? FrameMembership::InCartan
                                                 : FrameMembership::No;
  const auto& nf = std::get<NonsplitFrame>(f);
  if (mat_is_scalar(g)) return FrameMembership::InCartan;
  if (g.b != 0 && F.mul(F.inv(g.b), F.sub(g.d, g.a)) == nf.tr &&
      F.mul(F.inv(g.b), F.neg(g.c)) == nf.nrm)
    return FrameMembership::InCartan;
  if (mat_tr(F, g) == 0 &&
      F.sub(F.add(F.mul(g.a, nf.tr), F.mul(g.b, nf.nrm)), g.c) == 0)
    return FrameMembership::InNormalizerOnly;
  return FrameMembership::No;
}

// Which of the five standard groups admit a conjugate containing g.
struct LocalProfile {
  uint8_t bits = 0;
  bool contains(StandardTarget t) const { return bits >> unsigned(t) & 1; }
  void set(StandardTarget t) { bits |= uint8_t(1 << unsigned(t)); }
  bool operator==(const LocalProfile&) const = default;
};

// Decided from the characteristic polynomial alone:
//
//   disc square or zero  ->  a rational eigenline exists       (Borel)
//   disc nonzero square  ->  diagonalizable                    (split Cartan)
//   disc nonresidue      ->  conjugate eigenvalue pair         (nonsplit Cartan)
//   trace zero           ->  g^2 is scalar, so g swaps the two lines of
//                            every frame {L, gL}; such g lies in both kinds
//                            of normalizer
//   disc zero, nonscalar ->  a single repeated eigenline: Borel only
inline LocalProfile element_local_profile(const PrimeField& F, const Mat2& g) {
  LocalProfile p;
  if (mat_is_scalar(g)) {
    for (StandardTarget t : kAllTargets) p.set(t);
    return p;
  }
  int chi = F.legendre(charpoly_disc(F, g));
  bool trace0 = mat_tr(F, g) == 0;
  if (chi >= 0) p.set(StandardTarget::Borel);
  if (chi == 1) {
    p.set(StandardTarget::SplitCartan);
    p.set(StandardTarget::SplitNormalizer);
  }
  if (chi == -1) {
    p.set(StandardTarget::NonsplitCartan);
    p.set(StandardTarget::NonsplitNormalizer);
  }
  if (trace0) {
    p.set(StandardTarget::SplitNormalizer);
    p.set(StandardTarget::NonsplitNormalizer);
  }
  return p;
}

// ell = 2 is excluded everywhere else (PrimeField insists on odd), but the
// degenerate case is worth one direct check: in GL_2(F_2), both kinds of
// Cartan subgroup have a conjugacy class consisting of a single subgroup.
// The split Cartan is trivial; the nonsplit one is the cyclic group of
// order 3 generated by multiplication by x on F_4 = F_2[x]/(x^2 + x + 1),
// which is normal in GL_2(F_2) (index 2).
inline bool cartan_remark_ell2() {
  using M = std::array<unsigned, 4>;  // (a, b, c, d) mod 2
  auto mul = [](M g, M h) -> M {
    return {(g[0] * h[0] + g[1] * h[2]) % 2, (g[0] * h[1] + g[1] * h[3]) % 2,
            (g[2] * h[0] + g[3] * h[2]) % 2, (g[2] * h[1] + g[3] * h[3]) % 2};
  };
  std::vector<M> gl2;
  for (unsigned m = 0; m < 16; ++m) {
    M g = {m & 1, m >> 1 & 1, m >> 2 & 1, m >> 3 & 1};
    if ((g[0] * g[3] + g[1] * g[2]) % 2 == 1) gl2.push_back(g);
  }
  if (gl2.size() != 6) return false;

  M id = {1, 0, 0, 1}, x = {0, 1, 1, 1};
  std::vector<std::vector<M>> cartans = {{id}, {id, x, mul(x, x)}};
  for (const auto& C : cartans) {
    std::vector<std::vector<M>> conjugates;
    for (const M& h : gl2) {
      // h^-1 = h^(|GL2|-1); order divides 6, so h^5 works for every h
      M hinv = id;
      for (int i = 0; i < 5; ++i) hinv = mul(hinv, h);
      std::vector<M> conj;
      for (const M& g : C) conj.push_back(mul(mul(h, g), hinv));
      std::sort(conj.begin(), conj.end());
      if (std::find(conjugates.begin(), conjugates.end(), conj) == conjugates.end())
        conjugates.push_back(conj);
    }
    if (conjugates.size() != 1) return false;
  }
  return true;
}

}  // namespace gl2lg
