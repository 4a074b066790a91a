#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gl2lg/cartan.hpp"
#include "gl2lg/ff.hpp"
#include "gl2lg/mat.hpp"
#include "gl2lg/subgrp.hpp"

namespace gl2lg {

/*
  Genus of the modular curve attached to H <= GL2(F_ell), computed from
  the permutation action of PSL2(F_ell) on the right cosets of

      Hbar = image of H meet SL2 in PSL2.

  With mu cosets, nu2 and nu3 cosets fixed by the order 2 and order 3
  rotations S = (0 -1; 1 0) and ST, and nu_inf orbits of the translation
  T = (1 1; 0 1), Riemann-Hurwitz over the j-line gives

      g = 1 + mu/12 - nu2/4 - nu3/3 - nu_inf/2.

  Since the curve only depends on +-H, a missing -I is adjoined first.
*/

struct GenusProfile {
  uint64_t ell = 0;
  size_t mu = 0;
  size_t nu2 = 0;
  size_t nu3 = 0;
  size_t nu_inf = 0;
  size_t g = 0;
};

// canonical code of the pair {m, -m}, the element of PSL2 when det m = 1
inline uint64_t psl_pack(const PrimeField& F, const Mat2& m) {
  Mat2 n{F.neg(m.a), F.neg(m.b), F.neg(m.c), F.neg(m.d)};
  return std::min(mat_pack(m), mat_pack(n));
}

// all of PSL2(F_ell), one +-canonical SL2 representative each
inline std::vector<Mat2> psl2_elements(const PrimeField& F) {
  uint64_t ell = F.ell();
  std::vector<Mat2> out;
  out.reserve(size_t(ell) * (ell * ell - 1) / 2);
  auto keep = [&](const Mat2& m) {
    if (mat_pack(m) == psl_pack(F, m)) out.push_back(m);
  };
  // a = 0 forces bc = -1 with d free; a != 0 determines d from ad - bc = 1
  for (uint64_t b = 1; b < ell; ++b) {
    uint64_t c0 = F.neg(F.inv(b));
    for (uint64_t d = 0; d < ell; ++d) keep({0, b, c0, d});
  }
  for (uint64_t a = 1; a < ell; ++a) {
    uint64_t ia = F.inv(a);
    for (uint64_t b = 0; b < ell; ++b)
      for (uint64_t c = 0; c < ell; ++c) keep({a, b, c, F.mul(ia, F.add(1, F.mul(b, c)))});
  }
  return out;
}

struct CosetSpace {
  const PrimeField* F = nullptr;
  std::vector<Mat2> hbar;                        // +-canonical reps of Hbar
  std::vector<Mat2> reps;                        // one SL2 matrix per coset
  std::unordered_map<uint64_t, uint32_t> index;  // coset label -> position

  // label of the coset Hbar x: smallest packed code over the coset
  uint64_t label(const Mat2& x) const {
    uint64_t best = UINT64_MAX;
    for (const Mat2& h : hbar) best = std::min(best, psl_pack(*F, mat_mul(*F, h, x)));
    return best;
  }

  size_t mu() const { return reps.size(); }

  // right multiplication by g as a permutation of the cosets
  std::vector<uint32_t> permutation(const Mat2& g) const {
    std::vector<uint32_t> perm(reps.size());
    for (size_t i = 0; i < reps.size(); ++i)
      perm[i] = index.at(label(mat_mul(*F, reps[i], g)));
    return perm;
  }
};

inline CosetSpace coset_space(const PrimeField& F, const Subgroup& H) {
  if (H.ell != F.ell()) throw std::invalid_argument("subgroup and modulus disagree");
  if (!subgroup_check(F, H)) throw std::invalid_argument("element list is not a subgroup");

  // Hbar, with -I adjoined so the +- quotient is uniform
  std::unordered_set<uint64_t> hbar_codes;
  for (uint64_t code : H.elements) {
    Mat2 m = mat_unpack(code);
    if (mat_det(F, m) == 1) hbar_codes.insert(psl_pack(F, m));
  }
  hbar_codes.insert(psl_pack(F, mat_identity()));

  CosetSpace cs;
  cs.F = &F;
  cs.hbar.reserve(hbar_codes.size());
  for (uint64_t code : hbar_codes) cs.hbar.push_back(mat_unpack(code));

  std::vector<Mat2> psl = psl2_elements(F);
  for (const Mat2& x : psl) {
    uint64_t lab = cs.label(x);
    if (cs.index.emplace(lab, uint32_t(cs.reps.size())).second) cs.reps.push_back(x);
  }
  if (cs.reps.size() * cs.hbar.size() != psl.size())
    throw std::logic_error("coset partition does not tile PSL2");
  return cs;
}

inline GenusProfile genus_of_modular_curve(const PrimeField& F, const Subgroup& H) {
  CosetSpace cs = coset_space(F, H);
  GenusProfile p;
  p.ell = F.ell();
  p.mu = cs.mu();

  Mat2 s{0, F.ell() - 1, 1, 0};
  Mat2 st = mat_mul(F, s, Mat2{1, 1, 0, 1});
  auto fixed = [&](const Mat2& g) {
    size_t n = 0;
    std::vector<uint32_t> perm = cs.permutation(g);
    for (size_t i = 0; i < perm.size(); ++i) n += perm[i] == i;
    return n;
  };
  p.nu2 = fixed(s);
  p.nu3 = fixed(st);

  std::vector<uint32_t> t = cs.permutation({1, 1, 0, 1});
  std::vector<bool> seen(t.size(), false);
  for (size_t i = 0; i < t.size(); ++i) {
    if (seen[i]) continue;
    ++p.nu_inf;
    for (uint32_t j = uint32_t(i); !seen[j]; j = t[j]) seen[j] = true;
  }

  // 12g = 12 + mu - 3 nu2 - 4 nu3 - 6 nu_inf
  int64_t twelve_g = 12 + int64_t(p.mu) - 3 * int64_t(p.nu2) - 4 * int64_t(p.nu3) -
                     6 * int64_t(p.nu_inf);
  if (twelve_g < 0 || twelve_g % 12 != 0)
    throw std::logic_error("genus formula did not produce a nonnegative integer");
  p.g = size_t(twelve_g / 12);
  return p;
}

// Representative subgroups for the named curves: full scalar preimages of
// the exceptional projective types, or a standard Cartan normalizer.
inline Subgroup genus_curve_group(const PrimeField& F, const std::string& type) {
  uint64_t ell = F.ell();
  if (type == "A4" || type == "S4" || type == "A5") {
    auto kind = type == "A4"   ? PglType::Kind::A4
                : type == "S4" ? PglType::Kind::S4
                               : PglType::Kind::A5;
    auto S = exceptional_preimage(F, kind);
    if (!S) throw std::runtime_error("no projective " + type + " inside PGL2(F_" +
                                     std::to_string(ell) + ")");
    return *S;
  }
  if (type == "Nsp") {
    uint64_t g = smallest_primitive_root(F);
    Subgroup S = subgroup_closure(F, {{g, 0, 0, 1}, {1, 0, 0, g}, {0, 1, 1, 0}});
    if (S.order() != 2 * (ell - 1) * (ell - 1)) throw std::logic_error("split normalizer size");
    return S;
  }
  if (type == "Nns") {
    // a generator of the nonsplit torus: order ell^2 - 1 exactly
    std::vector<uint64_t> pieces;
    uint64_t n = ell * ell - 1;
    for (uint64_t q = 2; q * q <= n; ++q)
      if (n % q == 0) {
        pieces.push_back(q);
        while (n % q == 0) n /= q;
      }
    if (n > 1) pieces.push_back(n);
    Mat2 torus{};
    bool found = false;
    for (const Mat2& m : standard_group(F, StandardTarget::NonsplitCartan)) {
      bool full = true;
      for (uint64_t q : pieces) {
        Mat2 w = mat_pow(F, m, (ell * ell - 1) / q);
        if (w.a == 1 && w.b == 0 && w.c == 0 && w.d == 1) {
          full = false;
          break;
        }
      }
      if (full) {
        torus = m;
        found = true;
        break;
      }
    }
    if (!found) throw std::logic_error("nonsplit torus generator not found");
    Mat2 outer{};
    for (const Mat2& m : standard_group(F, StandardTarget::NonsplitNormalizer))
      if (mat_pack(mat_mul(F, m, torus)) != mat_pack(mat_mul(F, torus, m))) {
        outer = m;
        break;
      }
    Subgroup S = subgroup_closure(F, {torus, outer});
    if (S.order() != 2 * (ell * ell - 1)) throw std::logic_error("nonsplit normalizer size");
    return S;
  }
  throw std::invalid_argument("unknown curve type: " + type + " (want A4, S4, A5, Nsp or Nns)");
}

inline std::string genus_columns() { return "ell,type,mu,nu2,nu3,nu_inf,g"; }

inline std::string genus_machine_row(const std::string& type, const GenusProfile& p) {
  std::ostringstream os;
  os << p.ell << ',' << type << ',' << p.mu << ',' << p.nu2 << ',' << p.nu3 << ','
     << p.nu_inf << ',' << p.g;
  return os.str();
}

inline std::string genus_text_row(const std::string& type, const GenusProfile& p) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%4llu %-4s %7zu %5zu %5zu %6zu %5zu",
                static_cast<unsigned long long>(p.ell), type.c_str(), p.mu, p.nu2, p.nu3,
                p.nu_inf, p.g);
  return buf;
}

inline std::string genus_text_header() { return " ell type      mu   nu2   nu3 nu_inf     g"; }

}  // namespace gl2lg
