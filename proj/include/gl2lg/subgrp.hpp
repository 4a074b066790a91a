#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <set>
#include <unordered_set>
#include <vector>

#include "gl2lg/cartan.hpp"
#include "gl2lg/ff.hpp"
#include "gl2lg/mat.hpp"

namespace gl2lg {

// Element sets are stored as sorted vectors of 16-bit-per-entry packed
// matrices, so set operations reduce to integer comparisons.
inline uint64_t mat_pack(const Mat2& m) {
  return m.a | m.b << 16 | m.c << 32 | m.d << 48;
}

inline Mat2 mat_unpack(uint64_t code) {
  return {code & 0xffff, code >> 16 & 0xffff, code >> 32 & 0xffff, code >> 48};
}

struct Subgroup {
  uint64_t ell = 0;
  std::vector<Mat2> generators;
  std::vector<uint64_t> elements;  // sorted packed codes

  size_t order() const { return elements.size(); }
  bool contains_code(uint64_t code) const {
    return std::binary_search(elements.begin(), elements.end(), code);
  }
  bool contains(const Mat2& m) const { return contains_code(mat_pack(m)); }
};

// Scratch space for repeated closure computations: a dense epoch-stamped
// visit table indexed by the matrix entries, so the hot loop allocates
// nothing.  The table has ell^4 slots, which is why the group machinery
// is capped at moderate moduli.
class GroupContext {
 public:
  explicit GroupContext(const PrimeField& F) : f_(&F) {
    uint64_t ell = F.ell();
    if (ell > 61) throw std::invalid_argument("group machinery supports ell <= 61");
    mark_.assign(ell * ell * ell * ell, 0);
  }

  const PrimeField& field() const { return *f_; }

  uint64_t dense_index(const Mat2& m) const {
    uint64_t ell = f_->ell();
    return ((m.a * ell + m.b) * ell + m.c) * ell + m.d;
  }

  // Breadth-first closure of <gens>.  Stops with nullopt as soon as an
  // element fails `admit` (dense_index-indexed) or the size exceeds `cap`.
  std::optional<std::vector<uint64_t>> closure_codes(const std::vector<Mat2>& gens,
                                                     const uint8_t* admit = nullptr,
                                                     size_t cap = SIZE_MAX) {
    if (!start(gens, admit, /*projective=*/false)) return std::nullopt;
    for (size_t head = 0; head < queue_.size(); ++head) {
      Mat2 x = queue_[head];
      for (const Mat2& g : gens) {
        if (!push(mat_mul(*f_, x, g), admit)) return std::nullopt;
        if (queue_.size() > cap) return std::nullopt;
      }
    }
    return harvest();
  }

  // Same, but on canonical representatives in PGL_2.
  std::optional<std::vector<uint64_t>> proj_closure_codes(const std::vector<Mat2>& gens,
                                                          size_t cap = SIZE_MAX) {
    if (!start(gens, nullptr, /*projective=*/true)) return std::nullopt;
    for (size_t head = 0; head < queue_.size(); ++head) {
      Mat2 x = queue_[head];
      for (const Mat2& g : gens) {
        if (!push(proj_canon(*f_, mat_mul(*f_, x, proj_canon(*f_, g))), nullptr))
          return std::nullopt;
        if (queue_.size() > cap) return std::nullopt;
      }
    }
    return harvest();
  }

 private:
  bool start(const std::vector<Mat2>& gens, const uint8_t* admit, bool projective) {
    if (++epoch_ == 0) {
      std::fill(mark_.begin(), mark_.end(), 0);
      epoch_ = 1;
    }
    queue_.clear();
    if (!push(mat_identity(), admit)) return false;
    for (const Mat2& g : gens) {
      Mat2 m = mat_reduce(*f_, int64_t(g.a), int64_t(g.b), int64_t(g.c), int64_t(g.d));
      if (projective) m = proj_canon(*f_, m);
      if (!push(m, admit)) return false;
    }
    return true;
  }

  bool push(const Mat2& m, const uint8_t* admit) {
    uint64_t idx = dense_index(m);
    if (mark_[idx] == epoch_) return true;
    if (admit && !admit[idx]) return false;
    mark_[idx] = epoch_;
    queue_.push_back(m);
    return true;
  }

  std::vector<uint64_t> harvest() const {
    std::vector<uint64_t> out;
    out.reserve(queue_.size());
    for (const Mat2& m : queue_) out.push_back(mat_pack(m));
    std::sort(out.begin(), out.end());
    return out;
  }

  const PrimeField* f_;
  std::vector<uint32_t> mark_;
  uint32_t epoch_ = 0;
  std::vector<Mat2> queue_;
};

inline Subgroup subgroup_closure(const PrimeField& F, std::vector<Mat2> gens) {
  for (Mat2& g : gens) {
    g = mat_reduce(F, int64_t(g.a), int64_t(g.b), int64_t(g.c), int64_t(g.d));
    if (mat_det(F, g) == 0) throw std::invalid_argument("generator is singular");
  }
  GroupContext ctx(F);
  auto codes = ctx.closure_codes(gens);
  return Subgroup{F.ell(), std::move(gens), std::move(*codes)};
}

// A Subgroup is well formed exactly when its element list is the closure
// of its generator list.
inline bool subgroup_check(const PrimeField& F, const Subgroup& S) {
  if (S.ell != F.ell()) return false;
  for (const Mat2& g : S.generators) {
    if (g.a >= F.ell() || g.b >= F.ell() || g.c >= F.ell() || g.d >= F.ell()) return false;
    if (mat_det(F, g) == 0) return false;
  }
  GroupContext ctx(F);
  auto codes = ctx.closure_codes(S.generators, nullptr, S.elements.size() + 1);
  return codes && *codes == S.elements;
}

// Dense lookup table: admit[dense_index(g)] = 1 iff some conjugate of the
// standard group of type t contains g.
inline std::vector<uint8_t> local_element_table(const PrimeField& F, StandardTarget t) {
  uint64_t ell = F.ell();
  std::vector<uint8_t> tab(ell * ell * ell * ell, 0);
  for (uint64_t a = 0; a < ell; ++a)
    for (uint64_t b = 0; b < ell; ++b)
      for (uint64_t c = 0; c < ell; ++c)
        for (uint64_t d = 0; d < ell; ++d) {
          Mat2 m{a, b, c, d};
          if (mat_det(F, m) == 0) continue;
          uint64_t idx = ((a * ell + b) * ell + c) * ell + d;
          tab[idx] = element_local_profile(F, m).contains(t) ? 1 : 0;
        }
  return tab;
}

inline std::vector<Mat2> local_elements(const PrimeField& F, StandardTarget t) {
  uint64_t ell = F.ell();
  std::vector<uint8_t> tab = local_element_table(F, t);
  std::vector<Mat2> out;
  for (uint64_t a = 0; a < ell; ++a)
    for (uint64_t b = 0; b < ell; ++b)
      for (uint64_t c = 0; c < ell; ++c)
        for (uint64_t d = 0; d < ell; ++d)
          if (tab[((a * ell + b) * ell + c) * ell + d]) out.push_back({a, b, c, d});
  return out;
}

inline bool all_elements_local(const PrimeField& F, const Subgroup& S, StandardTarget t) {
  for (uint64_t code : S.elements)
    if (!element_local_profile(F, mat_unpack(code)).contains(t)) return false;
  return true;
}

// One representative per conjugacy class of GL_2(F_ell): scalars, split
// semisimple diag(x, y) with x < y, non-semisimple x (1 1; 0 1), and the
// companion matrices of the irreducible quadratics.
inline std::vector<Mat2> conjugacy_class_reps(const PrimeField& F) {
  uint64_t ell = F.ell();
  std::vector<Mat2> out;
  for (uint64_t x = 1; x < ell; ++x) out.push_back({x, 0, 0, x});
  for (uint64_t x = 1; x < ell; ++x)
    for (uint64_t y = x + 1; y < ell; ++y) out.push_back({x, 0, 0, y});
  for (uint64_t x = 1; x < ell; ++x) out.push_back({x, x, 0, x});
  for (uint64_t t = 0; t < ell; ++t)
    for (uint64_t n = 0; n < ell; ++n)
      if (F.legendre(F.sub(F.mul(t, t), F.mul(4, n))) == -1)
        out.push_back({0, F.neg(n), 1, t});
  return out;
}

struct Conjugator {
  Mat2 h, hinv;
};

// Canonical representatives of PGL_2(F_ell): first nonzero entry scaled
// to 1.  There are ell^3 - ell of them.
inline std::vector<Conjugator> pgl2_conjugators(const PrimeField& F) {
  uint64_t ell = F.ell();
  std::vector<Conjugator> out;
  out.reserve(ell * ell * ell - ell);
  for (uint64_t b = 0; b < ell; ++b)
    for (uint64_t c = 0; c < ell; ++c)
      for (uint64_t d = 0; d < ell; ++d) {
        Mat2 h{1, b, c, d};
        if (mat_det(F, h) != 0) out.push_back({h, mat_inv(F, h)});
      }
  for (uint64_t c = 1; c < ell; ++c)
    for (uint64_t d = 0; d < ell; ++d) {
      Mat2 h{0, 1, c, d};
      out.push_back({h, mat_inv(F, h)});
    }
  return out;
}

inline bool subgroups_conjugate(const PrimeField& F, const Subgroup& A, const Subgroup& B) {
  if (A.order() != B.order()) return false;
  if (A.generators.empty()) return true;  // both trivial
  for (const Conjugator& cj : pgl2_conjugators(F)) {
    bool ok = true;
    for (const Mat2& g : A.generators)
      if (!B.contains(mat_mul(F, mat_mul(F, cj.h, g), cj.hinv))) {
        ok = false;
        break;
      }
    if (ok) return true;
  }
  return false;
}

// Image of a subgroup in PGL_2, as sorted canonical codes.
inline std::vector<uint64_t> projective_image(const PrimeField& F, const Subgroup& S) {
  std::vector<uint64_t> out;
  out.reserve(S.order());
  for (uint64_t code : S.elements)
    out.push_back(mat_pack(proj_canon(F, mat_unpack(code))));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct PglType {
  enum class Kind { Cyclic, Dihedral, A4, S4, A5, BorelType, ContainsPSL2 };
  Kind kind = Kind::Cyclic;
  uint64_t n = 0;  // order of the projective image, for Cyclic and Dihedral
  bool operator==(const PglType&) const = default;
};

inline std::string pgl_type_name(const PglType& t) {
  switch (t.kind) {
    case PglType::Kind::Cyclic: return "Cyclic(" + std::to_string(t.n) + ")";
    case PglType::Kind::Dihedral: return "Dihedral(" + std::to_string(t.n) + ")";
    case PglType::Kind::A4: return "A4";
    case PglType::Kind::S4: return "S4";
    case PglType::Kind::A5: return "A5";
    case PglType::Kind::BorelType: return "Borel";
    case PglType::Kind::ContainsPSL2: return "ContainsPSL2";
  }
  return "?";
}

inline std::optional<PglType> parse_pgl_type(const std::string& s) {
  if (s == "A4") return PglType{PglType::Kind::A4, 0};
  if (s == "S4") return PglType{PglType::Kind::S4, 0};
  if (s == "A5") return PglType{PglType::Kind::A5, 0};
  if (s == "Borel") return PglType{PglType::Kind::BorelType, 0};
  if (s == "ContainsPSL2") return PglType{PglType::Kind::ContainsPSL2, 0};
  for (auto kind : {PglType::Kind::Cyclic, PglType::Kind::Dihedral}) {
    std::string head = kind == PglType::Kind::Cyclic ? "Cyclic(" : "Dihedral(";
    if (s.size() > head.size() + 1 && s.compare(0, head.size(), head) == 0 && s.back() == ')') {
      uint64_t n = 0;
      for (size_t i = head.size(); i + 1 < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') return std::nullopt;
        n = n * 10 + uint64_t(s[i] - '0');
      }
      if (n) return PglType{kind, n};
    }
  }
  return std::nullopt;
}

// Projective image classification.  For order prime to ell this lands in
// the classical list: cyclic, dihedral, A4, S4 or A5.  When ell divides
// the order the group either fixes a line or contains all of SL_2; any
// other outcome would contradict the classification and throws.
inline PglType pgl_type(const PrimeField& F, const Subgroup& S) {
  if (S.order() % F.ell() == 0) {
    for (uint64_t l = 0; l < line_count(F); ++l) {
      bool fixes = true;
      for (const Mat2& g : S.generators)
        if (act_index(F, g, l) != l) {
          fixes = false;
          break;
        }
      if (fixes) return {PglType::Kind::BorelType, 0};
    }
    GroupContext ctx(F);
    auto sl2 = ctx.closure_codes({Mat2{1, 1, 0, 1}, Mat2{1, 0, 1, 1}});
    for (uint64_t code : *sl2)
      if (!S.contains_code(code))
        throw std::logic_error("order divisible by ell, no fixed line, SL2 not contained");
    return {PglType::Kind::ContainsPSL2, 0};
  }

  std::vector<uint64_t> proj = projective_image(F, S);
  uint64_t h = proj.size();
  std::vector<uint64_t> ord(proj.size());
  uint64_t maxord = 0;
  for (size_t i = 0; i < proj.size(); ++i) {
    ord[i] = pgl_order(F, mat_unpack(proj[i]));
    maxord = std::max(maxord, ord[i]);
  }
  if (maxord == h) return {PglType::Kind::Cyclic, h};
  if (h == 12 && maxord == 3) return {PglType::Kind::A4, 0};
  if (h == 24 && maxord == 4) return {PglType::Kind::S4, 0};
  if (h == 60 && maxord == 5) return {PglType::Kind::A5, 0};
  if (h % 2 == 0) {
    // dihedral: a cyclic core of index 2 inverted by any outside element
    for (size_t i = 0; i < proj.size(); ++i) {
      if (ord[i] != h / 2) continue;
      Mat2 c = mat_unpack(proj[i]);
      std::vector<uint64_t> core;
      Mat2 p = mat_identity();
      for (uint64_t k = 0; k < h / 2; ++k) {
        core.push_back(mat_pack(proj_canon(F, p)));
        p = mat_mul(F, p, c);
      }
      std::sort(core.begin(), core.end());
      uint64_t cinv = mat_pack(proj_canon(F, mat_inv(F, c)));
      for (size_t j = 0; j < proj.size(); ++j) {
        if (std::binary_search(core.begin(), core.end(), proj[j])) continue;
        Mat2 t = mat_unpack(proj[j]);
        Mat2 conj = mat_mul(F, mat_mul(F, t, c), mat_inv(F, t));
        if (ord[j] == 2 && mat_pack(proj_canon(F, conj)) == cinv)
          return {PglType::Kind::Dihedral, h};
        break;  // in a dihedral group the first outside element already works
      }
      break;
    }
  }
  throw std::logic_error("projective image outside the expected classification");
}

// Search for a frame whose standard group (of type t) contains a
// conjugate... rather: whether S itself sits inside the group attached to
// some frame, which is the same as being conjugate into the standard one.
inline std::optional<CartanFrame> conjugate_into(const PrimeField& F, const Subgroup& S,
                                                 StandardTarget t) {
  const std::vector<Mat2>& gens = S.generators;
  auto fits = [&](const CartanFrame& f, bool cartan_only) {
    for (const Mat2& g : gens) {
      FrameMembership m = in_frame(F, g, f);
      if (m == FrameMembership::No) return false;
      if (cartan_only && m == FrameMembership::InNormalizerOnly) return false;
    }
    return true;
  };
  switch (t) {
    case StandardTarget::Borel:
      for (uint64_t l = 0; l < line_count(F); ++l) {
        CartanFrame f = BorelFrame{l};
        if (fits(f, true)) return f;
      }
      break;
    case StandardTarget::SplitCartan:
    case StandardTarget::SplitNormalizer:
      for (const SplitFrame& sf : all_split_frames(F)) {
        CartanFrame f = sf;
        if (fits(f, t == StandardTarget::SplitCartan)) return f;
      }
      break;
    case StandardTarget::NonsplitCartan:
    case StandardTarget::NonsplitNormalizer:
      for (const NonsplitFrame& nf : all_nonsplit_frames(F)) {
        CartanFrame f = nf;
        if (fits(f, t == StandardTarget::NonsplitCartan)) return f;
      }
      break;
  }
  return std::nullopt;
}

namespace detail {

inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline uint64_t hash_codes(const std::vector<uint64_t>& v) {
  uint64_t h = 0x811c9dc5cbf29ce4ull ^ v.size();
  for (uint64_t c : v) h = mix64(h ^ c);
  return h;
}

// Conjugation-invariant bucket key: order, size of the determinant image,
// and an order-independent hash of the charpoly multiset.
struct FingerKey {
  uint64_t order = 0, det_order = 0, charsum = 0;
  bool operator==(const FingerKey&) const = default;
};

inline FingerKey fingerprint(const PrimeField& F, const std::vector<uint64_t>& codes) {
  FingerKey k;
  k.order = codes.size();
  std::vector<uint8_t> dets(F.ell(), 0);
  for (uint64_t code : codes) {
    Mat2 m = mat_unpack(code);
    uint64_t det = mat_det(F, m);
    if (!dets[det]) {
      dets[det] = 1;
      ++k.det_order;
    }
    k.charsum += mix64(mat_tr(F, m) << 32 | det);
  }
  return k;
}

struct Candidate {
  std::vector<uint64_t> codes;
  std::vector<Mat2> gens;
};

inline bool candidate_less(const Candidate& a, const Candidate& b) {
  if (a.codes != b.codes) return a.codes < b.codes;
  auto key = [](const Candidate& c) {
    std::vector<uint64_t> v;
    for (const Mat2& g : c.gens) v.push_back(mat_pack(g));
    return v;
  };
  return key(a) < key(b);
}

inline void parallel_for(size_t n, unsigned threads,
                         const std::function<void(size_t, unsigned)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (threads <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i, 0);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      for (size_t i; (i = next.fetch_add(1)) < n;) fn(i, w);
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

// Find a small generating set (at most three elements) for a known
// element list, preferring subsets of the discovery generators.
inline std::vector<Mat2> reduce_generators(GroupContext& ctx, const std::vector<uint64_t>& codes,
                                           const std::vector<Mat2>& gens) {
  const PrimeField& F = ctx.field();
  size_t n = codes.size();
  if (n == 1) return {};
  auto matches = [&](const std::vector<Mat2>& g) {
    auto c = ctx.closure_codes(g, nullptr, n);
    return c && *c == codes;
  };
  size_t k = gens.size();
  for (size_t i = 0; i < k; ++i)
    if (matches({gens[i]})) return {gens[i]};
  for (size_t i = 0; i < k; ++i)
    for (size_t j = i + 1; j < k; ++j)
      if (matches({gens[i], gens[j]})) return {gens[i], gens[j]};
  for (size_t i = 0; i < k; ++i)
    for (size_t j = i + 1; j < k; ++j)
      for (size_t l = j + 1; l < k; ++l)
        if (matches({gens[i], gens[j], gens[l]})) return {gens[i], gens[j], gens[l]};

  // fall back to a search over the elements, highest order first
  std::vector<std::pair<uint64_t, uint64_t>> by_order;  // (order, code)
  for (uint64_t code : codes) by_order.emplace_back(element_order(F, mat_unpack(code)), code);
  std::sort(by_order.begin(), by_order.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  if (by_order.front().first == n) return {mat_unpack(by_order.front().second)};
  for (size_t i = 0; i < by_order.size(); ++i)
    for (size_t j = i + 1; j < by_order.size(); ++j)
      if (matches({mat_unpack(by_order[i].second), mat_unpack(by_order[j].second)}))
        return {mat_unpack(by_order[i].second), mat_unpack(by_order[j].second)};
  Mat2 first = mat_unpack(by_order.front().second);
  for (size_t i = 0; i < by_order.size(); ++i)
    for (size_t j = i + 1; j < by_order.size(); ++j)
      if (matches({first, mat_unpack(by_order[i].second), mat_unpack(by_order[j].second)}))
        return {first, mat_unpack(by_order[i].second), mat_unpack(by_order[j].second)};
  throw std::logic_error("no generating set of size <= 3 found");
}

struct EnumerateOptions {
  uint64_t max_ell = 13;   // guard against accidental huge runs
  unsigned threads = 1;    // 0 = hardware concurrency
  std::string cache_file;  // load if present, write after a fresh run
};

inline void save_candidates(const std::string& path, const PrimeField& F, StandardTarget t,
                            const std::vector<Subgroup>& list);
inline std::optional<std::vector<Subgroup>> load_candidates(const std::string& path,
                                                            const PrimeField& F,
                                                            StandardTarget t);

// All subgroups G of GL_2(F_ell), up to conjugacy, whose every element
// satisfies the local condition for target t.  Works by closing the
// lattice upward: the trivial group and the cyclic groups generated by a
// class representative seed the search, and every discovered class is
// extended by every admissible element until nothing new appears.  Any
// admissible group has a maximal subgroup that is (conjugate to) an
// earlier discovery, so the sweep is exhaustive.
inline std::vector<Subgroup> enumerate_local_candidates(const PrimeField& F, StandardTarget t,
                                                        const EnumerateOptions& opt = {}) {
  if (F.ell() > opt.max_ell)
    throw std::invalid_argument("enumeration capped at ell <= " + std::to_string(opt.max_ell));
  if (!opt.cache_file.empty())
    if (auto cached = load_candidates(opt.cache_file, F, t)) return *cached;

  std::vector<uint8_t> admit = local_element_table(F, t);
  std::vector<Mat2> pool = local_elements(F, t);
  std::vector<Conjugator> conjs = pgl2_conjugators(F);

  struct ClassEntry {
    std::vector<uint64_t> codes;
    std::vector<Mat2> gens;
    detail::FingerKey key;
  };
  std::vector<ClassEntry> classes;
  std::unordered_map<uint64_t, std::vector<size_t>> buckets;
  std::unordered_set<uint64_t> seen;

  auto bucket_hash = [](const detail::FingerKey& k) {
    return detail::mix64(k.order ^ detail::mix64(k.det_order ^ detail::mix64(k.charsum)));
  };
  auto is_conjugate = [&](const std::vector<Mat2>& gens, const ClassEntry& e) {
    for (const Conjugator& cj : conjs) {
      bool ok = true;
      for (const Mat2& g : gens) {
        uint64_t code = mat_pack(mat_mul(F, mat_mul(F, cj.h, g), cj.hinv));
        if (!std::binary_search(e.codes.begin(), e.codes.end(), code)) {
          ok = false;
          break;
        }
      }
      if (ok) return true;
    }
    return false;
  };
  auto register_candidate = [&](std::vector<uint64_t>&& codes, std::vector<Mat2>&& gens) {
    if (!seen.insert(detail::hash_codes(codes)).second) return false;
    detail::FingerKey key = detail::fingerprint(F, codes);
    std::vector<size_t>& bucket = buckets[bucket_hash(key)];
    for (size_t idx : bucket)
      if (classes[idx].key == key && classes[idx].codes.size() == codes.size() &&
          is_conjugate(gens, classes[idx]))
        return false;
    bucket.push_back(classes.size());
    classes.push_back({std::move(codes), std::move(gens), key});
    return true;
  };

  GroupContext seed_ctx(F);
  std::vector<size_t> frontier;
  {
    auto triv = seed_ctx.closure_codes({});
    if (register_candidate(std::move(*triv), {})) frontier.push_back(classes.size() - 1);
  }
  for (const Mat2& rep : conjugacy_class_reps(F)) {
    if (!admit[seed_ctx.dense_index(rep)]) continue;
    auto cyc = seed_ctx.closure_codes({rep}, admit.data());
    // powers stay inside the same conjugate of the standard group
    if (!cyc) throw std::logic_error("power of an admissible element escaped the local set");
    if (register_candidate(std::move(*cyc), {rep})) frontier.push_back(classes.size() - 1);
  }

  unsigned nthreads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  while (!frontier.empty()) {
    std::vector<detail::Candidate> tasks;
    tasks.reserve(frontier.size());
    for (size_t idx : frontier) tasks.push_back({classes[idx].codes, classes[idx].gens});

    std::vector<GroupContext> ctxs;
    std::vector<std::vector<detail::Candidate>> batches(nthreads);
    ctxs.reserve(nthreads);
    for (unsigned w = 0; w < nthreads; ++w) ctxs.emplace_back(F);

    detail::parallel_for(tasks.size(), nthreads, [&](size_t i, unsigned w) {
      const detail::Candidate& base = tasks[i];
      // deduplicate per task, not per worker, so the merged layer does
      // not depend on how tasks were scheduled
      std::unordered_set<uint64_t> task_seen;
      for (const Mat2& c : pool) {
        if (std::binary_search(base.codes.begin(), base.codes.end(), mat_pack(c))) continue;
        std::vector<Mat2> gens = base.gens;
        gens.push_back(c);
        auto closed = ctxs[w].closure_codes(gens, admit.data());
        if (!closed) continue;
        if (!task_seen.insert(detail::hash_codes(*closed)).second) continue;
        batches[w].push_back({std::move(*closed), std::move(gens)});
      }
    });

    std::vector<detail::Candidate> merged;
    for (auto& b : batches)
      for (auto& cand : b) merged.push_back(std::move(cand));
    std::sort(merged.begin(), merged.end(), detail::candidate_less);

    frontier.clear();
    for (detail::Candidate& cand : merged)
      if (register_candidate(std::move(cand.codes), std::move(cand.gens)))
        frontier.push_back(classes.size() - 1);
  }

  std::vector<Subgroup> out;
  out.reserve(classes.size());
  for (ClassEntry& e : classes) {
    std::vector<Mat2> small = reduce_generators(seed_ctx, e.codes, e.gens);
    out.push_back(Subgroup{F.ell(), std::move(small), std::move(e.codes)});
  }
  std::sort(out.begin(), out.end(), [](const Subgroup& a, const Subgroup& b) {
    return a.order() != b.order() ? a.order() < b.order() : a.elements < b.elements;
  });

  if (!opt.cache_file.empty()) save_candidates(opt.cache_file, F, t, out);
  return out;
}

inline std::string format_generator(const Mat2& m) {
  return std::to_string(m.a) + ":" + std::to_string(m.b) + ":" + std::to_string(m.c) + ":" +
         std::to_string(m.d);
}

inline std::optional<Mat2> parse_generator(const PrimeField& F, const std::string& s) {
  uint64_t v[4] = {0, 0, 0, 0};
  size_t pos = 0;
  for (int i = 0; i < 4; ++i) {
    if (pos >= s.size() || !isdigit(static_cast<unsigned char>(s[pos]))) return std::nullopt;
    while (pos < s.size() && isdigit(static_cast<unsigned char>(s[pos])))
      v[i] = v[i] * 10 + uint64_t(s[pos++] - '0');
    if (i < 3) {
      if (pos >= s.size() || s[pos] != ':') return std::nullopt;
      ++pos;
    }
  }
  if (pos != s.size()) return std::nullopt;
  if (v[0] >= F.ell() || v[1] >= F.ell() || v[2] >= F.ell() || v[3] >= F.ell()) return std::nullopt;
  return Mat2{v[0], v[1], v[2], v[3]};
}

inline void save_candidates(const std::string& path, const PrimeField& F, StandardTarget t,
                            const std::vector<Subgroup>& list) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write cache file " + path);
  out << "# gl2lg local candidate cache v1\n";
  out << "ell,target,order,pgl_type,gen1,gen2,gen3\n";
  for (const Subgroup& S : list) {
    if (S.generators.size() > 3) throw std::logic_error("cache format holds three generators");
    out << F.ell() << ',' << target_name(t) << ',' << S.order() << ','
        << pgl_type_name(pgl_type(F, S));
    for (size_t i = 0; i < 3; ++i)
      out << ',' << (i < S.generators.size() ? format_generator(S.generators[i]) : "");
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for cache file " + path);
}

// Returns nullopt when the file does not exist; throws on any mismatch
// between the file and a regeneration from its generator columns.
inline std::optional<std::vector<Subgroup>> load_candidates(const std::string& path,
                                                            const PrimeField& F,
                                                            StandardTarget t) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  auto bad = [&](const std::string& why) -> std::runtime_error {
    return std::runtime_error("cache file " + path + ": " + why);
  };
  std::string line;
  if (!std::getline(in, line) || line != "# gl2lg local candidate cache v1")
    throw bad("unrecognized header");
  if (!std::getline(in, line) || line != "ell,target,order,pgl_type,gen1,gen2,gen3")
    throw bad("unrecognized column row");
  std::vector<Subgroup> out;
  GroupContext ctx(F);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> field;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        field.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    field.push_back(cur);
    if (field.size() != 7) throw bad("expected 7 fields: " + line);
    if (field[0] != std::to_string(F.ell())) throw bad("modulus mismatch: " + line);
    if (field[1] != target_name(t)) throw bad("target mismatch: " + line);
    std::vector<Mat2> gens;
    for (int i = 4; i < 7; ++i) {
      if (field[i].empty()) continue;
      auto m = parse_generator(F, field[i]);
      if (!m) throw bad("malformed generator: " + field[i]);
      gens.push_back(*m);
    }
    auto codes = ctx.closure_codes(gens);
    Subgroup S{F.ell(), std::move(gens), std::move(*codes)};
    if (std::to_string(S.order()) != field[2]) throw bad("order mismatch: " + line);
    if (pgl_type_name(pgl_type(F, S)) != field[3]) throw bad("type mismatch: " + line);
    out.push_back(std::move(S));
  }
  return out;
}

inline uint64_t smallest_primitive_root(const PrimeField& F) {
  uint64_t m = F.ell() - 1;
  std::vector<uint64_t> primes;
  for (uint64_t p = 2; p * p <= m; ++p)
    if (m % p == 0) {
      primes.push_back(p);
      while (m % p == 0) m /= p;
    }
  if (m > 1) primes.push_back(m);
  for (uint64_t a = 2; a < F.ell(); ++a) {
    bool ok = true;
    for (uint64_t p : primes)
      if (F.pow(a, (F.ell() - 1) / p) == 1) {
        ok = false;
        break;
      }
    if (ok) return a;
  }
  throw std::logic_error("no primitive root found");
}

// Full scalar preimage of a projective A4, S4 or A5 of order prime to
// ell, when one exists: A4 and S4 for every ell >= 5, A5 only when
// ell = +-1 mod 5.  The search fixes one projective element of a
// distinguishing order per conjugacy class and pairs it with every
// element of order 3.
inline std::optional<Subgroup> exceptional_preimage(const PrimeField& F, PglType::Kind kind) {
  uint64_t r1, target;
  switch (kind) {
    case PglType::Kind::A4: r1 = 2, target = 12; break;
    case PglType::Kind::S4: r1 = 4, target = 24; break;
    case PglType::Kind::A5: r1 = 5, target = 60; break;
    default: throw std::invalid_argument("exceptional kind must be A4, S4 or A5");
  }
  if (target % F.ell() == 0) return std::nullopt;  // no prime-to-ell copy
  GroupContext ctx(F);
  uint64_t ell = F.ell();

  // canonical projective elements, grouped by order
  std::vector<Mat2> firsts;  // one per projective class of order r1
  std::vector<std::pair<uint64_t, int>> first_keys;
  std::vector<Mat2> cubes;  // all elements of order 3
  auto consider = [&](const Mat2& m) {
    if (mat_det(F, m) == 0) return;
    uint64_t o = pgl_order_capped(F, m, 5);
    if (o == 3) cubes.push_back(m);
    if (o == r1) {
      // class invariant: tr^2/det plus the splitting of the charpoly
      uint64_t inv = F.mul(F.mul(mat_tr(F, m), mat_tr(F, m)), F.inv(mat_det(F, m)));
      std::pair<uint64_t, int> key{inv, F.legendre(charpoly_disc(F, m))};
      if (std::find(first_keys.begin(), first_keys.end(), key) == first_keys.end()) {
        first_keys.push_back(key);
        firsts.push_back(m);
      }
    }
  };
  for (uint64_t b = 0; b < ell; ++b)
    for (uint64_t c = 0; c < ell; ++c)
      for (uint64_t d = 0; d < ell; ++d) consider({1, b, c, d});
  for (uint64_t c = 1; c < ell; ++c)
    for (uint64_t d = 0; d < ell; ++d) consider({0, 1, c, d});

  Mat2 scal = mat_scalar(smallest_primitive_root(F));
  for (const Mat2& h1 : firsts)
    for (const Mat2& h2 : cubes) {
      auto proj = ctx.proj_closure_codes({h1, h2}, target);
      if (!proj || proj->size() != target) continue;
      uint64_t maxord = 0;
      for (uint64_t code : *proj)
        maxord = std::max(maxord, pgl_order(F, mat_unpack(code)));
      if (maxord != (kind == PglType::Kind::A4 ? 3 : r1)) continue;
      auto codes = ctx.closure_codes({h1, h2, scal});
      Subgroup S{ell, {h1, h2, scal}, std::move(*codes)};
      if (!(pgl_type(F, S) == PglType{kind, 0}))
        throw std::logic_error("exceptional candidate failed verification");
      return S;
    }
  return std::nullopt;
}

// Every subgroup of a small ambient group, as sorted code sets.  Plain
// fixpoint saturation: extend each known subgroup by each ambient element
// until nothing new appears.  Intended for ambient orders in the hundreds;
// candidate enumeration up to conjugacy is the scalable path.
inline std::vector<std::vector<uint64_t>> subgroup_lattice_of(
    GroupContext& ctx, const std::vector<uint64_t>& ambient) {
  const PrimeField& F = ctx.field();
  std::vector<Mat2> elems;
  elems.reserve(ambient.size());
  for (uint64_t code : ambient) {
    Mat2 m = mat_unpack(code);
    if (mat_det(F, m) == 0) throw std::invalid_argument("ambient set contains a singular matrix");
    elems.push_back(m);
  }

  std::vector<uint8_t> admit(F.ell() * F.ell() * F.ell() * F.ell(), 0);
  for (const Mat2& m : elems) admit[ctx.dense_index(m)] = 1;

  std::set<std::vector<uint64_t>> seen;
  std::vector<std::pair<std::vector<uint64_t>, std::vector<Mat2>>> store;
  std::vector<uint64_t> trivial{mat_pack(mat_identity())};
  seen.insert(trivial);
  store.emplace_back(std::move(trivial), std::vector<Mat2>{});

  for (size_t i = 0; i < store.size(); ++i)
    for (const Mat2& g : elems) {
      auto gens = store[i].second;
      gens.push_back(g);
      auto codes = ctx.closure_codes(gens, admit.data());
      if (!codes) throw std::invalid_argument("ambient set is not closed under multiplication");
      if (seen.insert(*codes).second) store.emplace_back(std::move(*codes), std::move(gens));
    }

  std::vector<std::vector<uint64_t>> out;
  out.reserve(store.size());
  for (auto& [codes, gens] : store) out.push_back(std::move(codes));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

}  // namespace gl2lg
