#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <vector>

#include "gl2lg/inertia.hpp"
#include "gl2lg/localglobal.hpp"

using namespace gl2lg;

namespace {

std::vector<uint64_t> feas(uint64_t d, ExceptionalImage im, StandardTarget t) {
  return feasible_exceptional_primes(d, im, t);
}

}  // namespace

TEST_CASE("inertia bounds") {
  CHECK(exceptional_bound(1, ExceptionalImage::A4) == 10);
  CHECK(exceptional_bound(1, ExceptionalImage::S4) == 13);
  CHECK(exceptional_bound(1, ExceptionalImage::A5) == 16);
  CHECK(exceptional_bound(1, ExceptionalImage::KleinFour) == 7);
  CHECK(exceptional_bound(2, ExceptionalImage::A5) == 31);
  CHECK_THROWS_AS(exceptional_bound(0, ExceptionalImage::A4), std::invalid_argument);

  for (ExceptionalImage im : kAllExceptionalImages)
    for (uint64_t d = 1; d < 8; ++d) {
      CHECK(exceptional_bound(d, im) == 3 * d * exceptional_image_h(im) + 1);
      CHECK(exceptional_bound(d + 1, im) > exceptional_bound(d, im));
    }
}

TEST_CASE("feasible primes over the rationals") {
  using ST = StandardTarget;
  CHECK(feas(1, ExceptionalImage::S4, ST::SplitNormalizer) == std::vector<uint64_t>{13});
  CHECK(feas(1, ExceptionalImage::S4, ST::NonsplitNormalizer) == std::vector<uint64_t>{11});
  CHECK(feas(1, ExceptionalImage::S4, ST::SplitCartan).empty());
  CHECK(feas(1, ExceptionalImage::S4, ST::NonsplitCartan).empty());

  CHECK(feas(1, ExceptionalImage::A4, ST::SplitNormalizer) == std::vector<uint64_t>{7});
  CHECK(feas(1, ExceptionalImage::A4, ST::NonsplitNormalizer) == std::vector<uint64_t>{5});
  CHECK(feas(1, ExceptionalImage::A4, ST::Borel).empty());
  CHECK(feas(1, ExceptionalImage::A4, ST::SplitCartan).empty());
  CHECK(feas(1, ExceptionalImage::A4, ST::NonsplitCartan).empty());

  for (StandardTarget t : kAllTargets) CHECK(feas(1, ExceptionalImage::A5, t).empty());

  CHECK(feas(1, ExceptionalImage::KleinFour, ST::SplitNormalizer) ==
        std::vector<uint64_t>{3, 7});
  CHECK(feas(1, ExceptionalImage::KleinFour, ST::NonsplitNormalizer) ==
        std::vector<uint64_t>{5});
  CHECK(feas(1, ExceptionalImage::KleinFour, ST::SplitCartan).empty());
  CHECK(feas(1, ExceptionalImage::KleinFour, ST::NonsplitCartan).empty());
  CHECK(feas(1, ExceptionalImage::KleinFour, ST::Borel).empty());
}

TEST_CASE("feasible primes over larger fields") {
  using ST = StandardTarget;
  CHECK(feas(2, ExceptionalImage::S4, ST::SplitNormalizer) == std::vector<uint64_t>{13});
  CHECK(feas(2, ExceptionalImage::A4, ST::NonsplitCartan) == std::vector<uint64_t>{11});
  CHECK(feas(3, ExceptionalImage::A4, ST::SplitCartan) == std::vector<uint64_t>{13});
  // quadratic fields open up exactly the two A5 rows of the genus table
  CHECK(feas(2, ExceptionalImage::A5, ST::NonsplitNormalizer) == std::vector<uint64_t>{29});
  CHECK(feas(2, ExceptionalImage::A5, ST::SplitNormalizer) == std::vector<uint64_t>{31});
  // S4 over a Cartan needs 73 = 1 mod 24, first reached at degree 6
  CHECK(feas(5, ExceptionalImage::S4, ST::SplitCartan).empty());
  CHECK(feas(6, ExceptionalImage::S4, ST::SplitCartan) == std::vector<uint64_t>{73});
}

TEST_CASE("feasible primes are consistent and monotone") {
  for (ExceptionalImage im : kAllExceptionalImages)
    for (StandardTarget t : kAllTargets)
      for (uint64_t d = 1; d <= 6; ++d) {
        auto cong = failure_congruence(im, t);
        auto lo = feas(d, im, t);
        if (!cong) {
          CHECK(lo.empty());
          continue;
        }
        for (uint64_t ell : lo) {
          CHECK(PrimeField::is_prime(ell));
          CHECK(ell <= exceptional_bound(d, im));
          CHECK(ell % cong->first == cong->second);
        }
        auto hi = feas(d + 1, im, t);
        CHECK(std::includes(hi.begin(), hi.end(), lo.begin(), lo.end()));
      }
}

TEST_CASE("feasible primes match the observed failures") {
  using ST = StandardTarget;
  struct Row {
    uint64_t ell;
    PglType::Kind kind;
    ExceptionalImage image;
    StandardTarget target;
  };
  // each of these classified as its tag with congruence_ok in the
  // verification suite; here the same primes fall out of the bound arithmetic
  for (const Row& r : {Row{5, PglType::Kind::A4, ExceptionalImage::A4, ST::NonsplitNormalizer},
                       Row{7, PglType::Kind::A4, ExceptionalImage::A4, ST::SplitNormalizer},
                       Row{13, PglType::Kind::S4, ExceptionalImage::S4, ST::SplitNormalizer},
                       Row{11, PglType::Kind::S4, ExceptionalImage::S4, ST::NonsplitNormalizer}}) {
    PrimeField F(r.ell);
    auto pre = exceptional_preimage(F, r.kind);
    REQUIRE(pre.has_value());
    TheoremCase c = classify(F, *pre, r.target);
    CHECK(c.congruence_ok);
    auto primes = feas(1, r.image, r.target);
    CHECK(std::count(primes.begin(), primes.end(), r.ell) == 1);
  }

  // Klein four: the quaternion group at 3 and the diagonal/antidiagonal
  // escapes at 5 and 7 sit exactly on the feasible lists
  PrimeField F3(3);
  Subgroup q8 = subgroup_closure(F3, {{0, 2, 1, 0}, {1, 1, 1, 2}});
  CHECK(classify(F3, q8, ST::SplitNormalizer).tag == CaseTag::KleinFour);
  auto ksp = feas(1, ExceptionalImage::KleinFour, ST::SplitNormalizer);
  CHECK(std::count(ksp.begin(), ksp.end(), 3) == 1);

  PrimeField F5(5);
  Subgroup w5 = subgroup_closure(F5, {{1, 0, 0, 4}, {0, 1, 1, 0}});
  CHECK(classify(F5, w5, ST::NonsplitNormalizer).tag == CaseTag::KleinFour);
  CHECK(feas(1, ExceptionalImage::KleinFour, ST::NonsplitNormalizer) ==
        std::vector<uint64_t>{5});
}

TEST_CASE("square-determinant requirement singles out the S4 normalizer cases") {
  using ST = StandardTarget;
  for (ExceptionalImage im : kAllExceptionalImages)
    for (StandardTarget t : kAllTargets) {
      bool s4_normalizer = im == ExceptionalImage::S4 &&
                           (t == ST::SplitNormalizer || t == ST::NonsplitNormalizer);
      CHECK(requires_square_determinants(im, t) == !s4_normalizer);
    }

  // over the rationals the mod-ell determinant is surjective, so only the
  // cases without the square constraint survive: 13 split, 11 nonsplit
  std::set<uint64_t> survivors;
  for (ExceptionalImage im : kAllExceptionalImages)
    for (StandardTarget t : kAllTargets)
      if (!requires_square_determinants(im, t))
        for (uint64_t ell : feas(1, im, t)) survivors.insert(ell);
  CHECK(survivors == std::set<uint64_t>{11, 13});
}

TEST_CASE("image names round trip") {
  for (ExceptionalImage im : kAllExceptionalImages)
    CHECK(parse_exceptional_image(exceptional_image_name(im)) == im);
  CHECK_THROWS_AS(parse_exceptional_image("D4"), std::invalid_argument);
}
