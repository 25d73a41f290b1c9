#include "vilenkin/group_element.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

using namespace vilenkin;

namespace {

GroupElement random_element(std::mt19937& rng, int p, int lo, int hi) {
  std::uniform_int_distribution<int> digit(0, p - 1);
  std::vector<std::uint8_t> ds;
  for (int j = lo; j <= hi; ++j) ds.push_back(static_cast<std::uint8_t>(digit(rng)));
  return GroupElement::from_digits(p, lo, ds);
}

// Carry-free base-p addition of two nonnegative integers.
long long carry_free_sum(long long a, long long b, int p) {
  long long out = 0;
  long long place = 1;
  while (a > 0 || b > 0) {
    out += ((a % p + b % p) % p) * place;
    a /= p;
    b /= p;
    place *= p;
  }
  return out;
}

}  // namespace

TEST(GroupElement, CanonicalTrimsZeros) {
  auto x = GroupElement::from_digits(3, -2, {0, 1, 0, 2, 0});
  EXPECT_EQ(x.support_lo(), -1);
  EXPECT_EQ(x.support_hi(), 1);
  EXPECT_EQ(x.digit(-1), 1);
  EXPECT_EQ(x.digit(0), 0);
  EXPECT_EQ(x.digit(1), 2);
  EXPECT_EQ(x.digit(7), 0);
  EXPECT_TRUE(GroupElement::from_digits(3, 4, {0, 0}).is_identity());
}

TEST(GroupElement, RejectsBadDigitsAndBases) {
  EXPECT_THROW(GroupElement::from_digits(3, 0, {3}), std::invalid_argument);
  EXPECT_THROW(GroupElement(1), std::invalid_argument);
  EXPECT_THROW(GroupElement(256), std::invalid_argument);
}

TEST(GroupOps, AddExamples) {
  EXPECT_TRUE(add(parse_element("2.1", 3), parse_element("1.2", 3)).is_identity());
  EXPECT_TRUE(add(parse_element("1.01", 2), parse_element("1.01", 2)).is_identity());
  EXPECT_EQ(add(parse_element("12.", 3), parse_element("1.1", 3)), parse_element("10.1", 3));
}

TEST(GroupOps, AddBaseMismatch) {
  EXPECT_THROW(add(parse_element("1.", 2), parse_element("1.", 3)), std::invalid_argument);
}

TEST(GroupOps, NegateExamples) {
  EXPECT_TRUE(negate(GroupElement(5)).is_identity());
  EXPECT_EQ(negate(parse_element("1.", 2)), parse_element("1.", 2));
  EXPECT_EQ(negate(parse_element("2.1", 3)), parse_element("1.2", 3));
}

TEST(GroupOps, DilateExamples) {
  EXPECT_TRUE(dilate(GroupElement(2), 5).is_identity());
  for (int p : {2, 3, 7}) {
    auto x = dilate(parse_element("1.", p), -1);
    EXPECT_EQ(x, parse_element(".1", p));
    EXPECT_EQ(x.support_lo(), 1);
  }
  // rho moves digits toward lower positions
  EXPECT_EQ(dilate(parse_element(".1", 2), 1), parse_element("1.", 2));
}

TEST(GroupProperties, AbelianGroupAxioms) {
  std::mt19937 rng(11);
  for (int p : {2, 3, 5}) {
    for (int trial = 0; trial < 200; ++trial) {
      auto x = random_element(rng, p, -4, 4);
      auto y = random_element(rng, p, -3, 5);
      auto z = random_element(rng, p, -6, 2);
      EXPECT_EQ(add(x, y), add(y, x));
      EXPECT_EQ(add(add(x, y), z), add(x, add(y, z)));
      EXPECT_EQ(add(x, GroupElement(p)), x);
      EXPECT_TRUE(add(x, negate(x)).is_identity());
    }
  }
}

TEST(GroupProperties, DilationIsAutomorphismAndInvertible) {
  std::mt19937 rng(12);
  for (int p : {2, 3, 5}) {
    for (int trial = 0; trial < 200; ++trial) {
      auto x = random_element(rng, p, -4, 4);
      auto y = random_element(rng, p, -2, 6);
      int k = static_cast<int>(rng() % 11) - 5;
      EXPECT_EQ(dilate(add(x, y), k), add(dilate(x, k), dilate(y, k)));
      EXPECT_EQ(dilate(dilate(x, 3), -3), x);
      EXPECT_EQ(dilate(dilate(x, k), -k), x);
    }
  }
}

TEST(Lambda, DecodeExamples) {
  EXPECT_TRUE(lambda_decode(0, 3).is_identity());
  auto five = lambda_decode(5, 2);
  EXPECT_EQ(five.digit(0), 1);
  EXPECT_EQ(five.digit(-1), 0);
  EXPECT_EQ(five.digit(-2), 1);
  EXPECT_EQ(five.support_lo(), -2);
  EXPECT_EQ(five.support_hi(), 0);
}

TEST(Lambda, RoundTripAndPositionalValue) {
  for (int p : {2, 3, 5}) {
    int limit = p * p * p * p;
    for (int k = 0; k < limit; ++k) {
      auto x = lambda_decode(k, p);
      EXPECT_EQ(lambda_encode(x), k);
      // sum_j x_j p^-j evaluated directly
      long long direct = 0;
      long long weight = 1;
      for (int j = 0; j >= -6; --j, weight *= p) direct += x.digit(j) * weight;
      EXPECT_EQ(direct, k);
    }
  }
  EXPECT_EQ(lambda_encode(parse_element("10.", 2)), 2);
  EXPECT_EQ(lambda_encode(parse_element("100.", 3)), 9);
}

TEST(Lambda, EncodeRejectsPositiveDigits) {
  EXPECT_THROW(lambda_encode(parse_element("1.01", 2)), std::invalid_argument);
}

TEST(Lambda, HomomorphismIsCarryFree) {
  for (int p : {2, 3, 5}) {
    for (long long a = 0; a < 40; ++a) {
      for (long long b = 0; b < 40; ++b) {
        auto sum = add(lambda_decode(a, p), lambda_decode(b, p));
        EXPECT_EQ(lambda_encode(sum), carry_free_sum(a, b, p));
      }
    }
  }
  // no digit collisions: ordinary addition
  EXPECT_EQ(lambda_encode(add(lambda_decode(1, 3), lambda_decode(3, 3))), 4);
}

TEST(Character, Examples) {
  auto omega = parse_element("21.02", 3);
  EXPECT_EQ(character_exponent(GroupElement(3), omega), 0);
  EXPECT_EQ(character_exponent(lambda_decode(1, 2), GroupElement::unit(2, 1, 1)), 1);
  EXPECT_EQ(character_exponent(GroupElement::unit(3, -1, 2), GroupElement::unit(3, 2, 2)), 1);
  EXPECT_THROW(character_exponent(lambda_decode(1, 2), GroupElement::unit(3, 1, 1)), std::invalid_argument);
}

TEST(Character, PairingMatchesDefinitionTermByTerm) {
  std::mt19937 rng(13);
  for (int p : {2, 3, 5}) {
    for (int trial = 0; trial < 200; ++trial) {
      auto x = random_element(rng, p, -4, 4);
      auto w = random_element(rng, p, -4, 4);
      long long s = 0;
      for (int j = -10; j <= 10; ++j) s += x.digit(j) * w.digit(1 - j);
      EXPECT_EQ(character_exponent(x, w), s % p);
    }
  }
}

TEST(Character, Bilinear) {
  std::mt19937 rng(14);
  for (int p : {2, 3, 5}) {
    for (int trial = 0; trial < 300; ++trial) {
      auto x = random_element(rng, p, -4, 4);
      auto y = random_element(rng, p, -4, 4);
      auto w = random_element(rng, p, -4, 4);
      auto v = random_element(rng, p, -4, 4);
      EXPECT_EQ(character_exponent(add(x, y), w), (character_exponent(x, w) + character_exponent(y, w)) % p);
      EXPECT_EQ(character_exponent(x, add(w, v)), (character_exponent(x, w) + character_exponent(x, v)) % p);
    }
  }
}

TEST(Character, DilationMovesAcrossThePairing) {
  std::mt19937 rng(15);
  for (int p : {2, 3}) {
    for (int trial = 0; trial < 100; ++trial) {
      auto x = random_element(rng, p, -4, 4);
      auto w = random_element(rng, p, -4, 4);
      int k = static_cast<int>(rng() % 7) - 3;
      EXPECT_EQ(character_exponent(dilate(x, -k), w), character_exponent(x, dilate(w, -k)));
    }
  }
}

// Characters of Lambda are orthogonal over the resolution-L cells of U*.
TEST(Character, OrthogonalOnUnitDual) {
  const double two_pi = 2.0 * std::acos(-1.0);
  for (int p : {2, 3, 5}) {
    int L = (p == 5) ? 2 : 3;
    int cells = 1;
    for (int i = 0; i < L; ++i) cells *= p;
    std::vector<GroupElement> cell_points;
    for (int c = 0; c < cells; ++c) {
      std::vector<std::uint8_t> ds;
      int rest = c;
      for (int i = 0; i < L; ++i) {
        ds.push_back(static_cast<std::uint8_t>(rest % p));
        rest /= p;
      }
      cell_points.push_back(GroupElement::from_digits(p, 1, ds));
    }
    for (int n = 0; n < cells; ++n) {
      for (int m = 0; m < cells; ++m) {
        std::complex<double> total = 0;
        for (const auto& c : cell_points) {
          int e = character_exponent(lambda_decode(n, p), c) - character_exponent(lambda_decode(m, p), c);
          total += std::polar(1.0, two_pi * e / p);
        }
        if (n == m) {
          EXPECT_NEAR(total.real(), cells, 1e-9);
        } else {
          EXPECT_NEAR(std::abs(total), 0.0, 1e-9) << "p=" << p << " n=" << n << " m=" << m;
        }
      }
    }
  }
}

TEST(Notation, ParseExamples) {
  EXPECT_TRUE(parse_element(".", 4).is_identity());
  auto two = parse_element("10.", 2);
  EXPECT_EQ(two.digit(-1), 1);
  EXPECT_EQ(two.digit(0), 0);
  EXPECT_EQ(lambda_encode(two), 2);
  EXPECT_EQ(format_element(parse_element("2.01", 3)), "2.01");
  EXPECT_EQ(format_element(GroupElement(3)), ".");
  EXPECT_EQ(format_element(GroupElement::unit(2, 2, 1)), ".01");
  EXPECT_EQ(format_element(GroupElement::unit(2, -2, 1)), "100.");
}

TEST(Notation, Errors) {
  EXPECT_THROW(parse_element("3.", 3), std::invalid_argument);
  EXPECT_THROW(parse_element("12", 3), std::invalid_argument);
  EXPECT_THROW(parse_element("1..2", 3), std::invalid_argument);
  EXPECT_THROW(parse_element("1.x", 3), std::invalid_argument);
  EXPECT_THROW(parse_element("(3.", 40), std::invalid_argument);
}

TEST(Notation, LargeBaseDigits) {
  auto x = parse_element("(37)b.z", 41);
  EXPECT_EQ(x.digit(-1), 37);
  EXPECT_EQ(x.digit(0), 11);
  EXPECT_EQ(x.digit(1), 35);
  EXPECT_EQ(format_element(x), "(37)b.z");
}

TEST(Notation, RoundTripRandom) {
  std::mt19937 rng(16);
  for (int p : {2, 3, 5, 16, 40}) {
    for (int trial = 0; trial < 100; ++trial) {
      auto x = random_element(rng, p, -5, 5);
      EXPECT_EQ(parse_element(format_element(x), p), x);
    }
  }
}
