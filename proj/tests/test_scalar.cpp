#include <gtest/gtest.h>

#include <random>

#include "agd/error.hpp"
#include "agd/rational_map.hpp"
#include "agd/scalar.hpp"

using namespace agd;

namespace {

ComplexScalar q(long num, long den = 1) { return ComplexScalar(Rational(num, den)); }

}  // namespace

TEST(Rational, ParsesFractionsIntegersAndDecimals) {
  EXPECT_EQ(parse_rational("2/5"), Rational(2, 5));
  EXPECT_EQ(parse_rational("-7"), Rational(-7));
  EXPECT_EQ(parse_rational("-0.25"), Rational(-1, 4));
  EXPECT_EQ(parse_rational("6/4"), Rational(3, 2));
  EXPECT_EQ(to_string(Rational(29, 100)), "29/100");
}

TEST(Rational, RejectsMalformedText) {
  for (const char* bad : {"", "1/0", "abc", "1//2", "0.5.1"}) {
    EXPECT_THROW(parse_rational(bad), Error) << bad;
  }
}

TEST(Rational, SimplestBetweenHasMinimalDenominator) {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(0.001, 10.0);
  for (int i = 0; i < 200; ++i) {
    double lo = u(rng);
    double hi = lo * (1.0 + 0.5 * std::uniform_real_distribution<double>(0.01, 1.0)(rng));
    Rational r = simplest_between(lo, hi);
    ASSERT_GT(r.get_d(), lo);
    ASSERT_LT(r.get_d(), hi);
    // Brute force: no smaller denominator has a numerator strictly inside.
    long den = r.get_den().get_si();
    for (long d = 1; d < den; ++d) {
      double first = std::floor(lo * static_cast<double>(d)) + 1.0;
      ASSERT_FALSE(first / static_cast<double>(d) < hi) << "denominator " << d << " fits (" << lo << ", " << hi << ")";
    }
  }
}

TEST(ComplexScalar, ExactArithmeticStaysExact) {
  ComplexScalar a(Rational(1, 2), Rational(1, 3));
  ComplexScalar b(Rational(-2), Rational(3, 4));
  ComplexScalar p = a * b;
  EXPECT_TRUE(p.exact());
  // (1/2 + i/3)(-2 + 3i/4) = -1 - 1/4 + i(3/8 - 2/3)
  EXPECT_EQ(p.re(), Rational(-5, 4));
  EXPECT_EQ(p.im(), Rational(-7, 24));
  ComplexScalar back = p / b;
  EXPECT_TRUE(same_point(back, a, 0.0));
  EXPECT_TRUE((a - a).is_zero());
}

TEST(ComplexScalar, MixedArithmeticMatchesStdComplex) {
  std::mt19937 rng(2);
  std::uniform_int_distribution<long> n(-20, 20);
  std::uniform_int_distribution<long> d(1, 9);
  for (int i = 0; i < 100; ++i) {
    ComplexScalar a(Rational(n(rng), d(rng)), Rational(n(rng), d(rng)));
    ComplexScalar b = ComplexScalar::approximate({0.25 * static_cast<double>(n(rng)), 0.5});
    std::complex<double> expect = a.value() * b.value() + a.value();
    ComplexScalar got = a * b + a;
    EXPECT_FALSE(got.exact());
    EXPECT_NEAR(std::abs(got.value() - expect), 0.0, 1e-12);
  }
}

TEST(ComplexScalar, PowerAgreesWithRepeatedProduct) {
  ComplexScalar z(Rational(2, 3), Rational(-1, 5));
  ComplexScalar acc = q(1);
  for (unsigned long k = 0; k < 12; ++k) {
    EXPECT_TRUE(same_point(z.pow(k), acc, 0.0)) << k;
    acc = acc * z;
  }
}

TEST(ComplexScalar, CircleDistanceIsExactOnHits) {
  EXPECT_EQ(circle_distance(q(1, 3), Rational(1, 3)), 0.0);
  EXPECT_EQ(circle_distance(ComplexScalar(Rational(3, 5), Rational(4, 5)), Rational(1)), 0.0);
  EXPECT_NEAR(circle_distance(q(1, 2), Rational(2, 5)), 0.1, 1e-15);
  EXPECT_EQ(compare_modulus(ComplexScalar(Rational(3), Rational(4)), Rational(5)), 0);
  EXPECT_EQ(compare_modulus(q(-1, 2), Rational(1, 3)), 1);
}

TEST(Polynomial, DivisionWithRemainderReconstructs) {
  Polynomial a({q(1), q(-3), q(0), q(2)});
  Polynomial b({q(-1), q(1)});
  auto [quot, rem] = a.divmod(b);
  EXPECT_TRUE((quot * b + rem).identical(a));
  EXPECT_LT(rem.degree(), b.degree());
  // Remainder equals a(1) by the factor theorem.
  EXPECT_TRUE(same_point(rem(q(0)), a(q(1)), 0.0));
}

TEST(RationalMap, ArithmeticMatchesPointwiseEvaluation) {
  RationalMap f(Polynomial({q(1), q(1)}), Polynomial({q(0), q(1)}));  // (1+z)/z
  RationalMap g = RationalMap::affine(q(2), q(-1));                     // 2z - 1
  for (long k = 1; k <= 10; ++k) {
    ComplexScalar z(Rational(k, 7), Rational(1, k + 1));
    EXPECT_TRUE(same_point((f + g)(z), f(z) + g(z), 0.0));
    EXPECT_TRUE(same_point((f - g)(z), f(z) - g(z), 0.0));
    EXPECT_TRUE(same_point((f * g)(z), f(z) * g(z), 0.0));
    EXPECT_TRUE(same_point(f.reciprocal()(z), q(1) / f(z), 0.0));
  }
}

TEST(RationalMap, NormalizesCommonFactors) {
  // (z^2 - 1)/(z - 1) reduces to z + 1.
  RationalMap f(Polynomial({q(-1), q(0), q(1)}), Polynomial({q(-1), q(1)}));
  auto aff = f.as_affine();
  ASSERT_TRUE(aff.has_value());
  EXPECT_TRUE(same_point(aff->first, q(1), 0.0));
  EXPECT_TRUE(same_point(aff->second, q(1), 0.0));
  EXPECT_TRUE(RationalMap::affine(q(1), q(0)).is_identity());
  EXPECT_TRUE(RationalMap::constant(q(3)).constant_value().has_value());
}

TEST(RationalMap, PoleThrowsNotInvertible) {
  RationalMap f = RationalMap::affine(q(1), q(-2)).reciprocal();
  try {
    f(q(2));
    FAIL() << "expected a throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotInvertible);
  }
}

TEST(RationalMap, PreimagesOfAffineMap) {
  RationalMap f = RationalMap::affine(q(3), q(1));
  auto pre = f.preimages(q(7));
  ASSERT_EQ(pre.size(), 1u);
  EXPECT_TRUE(same_point(pre[0], q(2), 0.0));
  EXPECT_TRUE(RationalMap::constant(q(1)).preimages(q(1)).empty());
}
