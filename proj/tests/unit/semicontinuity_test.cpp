#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "sinprod/random.hpp"
#include "sinprod/semicontinuity.hpp"

using namespace sinprod;

namespace {

double generic_delta(int k, double lambda, double eps) {
  const double sq = (2.0 * k + 1) * (2.0 * k + 1);
  return sq * std::pow(lambda, sq / 2.0) * std::min(eps, 1.0 / 7.0) / (21.0 * std::ldexp(1.0, k + 1));
}

}  // namespace

TEST(Witness, ThirdOfPiIsCertified) {
  const UscWitness w = usc_witness(AngleRep::rational(1, 3), 0.1);
  EXPECT_TRUE(w.certified);
  EXPECT_FALSE(w.lattice);
  EXPECT_LT(w.lambda, 0.81);
  EXPECT_NEAR(w.lambda, partial_product(AngleRep::rational(1, 3), w.k).value, 1e-15);
  EXPECT_NEAR(w.delta / generic_delta(w.k, w.lambda, 0.1), 1.0, 1e-12);
  // least: one depth shallower is still too high above the certified floor
  if (w.k > 0) {
    const ProductEnclosure e = evaluate_limit(AngleRep::rational(1, 3), default_reference_depth, true);
    EXPECT_GT(partial_product(AngleRep::rational(1, 3), w.k - 1).value, e.lower + 0.01);
  }
}

TEST(Witness, LargeEpsilonIsCappedAtOneSeventh) {
  const UscWitness w = usc_witness(AngleRep::rational(1, 3), 0.2);
  EXPECT_NEAR(w.delta / generic_delta(w.k, w.lambda, 1.0 / 7.0), 1.0, 1e-12);
  const UscWitness big = usc_witness(AngleRep::rational(1, 3), 0.9);
  EXPECT_NEAR(big.delta / generic_delta(big.k, big.lambda, 1.0 / 7.0), 1.0, 1e-12);
}

TEST(Witness, DepthZeroGivesSineSquared) {
  // f_0(pi/3) = 3/4 is within eps^2 of the certified floor once eps^2 > 0.11
  const UscWitness w = usc_witness(AngleRep::rational(1, 3), 0.35);
  EXPECT_EQ(w.k, 0);
  EXPECT_NEAR(w.lambda, 0.75, 1e-15);
  EXPECT_LT(w.lambda, 0.81);
}

TEST(Witness, LambdaBelowEightyOneHundredthsWhenCertified) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    for (double eps : {1.0 / 7.0, 0.1, 0.05}) {
      const UscWitness w = usc_witness(AngleRep::random(21, s), eps, 256);
      if (!w.certified) continue;
      EXPECT_LT(w.lambda, 0.81) << s << " " << eps;
    }
  }
}

TEST(Witness, LatticePoint) {
  const UscWitness w = usc_witness(AngleRep::dyadic(3, 3), 0.1);
  EXPECT_TRUE(w.lattice);
  EXPECT_EQ(w.k, 3);
  EXPECT_EQ(w.lambda, 0.0);
  EXPECT_NEAR(w.delta / (std::asin(std::pow(0.1, 49.0 / 2.0)) / 8.0), 1.0, 1e-12);
  // sin^2 t < eps near pi
  const UscWitness zero = usc_witness(AngleRep::dyadic(1, 0), 0.5);
  EXPECT_EQ(zero.k, 0);
  EXPECT_NEAR(zero.delta, std::asin(std::sqrt(0.5)), 1e-15);
}

TEST(Witness, RawRealIsProxyOnly) {
  const UscWitness w = usc_witness(AngleRep::radians(1.0), 0.1);
  EXPECT_FALSE(w.certified);
  EXPECT_THROW(usc_witness(AngleRep::radians(1.0), 0.1, default_reference_depth, true), error);
  try {
    usc_witness(AngleRep::radians(1.0), 0.1, default_reference_depth, true);
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::certificate_unavailable);
  }
  EXPECT_THROW(usc_witness(AngleRep::radians(1.0), 0.0), error);
}

TEST(SlopeBound, Examples) {
  const AngleRep half = AngleRep::dyadic(1, 1);
  EXPECT_NEAR(lemma2_rhs(half, perturbed(half, 0.1 / std::numbers::pi, 4), 0), 0.2, 1e-14);
  const AngleRep quarter = AngleRep::dyadic(1, 2);
  EXPECT_NEAR(lemma2_rhs(quarter, perturbed(quarter, -0.01 / std::numbers::pi, 4), 1), 0.04 / 9.0, 1e-15);
  EXPECT_THROW(lemma2_rhs(AngleRep::dyadic(1, 2), AngleRep::rational(1, 3), 2), error);
}

TEST(SlopeBound, HoldsOnRandomPairs) {
  const CounterRng rng(77, 1);
  int checked = 0;
  for (std::uint64_t i = 0; i < 20000; ++i) {
    const AngleRep x = AngleRep::random(77, 2 * i);
    const int n = static_cast<int>(rng.bits(i) % 24);
    // nearby partners exercise the derivative bound, far ones the reflection argument
    const double scale = std::ldexp(1.0, -static_cast<int>(rng.bits(i + (1ULL << 40)) % 40));
    const double off = rng.symmetric_nonzero(i + (1ULL << 41)) * scale;
    const AngleRep t = perturbed(x, off, words_for_offset(off, n));
    const double lhs = log_factor_rise(x, t, n);
    ASSERT_LT(lhs, lemma2_rhs(x, t, n)) << i;
    ++checked;
  }
  EXPECT_EQ(checked, 20000);
}

TEST(SlopeBound, RiseMatchesDirectDifference) {
  // far apart the two agree to rounding; close together the direct form cancels
  const AngleRep x = AngleRep::rational(1, 3);
  for (int n : {0, 1, 5}) {
    const AngleRep t = perturbed(x, 0.01, 4);
    EXPECT_NEAR(log_factor_rise(x, t, n), log_factor(t, n) - log_factor(x, n), 1e-14) << n;
  }
  // g_0 = 2 log sin has slope 2 at pi/4, far below what the direct difference resolves
  const AngleRep q = AngleRep::dyadic(1, 2);
  const AngleRep qt = perturbed(q, std::ldexp(1.0, -60), 4);
  EXPECT_NEAR(log_factor_rise(q, qt, 0) / (2.0 * std::numbers::pi * std::ldexp(1.0, -60)), 1.0, 1e-12);
  EXPECT_EQ(log_factor(qt, 0) - log_factor(q, 0), 0.0);
  // beyond a quarter turn it falls back to the direct difference
  const AngleRep far = perturbed(x, 0.4, 4);
  EXPECT_EQ(log_factor_rise(x, far, 2), log_factor(far, 2) - log_factor(x, 2));
}

TEST(CheckUsc, ThirdOfPi) {
  const UscReport r = check_usc(AngleRep::rational(1, 3), 0.05, 10000, 5);
  EXPECT_TRUE(r.passes);
  EXPECT_EQ(r.log_violations, 0U);
  EXPECT_EQ(r.value_violations, 0U);
  EXPECT_EQ(r.log_checks, 10000U);
  EXPECT_EQ(r.value_checks, 10000U);
  EXPECT_LT(r.max_log_ratio, 1.0);
  EXPECT_LT(r.max_value_excess, 0.0);
}

TEST(CheckUsc, LatticePoint) {
  const UscReport r = check_usc(AngleRep::dyadic(5, 4), 0.2, 2000, 3);
  EXPECT_TRUE(r.witness.lattice);
  EXPECT_TRUE(r.passes);
  EXPECT_EQ(r.log_checks, 0U);
  EXPECT_EQ(r.value_checks, 2000U);
}

TEST(CheckUsc, ZeroTrialsIsEmpty) {
  const UscReport r = check_usc(AngleRep::rational(1, 3), 0.05, 0);
  EXPECT_EQ(r.trials, 0U);
  EXPECT_EQ(r.log_checks, 0U);
  EXPECT_EQ(r.value_checks, 0U);
  EXPECT_TRUE(r.passes);
}

TEST(CheckUsc, RandomBasePoints) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const UscReport r = check_usc(AngleRep::random(31, s), 0.1, 1000, s, 256);
    EXPECT_TRUE(r.passes) << s;
  }
}

TEST(CheckUsc, IndependentOfWorkers) {
  const AngleRep x = AngleRep::random(8, 8);
  EXPECT_EQ(check_usc(x, 0.1, 700, 2, 256, false, 1), check_usc(x, 0.1, 700, 2, 256, false, 4));
}

TEST(FirstProductMax, MaximumOfFirstPartialProduct) {
  const LambdaMaxCheck c = lemma1_lambda_max_check();
  EXPECT_TRUE(c.passes);
  EXPECT_NEAR(c.argmax, 1.2645189576252271631, 1e-7);
  EXPECT_NEAR(c.max_value, 0.80388399818250126823, 1e-14);
  EXPECT_LT(c.max_value, 0.81);
  EXPECT_NEAR(c.sin_argmax, std::sqrt(10.0 / 11.0), 1e-7);
}
