#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "prate/approximations.hpp"
#include "prate/exact_limits.hpp"

using namespace prate;

namespace {

const SourcePmf kBern02 = SourcePmf::bernoulli(0.2);
const double kDeltaHalf = std::log2(5.0 / 3.0) / 3.0 + 2.0 * std::log2(5.0 / 6.0) / 3.0;
const std::vector<double> kTableEps{0.00003, 0.00010, 0.00032, 0.00093, 0.00251, 0.00626, 0.01444};

// Upper-tail inverse by bisection on erfc, written without the library.
double q_inverse_by_bisection(double eps) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(mid / std::sqrt(2.0)) > eps) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double log_factor_oracle(double var, double abs3) {
  const double s = std::sqrt(var);
  return std::log2((1.0 / s) * (1.0 / std::sqrt(2.0 * M_PI) + abs3 / var));
}

}  // namespace

TEST(NormalQuantile, MatchesErfcBisection) {
  double worst = 0.0;
  for (double e = 1e-12; e < 1.0; e *= 1.37) {
    worst = std::max(worst, std::abs(normal_upper_quantile(e) - q_inverse_by_bisection(e)));
    // Near 1 bisect the reflected tail instead; 1 - f is exact here.
    const double f = 1.0 - e;
    worst = std::max(worst, std::abs(normal_upper_quantile(f) + q_inverse_by_bisection(1.0 - f)));
  }
  EXPECT_LT(worst, 1e-9);
  EXPECT_EQ(normal_upper_quantile(0.5), 0.0);
  EXPECT_THROW(normal_upper_quantile(0.0), DomainError);
  EXPECT_THROW(normal_upper_quantile(1.0), DomainError);
}

TEST(EpsilonDelta, Conversions) {
  EXPECT_NEAR(epsilon_to_delta(0.01444, 50), std::log2(1 / 0.01444) / 50, 1e-16);
  EXPECT_NEAR(delta_to_epsilon(epsilon_to_delta(0.001, 80), 80), 0.001, 1e-15);
  EXPECT_THROW(epsilon_to_delta(0.0, 10), DomainError);
  EXPECT_THROW(epsilon_to_delta(1.0, 10), DomainError);
}

TEST(Shannon, Values) {
  EXPECT_NEAR(shannon_rate(kBern02), 0.722, 5e-4);
  EXPECT_EQ(shannon_rate(SourcePmf::uniform(2)), 1.0);
  EXPECT_NEAR(shannon_rate(SourcePmf({0.999, 0.001})), 0.011408, 5e-7);
}

TEST(Strassen, Values) {
  // sigma(Bern(0.2)) is exactly 0.8 bits: sqrt(0.16) * log2(4).
  EXPECT_NEAR(dispersion_bits(kBern02), 0.8, 1e-15);
  EXPECT_NEAR(strassen_rate(kBern02, 50, 0.01444), 0.913, 1e-3);
  EXPECT_NEAR(strassen_rate(kBern02, 50, 0.00003), 1.119, 1e-3);
  EXPECT_NEAR(strassen_rate(kBern02, 50, 0.5), entropy(kBern02) - std::log2(50.0) / 100.0, 1e-15);
  for (double e : kTableEps) {
    const double want = entropy(kBern02) + 0.8 * q_inverse_by_bisection(e) / std::sqrt(50.0) - std::log2(50.0) / 100;
    EXPECT_NEAR(strassen_rate(kBern02, 50, e), want, 1e-10);
  }
  EXPECT_THROW(strassen_rate(kBern02, 50, 1.5), DomainError);
}

TEST(Blahut, Values) {
  EXPECT_NEAR(blahut_rate(kBern02, 50, 0.01444), 0.957, 1e-3);
  EXPECT_NEAR(blahut_rate(kBern02, 50, 0.00003), 1.000, 1e-3);
  EXPECT_NEAR(blahut_rate(kBern02, 1000000000000ULL, 0.1), entropy(kBern02), 1e-5);
}

TEST(Blahut, OutOfRangeReportsEpsilonInterval) {
  try {
    blahut_rate(kBern02, 10, 1e-6);  // delta = 1.99 bits, far above D(U||P)
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("epsilon"), std::string::npos) << e.what();
  }
  EXPECT_THROW(blahut_rate(SourcePmf::uniform(2), 50, 0.1), DomainError);
}

TEST(Pragmatic, Values) {
  EXPECT_NEAR(pragmatic_rate(kBern02, 50, 0.01444), 0.869, 1e-3);
  EXPECT_NEAR(pragmatic_rate(kBern02, 50, 0.00003), 0.941, 1e-3);
  const double exact = std::log2(3.0) - 2.0 / 3.0 - std::log2(50.0) / 50.0;
  EXPECT_NEAR(pragmatic_rate_for_delta(kBern02, 50, kDeltaHalf), exact, 1e-12);
  EXPECT_NEAR(exact, 0.805419, 5e-7);
  EXPECT_NEAR(pragmatic_rate(kBern02, 50, std::exp2(-50 * 0.070304)), 0.805419, 1e-4);
}

TEST(Pragmatic, BelowBlahutAndIncreasingInDelta) {
  for (std::uint64_t n = 10; n <= 200; n += 10) {
    double prev = -1.0;
    for (int k = 1; k < 60; ++k) {
      const double delta = 0.321928 * k / 60.0;
      const double prag = pragmatic_rate_for_delta(kBern02, n, delta);
      EXPECT_LT(prag, solve_alpha_star(kBern02, delta).h_tilted);
      EXPECT_GE(prag, prev);
      prev = prag;
    }
  }
}

TEST(Ladder, TableRowsAndIdentities) {
  for (double e : kTableEps) {
    const auto row = rate_ladder(kBern02, 50, e);
    ASSERT_TRUE(row.blahut && row.pragmatic && row.alpha_star);
    EXPECT_NEAR(row.shannon, 0.722, 5e-4);
    EXPECT_DOUBLE_EQ(*row.pragmatic, *row.blahut - std::log2(50.0) / (100.0 * (1 - *row.alpha_star)));
    EXPECT_DOUBLE_EQ(*row.blahut, solve_alpha_star(kBern02, row.delta).h_tilted);
    // Deep regime ordering.
    EXPECT_LT(row.shannon, *row.pragmatic);
    EXPECT_LT(*row.pragmatic, *row.blahut);
  }
  const auto uniform = rate_ladder(SourcePmf::uniform(2), 50, 0.1);
  EXPECT_FALSE(uniform.blahut);
  EXPECT_FALSE(uniform.pragmatic);
}

TEST(Achievability, MatchesIndependentMoments) {
  for (double delta : {kDeltaHalf, 0.070304, 0.2}) {
    const auto s = solve_alpha_star(kBern02, delta);
    const double a = s.alpha_star;
    const auto w = oracle::tilted({0.2, 0.8}, a);
    std::vector<double> f1(2), f2(2);
    for (int x = 0; x < 2; ++x) {
      f1[x] = std::log(w[x]);
      f2[x] = std::log(w[x] / (x == 0 ? 0.2 : 0.8));
    }
    const auto [v1, r1] = oracle::var_abs3(w, f1);
    const auto [v2, r2] = oracle::var_abs3(w, f2);
    const double want = log_factor_oracle(v1, r1) + a / (1 - a) * log_factor_oracle(v2, r2);
    EXPECT_NEAR(achievability_constant(kBern02, delta), want, 1e-9);
  }
}

TEST(Achievability, BoundHoldsAgainstExactRates) {
  const double c = achievability_constant(kBern02, 0.070304);
  const auto s = solve_alpha_star(kBern02, 0.070304);
  for (std::uint64_t n = 1; n <= 60; ++n) {
    const double nn = static_cast<double>(n);
    const double eps = delta_to_epsilon(0.070304, n);
    const double bound = s.h_tilted - std::log2(nn) / (2 * nn * (1 - s.alpha_star)) + c / nn;
    EXPECT_LE(optimal_rate(kBern02, n, eps), bound) << "n = " << n;
  }
  const SourcePmf p3({0.6, 0.3, 0.1});
  const double delta3 = 0.5 * delta_range(p3)->upper;
  const double c3 = achievability_constant(p3, delta3);
  const auto s3 = solve_alpha_star(p3, delta3);
  for (std::uint64_t n = 1; n <= 40; ++n) {
    const double nn = static_cast<double>(n);
    const double bound = s3.h_tilted - std::log2(nn) / (2 * nn * (1 - s3.alpha_star)) + c3 / nn;
    EXPECT_LE(optimal_rate(p3, n, delta_to_epsilon(delta3, n)), bound) << "n = " << n;
  }
}

TEST(Converse, ConstantsFollowTheirDefinitions) {
  const auto k = converse_constants(kBern02, 0.070304);
  EXPECT_GT(k.p, 0.0);
  EXPECT_GT(k.q, 0.0);
  EXPECT_GT(k.r, 0.0);
  EXPECT_GE(k.N1, 8.0);
  EXPECT_GE(k.N2, 3.0);
  EXPECT_GE(k.N0, std::max(k.N1, k.N2));
  EXPECT_GE(k.N0, k.n0_berry_esseen);
  EXPECT_GE(k.N0, k.n0_quadratic);
  EXPECT_GE(k.N0, k.n0_alpha_bound);

  const double le = 1.0 / std::log(2.0);
  const auto& e = k.envelope;
  const double a = k.alpha_star;
  const double ratio = e.rho3_sup / std::pow(e.sigma3_inf_sq, 1.5) + 1;
  EXPECT_NEAR(k.p, le * (1 - a) * tilt(kBern02, a).sigma3_sq, 1e-14);
  EXPECT_NEAR(k.q, le / 2 * (e.sigma3_sup_sq + e.rho3_sup), 1e-14);
  EXPECT_NEAR(k.r, 19 * le * (1 - a) * ratio * std::sqrt(k.sigma3_sq + e.rho3_sup), 1e-12);
  EXPECT_DOUBLE_EQ(k.n0_berry_esseen, 4.4 * ratio * ratio);
  const double C = (1 + k.q + k.r) / (1 - a) + le / 2 * std::abs(e.sigma3_inf_sq - (1 - a) * e.rho3_sup) +
                   le / 2 * (e.sigma3_sup_sq + e.rho3_sup) + 1;
  EXPECT_NEAR(k.C, C, 1e-12);

  // N1, N2 by direct scan.
  double n1 = 8;
  while (std::log2(n1) > k.p * std::sqrt(n1)) n1 += 1;
  double n2 = 3;
  while (std::log2(n2) > k.p * (1 - a) * n2) n2 += 1;
  EXPECT_EQ(k.N1, n1);
  EXPECT_EQ(k.N2, n2);
  EXPECT_NEAR(k.achievability_c, achievability_constant(kBern02, 0.070304), 1e-15);
}

TEST(Converse, NearUniformStaysFinite) {
  const SourcePmf p({0.51, 0.49});
  const auto k = converse_constants(p, 0.5 * delta_range(p)->upper);
  for (double v : {k.p, k.q, k.r, k.N0, k.N1, k.N2, k.C, k.achievability_c}) {
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GT(v, 0.0);
  }
  EXPECT_GT(k.N0, 1e4);
  EXPECT_THROW(converse_constants(SourcePmf::uniform(2), 0.1), DomainError);
}

TEST(Converse, BoundHoldsWhereCheckable) {
  // N0 lies far beyond exhaustive reach for these parameters, so the bound
  // itself is exercised at a few blocklengths above N0 with m = 2.
  const auto k = converse_constants(kBern02, 0.070304);
  const auto s = solve_alpha_star(kBern02, 0.070304);
  for (double nn : {std::floor(k.N0) + 1, std::floor(k.N0) + 1000}) {
    const auto n = static_cast<std::uint64_t>(nn);
    const double bound = s.h_tilted - std::log2(nn) / (2 * nn * (1 - s.alpha_star)) - k.C / nn;
    EXPECT_GE(optimal_rate_for_delta(log_length_distribution(kBern02, n), 0.070304), bound) << "n = " << n;
  }
}

TEST(UniversalBound, BinaryCollapsesToPragmatic) {
  for (std::uint64_t n : {10u, 50u, 500u}) {
    const auto b = universal_rate_bound(kBern02, n, 0.1);
    EXPECT_NEAR(b.rate, pragmatic_rate_for_delta(kBern02, n, 0.1), 1e-15);
    EXPECT_FALSE(b.residual_quantified);
  }
}

TEST(UniversalBound, TernaryExceedsPragmaticByHalfLogTerm) {
  const SourcePmf p({0.5, 0.3, 0.2});
  const double delta = 0.5 * delta_range(p)->upper;
  const auto b = universal_rate_bound(p, 100, delta);
  EXPECT_NEAR(b.rate - pragmatic_rate_for_delta(p, 100, delta), 0.5 * std::log2(100.0) / 100.0, 1e-14);
}

TEST(PrefixAdjust, AddsOneBitPerBlock) {
  EXPECT_NEAR(prefix_adjust(0.940, 50), 0.960, 1e-15);
  EXPECT_NEAR(prefix_adjust(0.5, 1000000), 0.5, 2e-6);
  EXPECT_THROW(prefix_adjust(0.5, 0), DomainError);
}
