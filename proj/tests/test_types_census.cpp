#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "prate/types_census.hpp"

using namespace prate;

namespace {

BigInt big_power(std::size_t m, std::uint64_t n) {
  BigInt r = 1;
  for (std::uint64_t i = 0; i < n; ++i) r *= m;
  return r;
}

BigInt factorial(std::uint64_t n) {
  BigInt r = 1;
  for (std::uint64_t i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace

TEST(EnumerateTypes, SmallCases) {
  const auto t = enumerate_types(2, 2);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0].counts, (std::vector<std::uint32_t>{0, 2}));
  EXPECT_EQ(t[1].counts, (std::vector<std::uint32_t>{1, 1}));
  EXPECT_EQ(t[2].counts, (std::vector<std::uint32_t>{2, 0}));
  EXPECT_EQ(enumerate_types(4, 3).size(), 15u);
  EXPECT_EQ(enumerate_types(50, 2).size(), 51u);
}

TEST(EnumerateTypes, CountsAndOrder) {
  for (std::size_t m = 2; m <= 5; ++m) {
    for (std::uint64_t n = 1; n <= 12; ++n) {
      const auto t = enumerate_types(n, m);
      EXPECT_EQ(BigInt(t.size()), type_count(n, m));
      EXPECT_TRUE(std::is_sorted(t.begin(), t.end()));
      EXPECT_EQ(std::adjacent_find(t.begin(), t.end()), t.end());
      for (const auto& x : t) EXPECT_EQ(x.n(), n);
    }
  }
}

TEST(TypeClassSize, KnownValues) {
  EXPECT_EQ(type_class_size(NType{{2, 2}}), 6);
  EXPECT_EQ(type_class_size(NType{{7, 0, 0}}), 1);
  for (std::size_t m = 2; m <= 8; ++m) {
    EXPECT_EQ(type_class_size(NType{std::vector<std::uint32_t>(m, 1)}), factorial(m));
  }
  EXPECT_NEAR(log2_type_class_size(NType{{2, 2}}), std::log2(6.0), 1e-12);
}

TEST(TypeClassSize, PartitionOfAllStrings) {
  for (std::size_t m = 2; m <= 4; ++m) {
    for (std::uint64_t n = 1; n <= 60; n += (m == 4 ? 3 : 1)) {
      BigInt total = 0;
      for_each_type(n, m, [&](const NType& t) { total += type_class_size(t); });
      EXPECT_EQ(total, big_power(m, n)) << "m=" << m << " n=" << n;
    }
  }
}

TEST(TypeClassSize, MatchesFactorialFormula) {
  for_each_type(9, 3, [&](const NType& t) {
    BigInt denom = 1;
    for (auto c : t.counts) denom *= factorial(c);
    EXPECT_EQ(type_class_size(t), factorial(9) / denom);
  });
}

TEST(StirlingRatio, HandValues) {
  // 6 / (2^4 * 4^{-1/2} * 2) and 2 / (2^2 * 2^{-1/2} * 2).
  EXPECT_NEAR(stirling_ratio(NType{{2, 2}}), 0.375, 1e-12);
  EXPECT_NEAR(stirling_ratio(NType{{1, 1}}), 1.0 / (2.0 * std::sqrt(2.0)), 1e-12);
  EXPECT_THROW(stirling_ratio(NType{{0, 3}}), DomainError);
}

TEST(StirlingRatio, BoundedBandPerSupportSize) {
  for (std::size_t k = 2; k <= 3; ++k) {
    double lo = 1e300, hi = 0.0;
    const std::uint64_t top = k == 2 ? 400 : 120;
    for (std::uint64_t n = k; n <= top; ++n) {
      for_each_type(n, k, [&](const NType& t) {
        if (t.support_size() < k) return;
        const double r = stirling_ratio(t);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      });
    }
    EXPECT_LT(hi / lo, 4.0) << "k=" << k;
  }
  // Balanced binary types approach 1/sqrt(2 pi) from below.
  for (std::uint64_t n = 2; n <= 400; n += 2) {
    const double r = stirling_ratio(NType{{static_cast<std::uint32_t>(n / 2), static_cast<std::uint32_t>(n / 2)}});
    EXPECT_GT(r, 0.35);
    EXPECT_LT(r, 1.0 / std::sqrt(2 * M_PI));
  }
}

TEST(EntropySlab, KnownCounts) {
  EXPECT_EQ(entropy_slab_count(4, 2, oracle::entropy_bits({0.2, 0.8})), 0u);
  EXPECT_EQ(entropy_slab_count(4, 2, oracle::entropy_bits({0.25, 0.75})), 2u);
}

TEST(EntropySlab, GrowsLikeNToTheMMinusTwo) {
  const double h = oracle::entropy_bits({0.6, 0.3, 0.1});
  double lo = 1e300;
  for (std::uint64_t n = 50; n <= 400; n += 25) {
    lo = std::min(lo, static_cast<double>(entropy_slab_count(n, 3, h)) / static_cast<double>(n));
  }
  EXPECT_GT(lo, 0.1);
}

TEST(LowEntropyCount, KnownCounts) {
  EXPECT_EQ(low_entropy_count(4, 2, 0.721928).count, 2);
  EXPECT_EQ(low_entropy_count(2, 2, 1.0).count, 4);
  for (std::size_t m = 2; m <= 4; ++m) {
    for (std::uint64_t n = 1; n <= 20; ++n) {
      EXPECT_EQ(low_entropy_count(n, m, std::log2(static_cast<double>(m))).count, big_power(m, n));
    }
  }
}

TEST(LowEntropyCount, MatchesStringEnumeration) {
  for (std::size_t m = 2; m <= 4; ++m) {
    const std::uint64_t top = m == 4 ? 6 : 10;
    for (std::uint64_t n = 1; n <= top; ++n) {
      for (double h : {0.3, 0.72, 0.9, 1.2, 1.5}) {
        std::uint64_t brute = 0;
        for (std::uint64_t code = 0; code < oracle::power(m, n); ++code) {
          if (oracle::word_entropy(oracle::nth_word(code, m, n), m) <= h + 1e-12) ++brute;
        }
        const auto rep = low_entropy_count(n, m, h);
        EXPECT_EQ(rep.count, brute) << "m=" << m << " n=" << n << " h=" << h;
        if (brute > 0) {
          EXPECT_NEAR(rep.log2_count, std::log2(static_cast<double>(brute)), 1e-9);
        }
      }
    }
  }
}

TEST(LowEntropyCount, NondecreasingInThreshold) {
  BigInt prev = 0;
  for (int k = 0; k <= 100; ++k) {
    const auto c = low_entropy_count(30, 3, std::log2(3.0) * k / 100).count;
    EXPECT_GE(c, prev);
    prev = c;
  }
}

TEST(LowEntropyCount, LogCountAgreesWithExactCount) {
  for (std::uint64_t n = 10; n <= 60; n += 10) {
    const auto rep = low_entropy_count(n, 3, 1.2);
    EXPECT_NEAR(rep.log2_count, std::log2(rep.count.convert_to<double>()), 1e-9);
  }
}

TEST(LowEntropyCount, ThetaBandBinary) {
  const double h = oracle::entropy_bits({0.2, 0.8});
  double lo = 1e300, hi = 0.0, lo_shift = 1e300, hi_shift = 0.0;
  for (std::uint64_t n = 20; n <= 2000; n += 20) {
    const double r = low_entropy_count(n, 2, h).theta_ratio;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    // Perturbed threshold h + 1/n, compared on raw counts.
    const double rs = std::exp2(low_entropy_count(n, 2, h + 1.0 / n).log2_count - low_entropy_count(n, 2, h).log2_count);
    lo_shift = std::min(lo_shift, rs);
    hi_shift = std::max(hi_shift, rs);
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi / lo, 10.0);
  EXPECT_GE(lo_shift, 1.0);
  EXPECT_LT(hi_shift, 10.0);
}

TEST(LowEntropyCount, ThetaBandTernary) {
  const double h = oracle::entropy_bits({0.6, 0.3, 0.1});
  double lo = 1e300, hi = 0.0;
  for (std::uint64_t n = 20; n <= 400; n += 20) {
    const double r = low_entropy_count(n, 3, h).theta_ratio;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  EXPECT_LT(hi / lo, 10.0);
}

TEST(RankInTypeClass, TwoElementClass) {
  EXPECT_EQ(rank_in_type_class(Word{0, 1}, 2), 0);
  EXPECT_EQ(rank_in_type_class(Word{1, 0}, 2), 1);
  EXPECT_THROW(rank_in_type_class(Word{0, 2}, 2), InvalidInput);
  EXPECT_THROW(unrank_in_type_class(NType{{1, 1}}, BigRank(2)), DomainError);
}

TEST(RankInTypeClass, ExhaustiveRoundTripAndOrder) {
  for (auto [m, n] : {std::pair<std::size_t, std::size_t>{3, 4}, {2, 10}, {4, 5}}) {
    std::map<std::vector<std::uint32_t>, std::vector<Word>> classes;
    for (std::uint64_t code = 0; code < oracle::power(m, n); ++code) {
      const Word w = oracle::nth_word(code, m, n);
      EXPECT_EQ(unrank_in_type_class(NType::of(w, m), rank_in_type_class(w, m)), w);
      classes[NType::of(w, m).counts].push_back(w);  // codes ascend, so lexicographic
    }
    for (const auto& [counts, words] : classes) {
      for (std::size_t i = 0; i < words.size(); ++i) EXPECT_EQ(rank_in_type_class(words[i], m), i);
    }
  }
}

TEST(RankInTypeClass, LongRandomWords) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    Word w(300);
    for (auto& s : w) s = static_cast<Symbol>(rng() % 3);
    const auto r = rank_in_type_class(w, 3);
    EXPECT_LT(r, type_class_size(NType::of(w, 3)));
    EXPECT_EQ(unrank_in_type_class(NType::of(w, 3), r), w);
  }
}
