#ifndef PRATE_TYPES_CENSUS_HPP
#define PRATE_TYPES_CENSUS_HPP

// Method-of-types utilities: n-types, exact type-class sizes, rank/unrank of
// strings inside a type class, and exact counts of low-empirical-entropy
// strings.
//
// Types are always enumerated in ascending lexicographic order of their count
// vectors (c_0, ..., c_{m-1}); the codecs and exact-limit computations use
// the same order to break ties.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <type_traits>
#include <span>
#include <vector>

#include "prate/distributions.hpp"
#include "prate/numeric.hpp"

namespace prate {

using BigRank = BigInt;
using Symbol = std::uint32_t;
using Word = std::vector<Symbol>;

/// Slack used when comparing an empirical entropy with a threshold.
inline constexpr double kEntropyTieTolerance = 1e-12;

/// Composition of n into m nonnegative parts: the type of a length-n string.
struct NType {
  std::vector<std::uint32_t> counts;

  std::size_t alphabet_size() const { return counts.size(); }
  std::uint64_t n() const {
    std::uint64_t s = 0;
    for (auto c : counts) s += c;
    return s;
  }
  std::size_t support_size() const {
    return static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(),
                                                  [](auto c) { return c > 0; }));
  }
  std::vector<double> frequencies() const {
    const double nn = static_cast<double>(n());
    std::vector<double> f(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) f[i] = counts[i] / nn;
    return f;
  }

  static NType of(std::span<const Symbol> word, std::size_t m) {
    NType t{std::vector<std::uint32_t>(m, 0)};
    for (Symbol s : word) {
      if (s >= m) throw InvalidInput("symbol outside the alphabet");
      ++t.counts[s];
    }
    return t;
  }

  friend bool operator==(const NType&, const NType&) = default;
  friend auto operator<=>(const NType& a, const NType& b) { return a.counts <=> b.counts; }
};

/// sum_a c_a log2 c_a over the counts, summed in sorted order so that types
/// that are permutations of one another give bit-identical results.
inline double sum_c_log_c(const NType& t) {
  std::vector<std::uint32_t> c = t.counts;
  std::sort(c.begin(), c.end());
  CompensatedSum s;
  for (auto k : c) {
    if (k > 1) s.add(k * std::log2(static_cast<double>(k)));
  }
  return s.value();
}

/// Empirical entropy of the type in bits; permutation invariant bit for bit.
inline double type_entropy(const NType& t) {
  const std::uint64_t n = t.n();
  if (n == 0) throw InvalidInput("type_entropy: empty type");
  const double nn = static_cast<double>(n);
  return std::max(0.0, std::log2(nn) - sum_c_log_c(t) / nn);
}

/// Number of n-types over an alphabet of size m: C(n+m-1, m-1).
inline BigInt type_count(std::uint64_t n, std::size_t m) {
  BigInt r;
  mpz_bin_uiui(r.backend().data(), n + m - 1, m - 1);
  return r;
}

/// Visits every n-type in ascending lexicographic order. The visitor may
/// return false to stop early.
template <class Visitor>
void for_each_type(std::uint64_t n, std::size_t m, Visitor&& visit) {
  if (m < 1) throw InvalidInput("alphabet size must be positive");
  NType t{std::vector<std::uint32_t>(m, 0)};
  t.counts[m - 1] = static_cast<std::uint32_t>(n);
  for (;;) {
    if constexpr (std::is_same_v<std::invoke_result_t<Visitor&, const NType&>, bool>) {
      if (!visit(static_cast<const NType&>(t))) return;
    } else {
      visit(static_cast<const NType&>(t));
    }
    // Rightmost i < m-1 whose suffix still holds mass; bump it and push the
    // remainder to the last slot.
    std::uint64_t tail = t.counts[m - 1];
    std::size_t i = m - 1;
    for (;;) {
      if (i == 0) return;
      --i;
      if (tail > 0) break;
      tail += t.counts[i];
    }
    ++t.counts[i];
    --tail;
    for (std::size_t j = i + 1; j + 1 < m; ++j) t.counts[j] = 0;
    t.counts[m - 1] = static_cast<std::uint32_t>(tail);
  }
}

inline std::vector<NType> enumerate_types(std::uint64_t n, std::size_t m) {
  if (n < 1 || m < 2) throw InvalidInput("enumerate_types: need n >= 1 and m >= 2");
  std::vector<NType> out;
  for_each_type(n, m, [&](const NType& t) { out.push_back(t); });
  return out;
}

/// |T(t)| = n! / prod_a c_a!.
inline BigRank type_class_size(const NType& t) {
  BigRank result = 1;
  std::uint64_t partial = 0;
  BigInt b;
  for (auto c : t.counts) {
    partial += c;
    if (c == 0) continue;
    mpz_bin_uiui(b.backend().data(), partial, c);
    result *= b;
  }
  return result;
}

/// log2 |T(t)| via log-gamma.
inline double log2_type_class_size(const NType& t) {
  double s = std::lgamma(static_cast<double>(t.n()) + 1.0);
  for (auto c : t.counts) s -= std::lgamma(static_cast<double>(c) + 1.0);
  return s * kLog2E;
}

/// |T(t)| divided by 2^{nH} n^{-(k-1)/2} prod_a P(a)^{-1/2}, where P is the
/// type itself and k its alphabet size. Requires full support.
inline double stirling_ratio(const NType& t) {
  for (auto c : t.counts) {
    if (c == 0) throw DomainError("stirling_ratio: type must have full support");
  }
  const double nn = static_cast<double>(t.n());
  const double k = static_cast<double>(t.counts.size());
  double log2_rhs = nn * type_entropy(t) - 0.5 * (k - 1.0) * std::log2(nn);
  for (auto c : t.counts) log2_rhs -= 0.5 * std::log2(c / nn);
  return std::exp2(log2_type_class_size(t) - log2_rhs);
}

/// Number of n-types with entropy in [h - 1/n, h].
inline std::uint64_t entropy_slab_count(std::uint64_t n, std::size_t m, double h) {
  const double lo = h - 1.0 / static_cast<double>(n);
  std::uint64_t count = 0;
  for_each_type(n, m, [&](const NType& t) {
    const double e = type_entropy(t);
    if (e >= lo - kEntropyTieTolerance && e <= h + kEntropyTieTolerance) ++count;
  });
  return count;
}

/// |B_n| = #{x in A^n : H(type(x)) <= h} with its normalised size.
struct CensusReport {
  std::uint64_t n = 0;
  std::size_t m = 0;
  double threshold_bits = 0.0;
  BigRank count = 0;
  double log2_count = 0.0;   // from summed log-multinomials
  double theta_ratio = 0.0;  // count / (n^{(m-3)/2} 2^{n h})
};

inline CensusReport low_entropy_count(std::uint64_t n, std::size_t m, double h) {
  if (n < 1 || m < 2) throw InvalidInput("low_entropy_count: need n >= 1 and m >= 2");
  CensusReport rep{n, m, h};
  // log-sum-exp over the contributing log-multinomials.
  std::vector<double> logs;
  for_each_type(n, m, [&](const NType& t) {
    if (type_entropy(t) <= h + kEntropyTieTolerance) {
      rep.count += type_class_size(t);
      logs.push_back(log2_type_class_size(t));
    }
  });
  if (logs.empty()) {
    rep.log2_count = -std::numeric_limits<double>::infinity();
    rep.theta_ratio = 0.0;
    return rep;
  }
  const double top = *std::max_element(logs.begin(), logs.end());
  const double rest = compensated_sum(logs.size(), [&](std::size_t i) {
    return std::exp2(logs[i] - top);
  });
  rep.log2_count = top + std::log2(rest);
  const double nn = static_cast<double>(n);
  rep.theta_ratio =
      std::exp2(rep.log2_count - 0.5 * (static_cast<double>(m) - 3.0) * std::log2(nn) - nn * h);
  return rep;
}

/// Lexicographic rank of `word` among all strings with the same type.
inline BigRank rank_in_type_class(std::span<const Symbol> word, std::size_t m) {
  NType remaining = NType::of(word, m);
  BigRank block = type_class_size(remaining);  // strings consistent with the prefix so far
  BigRank rank = 0;
  std::uint64_t left = word.size();
  for (Symbol x : word) {
    for (Symbol s = 0; s < x; ++s) {
      if (remaining.counts[s] == 0) continue;
      rank += block * remaining.counts[s] / left;
    }
    block = block * remaining.counts[x] / left;
    --remaining.counts[x];
    --left;
  }
  return rank;
}

/// Inverse of rank_in_type_class.
inline Word unrank_in_type_class(const NType& t, const BigRank& rank) {
  BigRank block = type_class_size(t);
  if (rank < 0 || rank >= block) throw DomainError("unrank_in_type_class: rank out of range");
  NType remaining = t;
  BigRank r = rank;
  std::uint64_t left = t.n();
  Word word;
  word.reserve(left);
  while (left > 0) {
    for (Symbol s = 0; s < remaining.counts.size(); ++s) {
      if (remaining.counts[s] == 0) continue;
      const BigRank sub = block * remaining.counts[s] / left;
      if (r < sub) {
        word.push_back(s);
        block = sub;
        --remaining.counts[s];
        break;
      }
      r -= sub;
    }
    --left;
  }
  return word;
}

}  // namespace prate

#endif  // PRATE_TYPES_CENSUS_HPP
