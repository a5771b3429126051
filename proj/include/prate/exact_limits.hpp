#ifndef PRATE_EXACT_LIMITS_HPP
#define PRATE_EXACT_LIMITS_HPP

// Exact fundamental limits of one-to-one coding of a memoryless source.
//
// The optimal one-to-one code lists A^n in decreasing probability and gives
// the k-th string (1-based) the codeword of length floor(log2 k). Strings of
// one type are equiprobable, so the length distribution is computed from
// type classes alone; only the class straddling each 2^L boundary is split.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <type_traits>
#include <vector>

#include "prate/distributions.hpp"
#include "prate/numeric.hpp"
#include "prate/type_order.hpp"
#include "prate/types_census.hpp"

namespace prate {

/// tail[L] = P(length >= L) for L = 0 .. max_length + 1 (the last entry is 0).
template <class Real>
struct BasicLengthDistribution {
  std::uint64_t n = 0;
  std::vector<Real> tail;

  Real at(std::size_t length) const { return length < tail.size() ? tail[length] : Real(0); }
  std::size_t max_length() const { return tail.size() - 2; }

  friend bool operator==(const BasicLengthDistribution&, const BasicLengthDistribution&) = default;
};

using LengthDistribution = BasicLengthDistribution<double>;
using ExactLengthDistribution = BasicLengthDistribution<Rational>;

namespace detail {

inline std::size_t floor_log2(const BigInt& x) {
  return mpz_sizeinbase(x.backend().data(), 2) - 1;
}

// Tail probabilities under an arbitrary type order. `mass(pos, count)`
// returns the probability of `count` strings of the class at `pos`.
template <class Real, class Mass>
BasicLengthDistribution<Real> tails_from_order(const TypeOrder& order, Mass&& mass) {
  const std::size_t k = order.size();
  std::vector<Real> suffix(k + 1, Real(0));  // suffix[j] = mass of classes j..k-1
  if constexpr (std::is_same_v<Real, double>) {
    CompensatedSum run;
    for (std::size_t j = k; j-- > 0;) {
      run.add(mass(j, order.class_size(j)));
      suffix[j] = run.value();
    }
  } else {
    for (std::size_t j = k; j-- > 0;) suffix[j] = suffix[j + 1] + mass(j, order.class_size(j));
  }

  const std::size_t max_len = floor_log2(order.total());
  BasicLengthDistribution<Real> d;
  d.n = order.n();
  d.tail.resize(max_len + 2, Real(0));
  for (std::size_t len = 0; len <= max_len; ++len) {
    // First 0-based index whose codeword has length >= len.
    const BigRank boundary = (BigRank(1) << len) - 1;
    const std::size_t j = order.locate(boundary);
    const BigRank in_class = order.offset(j) + order.class_size(j) - boundary;
    if constexpr (std::is_same_v<Real, double>) {
      CompensatedSum s;
      s.add(mass(j, in_class));
      s.add(suffix[j + 1]);
      d.tail[len] = len == 0 ? 1.0 : std::min(1.0, s.value());
    } else {
      d.tail[len] = mass(j, in_class) + suffix[j + 1];
    }
  }
  return d;
}

inline std::vector<double> per_string_log2_prob(const TypeOrder& order,
                                                std::span<const double> probs) {
  std::vector<double> log2p(probs.size());
  for (std::size_t a = 0; a < probs.size(); ++a) log2p[a] = std::log2(probs[a]);
  std::vector<double> out(order.size());
  for (std::size_t j = 0; j < order.size(); ++j) {
    const auto& c = order.type(j).counts;
    out[j] = compensated_sum(c.size(), [&](std::size_t a) { return c[a] == 0 ? 0.0 : c[a] * log2p[a]; });
  }
  return out;
}

}  // namespace detail

/// Length distribution of any type order, evaluated under source `p`.
inline LengthDistribution length_distribution_for_order(const TypeOrder& order, const SourcePmf& p) {
  if (order.m() != p.size()) throw InvalidInput("alphabet size mismatch");
  const auto lp = detail::per_string_log2_prob(order, p.probs());
  return detail::tails_from_order<double>(
      order, [&](std::size_t j, const BigRank& count) { return scaled_count(count, lp[j]); });
}

inline ExactLengthDistribution length_distribution_for_order(const TypeOrder& order,
                                                             std::span<const Rational> probs) {
  if (order.m() != probs.size()) throw InvalidInput("alphabet size mismatch");
  std::vector<Rational> ps(order.size());
  for (std::size_t j = 0; j < order.size(); ++j) {
    ps[j] = TypeOrder::string_probability(probs, order.type(j));
  }
  return detail::tails_from_order<Rational>(
      order, [&](std::size_t j, const BigRank& count) { return Rational(count) * ps[j]; });
}

/// Length distribution of the optimal one-to-one code for blocklength n.
inline LengthDistribution length_distribution(const SourcePmf& p, std::uint64_t n,
                                              double cap_types = kDefaultTypeCap) {
  return length_distribution_for_order(TypeOrder::known_source(p.probs(), n, cap_types), p);
}

/// Exact-rational version for rational source probabilities.
inline ExactLengthDistribution length_distribution(std::span<const Rational> probs, std::uint64_t n,
                                                   double cap_types = kDefaultTypeCap) {
  Rational total = 0;
  for (const auto& x : probs) {
    if (x <= 0) throw InvalidInput("source distribution must have full support");
    total += x;
  }
  if (total != 1) throw InvalidInput("probability vector does not sum to 1");
  return length_distribution_for_order(TypeOrder::known_source(probs, n, cap_types), probs);
}

/// log2 P(length >= L), for blocklengths where the tails underflow doubles.
/// Entries are -infinity where the probability is zero.
struct LogLengthDistribution {
  std::uint64_t n = 0;
  std::vector<double> log2_tail;

  double at(std::size_t length) const {
    return length < log2_tail.size() ? log2_tail[length] : -std::numeric_limits<double>::infinity();
  }
};

namespace detail {

inline double log2_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log2(1.0 + std::exp2(b - a));
}

}  // namespace detail

inline LogLengthDistribution log_length_distribution_for_order(const TypeOrder& order,
                                                               const SourcePmf& p) {
  if (order.m() != p.size()) throw InvalidInput("alphabet size mismatch");
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  const auto lp = detail::per_string_log2_prob(order, p.probs());
  auto log_mass = [&](std::size_t j, const BigRank& count) {
    return count == 0 ? kNegInf : log2_big(count) + lp[j];
  };
  const std::size_t k = order.size();
  std::vector<double> suffix(k + 1, kNegInf);
  for (std::size_t j = k; j-- > 0;) suffix[j] = detail::log2_add(suffix[j + 1], log_mass(j, order.class_size(j)));

  const std::size_t max_len = detail::floor_log2(order.total());
  LogLengthDistribution d;
  d.n = order.n();
  d.log2_tail.assign(max_len + 2, kNegInf);
  d.log2_tail[0] = 0.0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    const BigRank boundary = (BigRank(1) << len) - 1;
    const std::size_t j = order.locate(boundary);
    const BigRank in_class = order.offset(j) + order.class_size(j) - boundary;
    d.log2_tail[len] = std::min(0.0, detail::log2_add(log_mass(j, in_class), suffix[j + 1]));
  }
  return d;
}

inline LogLengthDistribution log_length_distribution(const SourcePmf& p, std::uint64_t n,
                                                     double cap_types = kDefaultTypeCap) {
  return log_length_distribution_for_order(TypeOrder::known_source(p.probs(), n, cap_types), p);
}

/// R_n*(2^{-n delta}, P) computed in the log domain.
inline double optimal_rate_for_delta(const LogLengthDistribution& d, double delta) {
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  const double target = -static_cast<double>(d.n) * delta;
  std::size_t ls = d.log2_tail.size() - 1;
  for (std::size_t len = 0; len < d.log2_tail.size(); ++len) {
    if (d.log2_tail[len] <= target) {
      ls = len;
      break;
    }
  }
  return (static_cast<double>(ls) - 1.0) / static_cast<double>(d.n);
}

/// Length threshold for rate R: the event length >= nR is length >= ceil(nR).
inline std::size_t rate_to_length(double rate, std::uint64_t n) {
  if (!(rate >= 0.0)) throw DomainError("rate must be nonnegative");
  const double nr = rate * static_cast<double>(n);
  const double nearest = std::round(nr);
  if (std::abs(nr - nearest) <= 1e-9 * std::max(1.0, nr)) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::ceil(nr));
}

/// eps_n*(R, P) = P(length of the optimal code >= nR).
inline double excess_rate_probability(const LengthDistribution& d, double rate) {
  return d.at(rate_to_length(rate, d.n));
}

inline double excess_rate_probability(const SourcePmf& p, std::uint64_t n, double rate,
                                      double cap_types = kDefaultTypeCap) {
  return excess_rate_probability(length_distribution(p, n, cap_types), rate);
}

/// L* = min { L : P(length >= L) <= eps }.
inline std::size_t optimal_length_threshold(const LengthDistribution& d, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("epsilon must lie in (0,1)");
  for (std::size_t len = 0; len < d.tail.size(); ++len) {
    if (d.tail[len] <= eps) return len;
  }
  return d.tail.size() - 1;
}

/// R_n*(eps, P) = (L* - 1) / n: the infimum of the rates R with
/// ceil(nR) >= L*.
inline double optimal_rate(const LengthDistribution& d, double eps) {
  const std::size_t ls = optimal_length_threshold(d, eps);
  return (static_cast<double>(ls) - 1.0) / static_cast<double>(d.n);
}

inline double optimal_rate(const SourcePmf& p, std::uint64_t n, double eps,
                           double cap_types = kDefaultTypeCap) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("epsilon must lie in (0,1)");
  return optimal_rate(length_distribution(p, n, cap_types), eps);
}

/// Prefix-free fundamental limit from the one-to-one limit (exactly + 1/n).
inline double optimal_prefix_rate(const LengthDistribution& d, double eps) {
  return optimal_rate(d, eps) + 1.0 / static_cast<double>(d.n);
}

// ---------------------------------------------------------------------------
// Brute-force reference: enumerate every string.

inline constexpr double kBruteForceMaxStrings = 2e6;
inline constexpr std::uint64_t kBruteForceMaxN = 12;

namespace detail {

inline std::uint64_t checked_power(std::size_t m, std::uint64_t n) {
  if (n > kBruteForceMaxN) throw ResourceLimit("brute_force_limits: n exceeds 12");
  double total = std::pow(static_cast<double>(m), static_cast<double>(n));
  if (total > kBruteForceMaxStrings) {
    throw ResourceLimit("brute_force_limits: m^n exceeds 2e6 strings");
  }
  return static_cast<std::uint64_t>(std::llround(total));
}

inline Word word_at(std::uint64_t code, std::size_t m, std::uint64_t n) {
  Word w(n);
  for (std::uint64_t i = n; i-- > 0;) {
    w[i] = static_cast<Symbol>(code % m);
    code /= m;
  }
  return w;
}

template <class Real>
BasicLengthDistribution<Real> brute_force_tails(std::span<const Real> probs, std::uint64_t n,
                                                std::vector<std::uint64_t>& order,
                                                const std::vector<Real>& prob) {
  const std::size_t m = probs.size();
  // Ties: ascending type counts, then the string itself (lexicographic).
  auto tie_less = [&](std::uint64_t a, std::uint64_t b) {
    const auto wa = word_at(a, m, n), wb = word_at(b, m, n);
    const auto ta = NType::of(wa, m), tb = NType::of(wb, m);
    if (ta != tb) return ta < tb;
    return a < b;
  };
  if constexpr (std::is_same_v<Real, double>) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint64_t a, std::uint64_t b) { return prob[a] > prob[b]; });
    // Floating point products of the same multiset may differ in the last
    // bits; regroup near-equal runs and apply the tie order inside each run.
    std::size_t start = 0;
    while (start < order.size()) {
      std::size_t end = start + 1;
      while (end < order.size() &&
             std::abs(prob[order[end]] - prob[order[start]]) <= 1e-12 * prob[order[start]]) {
        ++end;
      }
      std::sort(order.begin() + start, order.begin() + end, tie_less);
      start = end;
    }
  } else {
    std::sort(order.begin(), order.end(), [&](std::uint64_t a, std::uint64_t b) {
      if (prob[a] != prob[b]) return prob[a] > prob[b];
      return tie_less(a, b);
    });
  }

  const std::uint64_t total = order.size();
  std::size_t max_len = 0;
  while ((std::uint64_t{2} << max_len) <= total) ++max_len;
  BasicLengthDistribution<Real> d;
  d.n = n;
  d.tail.assign(max_len + 2, Real(0));
  std::vector<Real> bucket(max_len + 1, Real(0));  // mass at each exact length
  for (std::uint64_t k = 1; k <= total; ++k) {
    std::size_t len = 0;
    while ((std::uint64_t{2} << len) <= k) ++len;  // floor(log2 k)
    bucket[len] += prob[order[k - 1]];
  }
  for (std::size_t l = max_len + 1; l-- > 0;) d.tail[l] = d.tail[l + 1] + bucket[l];
  if constexpr (std::is_same_v<Real, double>) {
    for (auto& t : d.tail) t = std::min(1.0, t);
    d.tail[0] = 1.0;
  }
  return d;
}

}  // namespace detail

/// Length distribution of the probability-sorted code by enumerating all m^n
/// strings (n <= 12, m^n <= 2e6).
inline LengthDistribution brute_force_limits(const SourcePmf& p, std::uint64_t n) {
  const std::size_t m = p.size();
  const std::uint64_t total = detail::checked_power(m, n);
  std::vector<double> prob(total);
  for (std::uint64_t code = 0; code < total; ++code) {
    const Word w = detail::word_at(code, m, n);
    double lp = 0.0;
    for (Symbol s : w) lp += std::log2(p[s]);
    prob[code] = std::exp2(lp);
  }
  std::vector<std::uint64_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  return detail::brute_force_tails<double>(p.probs(), n, order, prob);
}

/// Exact-rational brute force.
inline ExactLengthDistribution brute_force_limits(std::span<const Rational> probs, std::uint64_t n) {
  const std::size_t m = probs.size();
  const std::uint64_t total = detail::checked_power(m, n);
  std::vector<Rational> prob(total);
  for (std::uint64_t code = 0; code < total; ++code) {
    const Word w = detail::word_at(code, m, n);
    Rational r = 1;
    for (Symbol s : w) r *= probs[s];
    prob[code] = r;
  }
  std::vector<std::uint64_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  return detail::brute_force_tails<Rational>(probs, n, order, prob);
}

}  // namespace prate

#endif  // PRATE_EXACT_LIMITS_HPP
