#ifndef PRATE_CODECS_HPP
#define PRATE_CODECS_HPP

// One-to-one block codes built from a total order on A^n: the string with
// 1-based index k is sent as the binary expansion of k without its leading
// 1, so lengths are floor(log2 k) and index 1 gets the empty codeword.
//
// Two orders are provided: decreasing probability under a known source, and
// increasing empirical entropy (universal, source independent).

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prate/approximations.hpp"
#include "prate/exact_limits.hpp"
#include "prate/exponents.hpp"
#include "prate/type_order.hpp"
#include "prate/types_census.hpp"

namespace prate {

struct Codeword {
  std::vector<bool> bits;

  std::size_t length() const { return bits.size(); }

  std::string to_string() const {
    std::string s;
    s.reserve(bits.size());
    for (bool b : bits) s.push_back(b ? '1' : '0');
    return s;
  }

  static Codeword from_string(std::string_view s) {
    Codeword c;
    c.bits.reserve(s.size());
    for (char ch : s) {
      if (ch != '0' && ch != '1') throw InvalidInput("codeword must consist of '0' and '1'");
      c.bits.push_back(ch == '1');
    }
    return c;
  }

  /// 1-based index k: binary(k) = "1" + bits.
  BigRank index() const {
    BigRank k = 1;
    for (bool b : bits) {
      k <<= 1;
      if (b) k += 1;
    }
    return k;
  }

  static Codeword for_index(const BigRank& k) {
    if (k < 1) throw DomainError("codeword index must be at least 1");
    const std::size_t len = mpz_sizeinbase(k.backend().data(), 2) - 1;
    Codeword c;
    c.bits.resize(len);
    for (std::size_t i = 0; i < len; ++i) {
      c.bits[i] = mpz_tstbit(k.backend().data(), len - 1 - i) != 0;
    }
    return c;
  }

  friend bool operator==(const Codeword&, const Codeword&) = default;
};

enum class CodeMode { known_source, universal };

/// Shared encoder/decoder state; derived from (mode, source, n, m) alone.
class CodeOrdering {
 public:
  static CodeOrdering known_source(const SourcePmf& p, std::uint64_t n,
                                   double cap_types = kDefaultTypeCap) {
    return CodeOrdering(CodeMode::known_source, p, TypeOrder::known_source(p.probs(), n, cap_types));
  }

  static CodeOrdering universal(std::uint64_t n, std::size_t m, double cap_types = kDefaultTypeCap) {
    return CodeOrdering(CodeMode::universal, std::nullopt, TypeOrder::universal(n, m, cap_types));
  }

  /// Builds the ordering for `mode`; the source is ignored in universal mode.
  static CodeOrdering make(CodeMode mode, const std::optional<SourcePmf>& p, std::uint64_t n,
                           std::size_t m, double cap_types = kDefaultTypeCap) {
    if (mode == CodeMode::universal) return universal(n, m, cap_types);
    if (!p) throw InvalidInput("known-source mode requires a source distribution");
    if (p->size() != m) throw InvalidInput("source alphabet size does not match m");
    return known_source(*p, n, cap_types);
  }

  CodeMode mode() const { return mode_; }
  const std::optional<SourcePmf>& source() const { return source_; }
  std::uint64_t n() const { return order_.n(); }
  std::size_t m() const { return order_.m(); }
  const TypeOrder& type_order() const { return order_; }

  /// 1-based index of `word` in the ordering.
  BigRank index_of(std::span<const Symbol> word) const {
    if (word.size() != n()) throw InvalidInput("word length differs from the blocklength");
    const NType t = NType::of(word, m());
    const std::size_t pos = order_.position_of(t);
    return 1 + order_.offset(pos) + rank_in_type_class(word, m());
  }

  Word word_at(const BigRank& index) const {
    if (index < 1 || index > order_.total()) {
      throw InvalidInput("codeword index " + index.str() + " exceeds m^n = " + order_.total().str());
    }
    const BigRank zero_based = index - 1;
    const std::size_t pos = order_.locate(zero_based);
    return unrank_in_type_class(order_.type(pos), zero_based - order_.offset(pos));
  }

  Codeword encode(std::span<const Symbol> word) const { return Codeword::for_index(index_of(word)); }
  Word decode(const Codeword& c) const { return word_at(c.index()); }

 private:
  CodeOrdering(CodeMode mode, std::optional<SourcePmf> p, TypeOrder order)
      : mode_(mode), source_(std::move(p)), order_(std::move(order)) {}

  CodeMode mode_;
  std::optional<SourcePmf> source_;
  TypeOrder order_;
};

/// Length distribution of the universal code under source p.
inline LengthDistribution universal_length_distribution(const SourcePmf& p, std::uint64_t n,
                                                        double cap_types = kDefaultTypeCap) {
  return length_distribution_for_order(TypeOrder::universal(n, p.size(), cap_types), p);
}

/// P_P(index(X^n) >= 2^L) under the universal ordering.
inline double universal_excess_probability(const SourcePmf& p, std::uint64_t n, std::size_t length,
                                           double cap_types = kDefaultTypeCap) {
  return universal_length_distribution(p, n, cap_types).at(length);
}

/// The threshold sequence alpha_n behind the universal code's guarantee,
///   alpha_n = alpha* + log2(n) / (2 p_bar (1 - alpha*) n) - (q_bar + r_bar) / (p_bar n),
/// and the resulting set E_n = {x : H(type(x)) <= H(P_{alpha_n})}.
struct UniversalThreshold {
  double alpha_star = 0.0;
  double alpha_n = 0.0;
  double p_bar = 0.0, q_bar = 0.0, r_bar = 0.0;
  bool in_range = false;  // alpha_n lies in [alpha*, 1)
  std::optional<double> threshold_entropy;  // H(P_{alpha_n}) when alpha_n is in (0, 1]
  std::optional<BigRank> e_n_size;          // |E_n|
  std::optional<double> realized_rate;      // (log2 |E_n| + 1) / n
};

inline UniversalThreshold universal_threshold_alpha_n(const SourcePmf& p, double delta,
                                                      std::uint64_t n,
                                                      const EnvelopeOptions& env_opt = {},
                                                      bool count_strings = true) {
  if (n < 1) throw DomainError("universal_threshold_alpha_n: n must be positive");
  const auto sol = solve_alpha_star(p, delta);
  const double a = sol.alpha_star;
  const auto env = moment_envelope(p, env_opt);
  const auto& t = sol.tilted;

  UniversalThreshold u;
  u.alpha_star = a;
  u.p_bar = t.sigma3_sq * kLog2E;
  u.q_bar = 0.5 * kLog2E *
            (std::abs(env.sigma3_inf_sq - (1.0 - a) * env.rho3_sup) + env.sigma3_sup_sq + env.rho3_sup);
  u.r_bar = detail::berry_esseen_log_factor(t.sigma2_sq, t.rho2) / (1.0 - a);

  const double nn = static_cast<double>(n);
  u.alpha_n = a + std::log2(nn) / (2.0 * u.p_bar * (1.0 - a) * nn) - (u.q_bar + u.r_bar) / (u.p_bar * nn);
  u.in_range = u.alpha_n >= a && u.alpha_n < 1.0;

  if (u.alpha_n > 0.0 && u.alpha_n <= 1.0) {
    u.threshold_entropy = entropy(tilt(p, u.alpha_n).pmf);
    if (count_strings) {
      const auto census = low_entropy_count(n, p.size(), *u.threshold_entropy);
      u.e_n_size = census.count;
      u.realized_rate = (log2_big(census.count) + 1.0) / nn;
    }
  }
  return u;
}

}  // namespace prate

#endif  // PRATE_CODECS_HPP
