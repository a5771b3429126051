#ifndef PRATE_TYPE_ORDER_HPP
#define PRATE_TYPE_ORDER_HPP

// Total orders on the n-types of an m-ary alphabet and the induced
// enumeration of A^n (type order first, lexicographic inside a class).
//
//   known source: descending per-string probability prod_a P(a)^{c_a}
//   universal:    ascending empirical entropy
//
// Both break ties by ascending lexicographic count vector. Near-ties in
// floating point are settled with exact big-integer arithmetic so the
// order is a genuine strict weak ordering and identical on every run.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prate/errors.hpp"
#include "prate/numeric.hpp"
#include "prate/types_census.hpp"

namespace prate {

inline constexpr double kDefaultTypeCap = 1e7;

enum class OrderKind { known_source, universal };

class TypeOrder {
 public:
  OrderKind kind() const { return kind_; }
  std::uint64_t n() const { return n_; }
  std::size_t m() const { return m_; }

  std::size_t size() const { return types_.size(); }
  const NType& type(std::size_t pos) const { return types_[pos]; }
  const std::vector<NType>& types() const { return types_; }
  const BigRank& class_size(std::size_t pos) const { return sizes_[pos]; }
  /// 0-based index of the first string of the class at `pos`.
  const BigRank& offset(std::size_t pos) const { return offsets_[pos]; }
  /// m^n.
  const BigRank& total() const { return offsets_.back(); }

  std::size_t position_of(const NType& t) const {
    auto it = position_.find(t.counts);
    if (it == position_.end()) throw InvalidInput("type does not belong to this ordering");
    return it->second;
  }

  /// Position of the class containing 0-based string index `index`.
  std::size_t locate(const BigRank& index) const {
    if (index < 0 || index >= total()) throw DomainError("string index out of range");
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), index);
    return static_cast<std::size_t>(it - offsets_.begin()) - 1;
  }

  /// Orders types by descending per-string probability under `probs`.
  static TypeOrder known_source(std::span<const double> probs, std::uint64_t n,
                                double cap = kDefaultTypeCap) {
    TypeOrder o(OrderKind::known_source, n, probs.size(), cap);
    std::vector<double> log2p(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) log2p[i] = std::log2(probs[i]);
    std::vector<double> key(o.types_.size());
    for (std::size_t i = 0; i < key.size(); ++i) {
      key[i] = compensated_sum(log2p.size(), [&](std::size_t a) {
        return o.types_[i].counts[a] == 0 ? 0.0 : o.types_[i].counts[a] * log2p[a];
      });
    }
    ExactBinaryProducts exact(probs);
    o.sort_by([&](std::size_t a, std::size_t b) -> int {
      if (!near(key[a], key[b])) return key[a] > key[b] ? -1 : 1;
      return -exact.compare(o.types_[a], o.types_[b]);
    });
    return o;
  }

  /// Same order computed with exact rational probabilities.
  static TypeOrder known_source(std::span<const Rational> probs, std::uint64_t n,
                                double cap = kDefaultTypeCap) {
    TypeOrder o(OrderKind::known_source, n, probs.size(), cap);
    std::vector<Rational> prob(o.types_.size());
    for (std::size_t i = 0; i < prob.size(); ++i) prob[i] = string_probability(probs, o.types_[i]);
    o.sort_by([&](std::size_t a, std::size_t b) -> int {
      if (prob[a] == prob[b]) return 0;
      return prob[a] > prob[b] ? -1 : 1;
    });
    return o;
  }

  /// Orders types by ascending empirical entropy; independent of any source.
  static TypeOrder universal(std::uint64_t n, std::size_t m, double cap = kDefaultTypeCap) {
    TypeOrder o(OrderKind::universal, n, m, cap);
    std::vector<double> key(o.types_.size());
    for (std::size_t i = 0; i < key.size(); ++i) key[i] = sum_c_log_c(o.types_[i]);
    std::vector<std::optional<BigInt>> power_products(o.types_.size());
    auto exact = [&](std::size_t i) -> const BigInt& {
      if (!power_products[i]) {
        BigInt v = 1, pk;
        for (auto c : o.types_[i].counts) {
          if (c < 2) continue;
          mpz_ui_pow_ui(pk.backend().data(), c, c);
          v *= pk;
        }
        power_products[i] = std::move(v);
      }
      return *power_products[i];
    };
    o.sort_by([&](std::size_t a, std::size_t b) -> int {
      // Larger sum c log c means lower entropy.
      if (!near(key[a], key[b])) return key[a] > key[b] ? -1 : 1;
      if (same_multiset(o.types_[a], o.types_[b])) return 0;
      const int cmp = exact(a).compare(exact(b));
      return cmp > 0 ? -1 : (cmp < 0 ? 1 : 0);
    });
    return o;
  }

  /// Exact per-string probability prod_a P(a)^{c_a}.
  static Rational string_probability(std::span<const Rational> probs, const NType& t) {
    Rational r = 1;
    for (std::size_t a = 0; a < probs.size(); ++a) {
      for (std::uint32_t k = 0; k < t.counts[a]; ++k) r *= probs[a];
    }
    return r;
  }

 private:
  TypeOrder(OrderKind kind, std::uint64_t n, std::size_t m, double cap)
      : kind_(kind), n_(n), m_(m) {
    if (n < 1 || m < 2) throw InvalidInput("ordering needs n >= 1 and m >= 2");
    const BigInt count = type_count(n, m);
    if (count > BigInt(static_cast<std::uint64_t>(cap))) {
      throw ResourceLimit("number of types C(n+m-1, m-1) = " + count.str() +
                          " exceeds the cap of " + std::to_string(static_cast<std::uint64_t>(cap)) +
                          " (n = " + std::to_string(n) + ")");
    }
    types_ = enumerate_types(n, m);
  }

  static bool near(double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
  }

  static bool same_multiset(const NType& a, const NType& b) {
    auto x = a.counts, y = b.counts;
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    return x == y;
  }

  // Exact comparison of prod_a P(a)^{c_a} for IEEE doubles P(a), written as
  // integer mantissa times a power of two.
  class ExactBinaryProducts {
   public:
    explicit ExactBinaryProducts(std::span<const double> probs) {
      for (double p : probs) {
        int e = 0;
        const double f = std::frexp(p, &e);
        mantissa_.push_back(static_cast<std::uint64_t>(std::ldexp(f, 53)));
        exponent_.push_back(e - 53);
      }
    }
    int compare(const NType& a, const NType& b) const {
      auto [ma, ea] = product(a);
      auto [mb, eb] = product(b);
      if (ea >= eb) {
        ma <<= static_cast<unsigned>(ea - eb);
      } else {
        mb <<= static_cast<unsigned>(eb - ea);
      }
      const int c = ma.compare(mb);
      return c > 0 ? 1 : (c < 0 ? -1 : 0);
    }

   private:
    std::pair<BigInt, std::int64_t> product(const NType& t) const {
      BigInt v = 1, pk;
      std::int64_t e = 0;
      for (std::size_t i = 0; i < mantissa_.size(); ++i) {
        if (t.counts[i] == 0) continue;
        mpz_ui_pow_ui(pk.backend().data(), mantissa_[i], t.counts[i]);
        v *= pk;
        e += static_cast<std::int64_t>(t.counts[i]) * exponent_[i];
      }
      return {std::move(v), e};
    }
    std::vector<std::uint64_t> mantissa_;
    std::vector<std::int64_t> exponent_;
  };

  // |T(to)| from |T(from)| when `to` moves one unit of count from symbol a
  // to symbol b: |T(to)| = |T(from)| c_a / (c_b + 1). Falls back to the
  // multinomial otherwise.
  static BigRank next_class_size(const NType& from, const BigRank& from_size, const NType& to) {
    std::size_t a = from.counts.size(), b = a, diffs = 0;
    for (std::size_t i = 0; i < from.counts.size(); ++i) {
      const auto x = from.counts[i], y = to.counts[i];
      if (x == y) continue;
      if (++diffs > 2) break;
      if (x == y + 1) a = i;
      else if (y == x + 1) b = i;
    }
    if (diffs != 2 || a == from.counts.size() || b == from.counts.size()) return type_class_size(to);
    BigRank r = from_size * from.counts[a];
    mpz_divexact_ui(r.backend().data(), r.backend().data(), from.counts[b] + 1);
    return r;
  }

  // cmp(a, b) < 0 means a precedes b; 0 falls back to lexicographic counts.
  template <class Cmp>
  void sort_by(Cmp&& cmp) {
    std::vector<std::size_t> idx(types_.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      const int c = cmp(a, b);
      if (c != 0) return c < 0;
      return types_[a] < types_[b];
    });
    std::vector<NType> sorted;
    sorted.reserve(idx.size());
    for (auto i : idx) sorted.push_back(std::move(types_[i]));
    types_ = std::move(sorted);

    sizes_.clear();
    offsets_.assign(1, BigRank(0));
    for (std::size_t i = 0; i < types_.size(); ++i) {
      sizes_.push_back(i > 0 ? next_class_size(types_[i - 1], sizes_.back(), types_[i])
                             : type_class_size(types_[i]));
      offsets_.push_back(offsets_.back() + sizes_.back());
      position_.emplace(types_[i].counts, i);
    }
  }

  OrderKind kind_;
  std::uint64_t n_;
  std::size_t m_;
  std::vector<NType> types_;
  std::vector<BigRank> sizes_;
  std::vector<BigRank> offsets_;  // size() + 1 entries; back() == m^n
  std::map<std::vector<std::uint32_t>, std::size_t> position_;
};

}  // namespace prate

#endif  // PRATE_TYPE_ORDER_HPP
