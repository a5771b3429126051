#ifndef PRATE_NUMERIC_HPP
#define PRATE_NUMERIC_HPP

#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>

#include "prate/errors.hpp"

namespace prate {

using BigInt = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

/// log2(e): converts nats to bits.
inline constexpr double kLog2E = std::numbers::log2e;
inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343818684759;

inline double nats_to_bits(double x) { return x * kLog2E; }
inline double bits_to_nats(double x) { return x * std::numbers::ln2; }

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

template <class Fn>
double compensated_sum(std::size_t count, Fn&& term) {
  CompensatedSum s;
  for (std::size_t i = 0; i < count; ++i) s.add(term(i));
  return s.value();
}

/// log2 of a nonnegative big integer; -inf for zero. Accurate to double precision.
inline double log2_big(const BigInt& x) {
  if (x <= 0) return -std::numeric_limits<double>::infinity();
  const std::size_t bits = mpz_sizeinbase(x.backend().data(), 2);
  if (bits <= 1000) return std::log2(x.convert_to<double>());
  const std::size_t shift = bits - 64;
  const BigInt top = x >> shift;
  return std::log2(top.convert_to<double>()) + static_cast<double>(shift);
}

/// count * 2^log2_weight evaluated without overflowing for huge counts.
inline double scaled_count(const BigInt& count, double log2_weight) {
  if (count <= 0) return 0.0;
  return std::exp2(log2_big(count) + log2_weight);
}

/// Standard normal upper-tail inverse Q^{-1}(eps) = Phi^{-1}(1 - eps).
///
/// Rational approximation (Acklam) followed by one Halley step against erfc,
/// which brings the absolute error well below 1e-12 on [1e-300, 1 - 1e-16].
inline double normal_upper_quantile(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw DomainError("normal_upper_quantile: eps must lie in (0,1)");
  }
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  // Lower-tail quantile x = Phi^{-1}(eps); the answer is -x.
  const double p = eps;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement. Work on the tail that is small to avoid cancellation.
  if (x <= 0.0) {
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
  } else {
    // Upper tail: 1 - Phi(x) = eps' where eps' = 1 - p.
    const double e = 0.5 * std::erfc(x / std::numbers::sqrt2) - (1.0 - p);
    const double u = -e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
  }
  return -x;
}

/// Standard normal upper tail Q(x) = 1 - Phi(x).
inline double normal_upper_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

}  // namespace prate

#endif  // PRATE_NUMERIC_HPP
