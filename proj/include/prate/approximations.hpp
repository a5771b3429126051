#ifndef PRATE_APPROXIMATIONS_HPP
#define PRATE_APPROXIMATIONS_HPP

// Rate approximations for R_n*(eps, P) and the explicit constants of the
// finite-n achievability/converse bounds in the exponentially small
// excess-rate-probability regime.

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>

#include "prate/distributions.hpp"
#include "prate/exponents.hpp"

namespace prate {

/// delta = log2(1/eps) / n.
inline double epsilon_to_delta(double eps, std::uint64_t n) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("epsilon must lie in (0,1)");
  if (n == 0) throw DomainError("blocklength must be positive");
  return -std::log2(eps) / static_cast<double>(n);
}

inline double delta_to_epsilon(double delta, std::uint64_t n) {
  return std::exp2(-static_cast<double>(n) * delta);
}

/// sigma(P) = sqrt(Var(-log2 P(X))), in bits.
inline double dispersion_bits(const SourcePmf& p) {
  std::vector<double> info(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) info[i] = -std::log2(p[i]);
  return std::sqrt(central_moments(p.probs(), info).variance);
}

inline double shannon_rate(const SourcePmf& p) { return entropy(p); }

/// H(P) + sigma(P) Q^{-1}(eps) / sqrt(n) - log2(n) / (2n).
inline double strassen_rate(const SourcePmf& p, std::uint64_t n, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("strassen_rate: eps must lie in (0,1)");
  if (n == 0) throw DomainError("strassen_rate: n must be positive");
  const double nn = static_cast<double>(n);
  return entropy(p) + dispersion_bits(p) * normal_upper_quantile(eps) / std::sqrt(nn) -
         std::log2(nn) / (2.0 * nn);
}

namespace detail {

inline AlphaStarSolution alpha_star_for_epsilon(const SourcePmf& p, std::uint64_t n, double eps) {
  const double delta = epsilon_to_delta(eps, n);
  const auto range = delta_range(p);
  if (!range || !range->contains(delta)) {
    std::ostringstream os;
    os.precision(9);
    os << "delta = log2(1/eps)/n = " << delta << " out of range";
    if (range) {
      os << "; admissible epsilon for n = " << n << " is (" << delta_to_epsilon(range->upper, n)
         << ", 1)";
    } else {
      os << "; the source is uniform so no epsilon is admissible";
    }
    throw DomainError(os.str());
  }
  return solve_alpha_star(p, delta);
}

inline double pragmatic_correction(std::uint64_t n, double alpha_star) {
  const double nn = static_cast<double>(n);
  return std::log2(nn) / (2.0 * nn * (1.0 - alpha_star));
}

// log2[(1/sigma)(1/sqrt(2 pi) + rho/sigma^2)], the Berry-Esseen factor.
inline double berry_esseen_log_factor(double sigma_sq, double rho) {
  const double sigma = std::sqrt(sigma_sq);
  return std::log2((kInvSqrt2Pi + rho / sigma_sq) / sigma);
}

}  // namespace detail

/// H(P_alpha*) with delta = log2(1/eps)/n.
inline double blahut_rate(const SourcePmf& p, std::uint64_t n, double eps) {
  return detail::alpha_star_for_epsilon(p, n, eps).h_tilted;
}

/// H(P_alpha*) - log2(n) / (2 n (1 - alpha*)).
inline double pragmatic_rate(const SourcePmf& p, std::uint64_t n, double eps) {
  const auto sol = detail::alpha_star_for_epsilon(p, n, eps);
  return sol.h_tilted - detail::pragmatic_correction(n, sol.alpha_star);
}

/// Same as pragmatic_rate with the exponent given directly.
inline double pragmatic_rate_for_delta(const SourcePmf& p, std::uint64_t n, double delta) {
  const auto sol = solve_alpha_star(p, delta);
  return sol.h_tilted - detail::pragmatic_correction(n, sol.alpha_star);
}

/// Constant c of the achievability bound
///   R_n*(2^{-n delta}, P) <= H(P_a*) - log2(n)/(2n(1-a*)) + c/n,  n >= 1.
inline double achievability_constant(const SourcePmf& p, double delta) {
  const auto sol = solve_alpha_star(p, delta);
  const auto& t = sol.tilted;
  const double a = sol.alpha_star;
  return detail::berry_esseen_log_factor(t.sigma1_sq, t.rho1) +
         a / (1.0 - a) * detail::berry_esseen_log_factor(t.sigma2_sq, t.rho2);
}

/// Constants of the converse bound
///   R_n*(2^{-n delta}, P) >= H(P_a*) - log2(n)/(2n(1-a*)) - C/n,  n > N0.
struct ConverseConstants {
  double alpha_star = 0.0;
  double sigma3_sq = 0.0;  // at alpha*, nats^2
  MomentEnvelope envelope;
  double p = 0.0, q = 0.0, r = 0.0;
  double N1 = 0.0, N2 = 0.0;
  double N0 = 0.0;
  double C = 0.0;
  double achievability_c = 0.0;
  // Individual terms of the max defining N0, in order.
  double n0_berry_esseen = 0.0, n0_quadratic = 0.0, n0_alpha_bound = 0.0;
};

namespace detail {

// Smallest integer n >= start with g(n) >= 0, where g is decreasing then
// increasing (a concave-up barrier like p*sqrt(n) - log2 n). turn is the
// real minimiser of g.
template <class Fn>
double first_nonnegative(Fn&& g, double start, double turn) {
  if (g(start) >= 0.0) return start;
  // g < 0 on [start, turn] since it decreases there from a negative value.
  double lo = std::max(start, std::floor(turn));
  if (g(lo) >= 0.0) return lo;
  double hi = std::max(lo + 1.0, 2.0 * lo);
  while (g(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw InvariantViolation("threshold search diverged");
  }
  // g(lo) < 0 <= g(hi), g increasing on [lo, hi].
  while (hi - lo > 1.0) {
    const double mid = std::floor(0.5 * (lo + hi));
    if (g(mid) >= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace detail

inline ConverseConstants converse_constants(const SourcePmf& p, double delta,
                                            const EnvelopeOptions& env_opt = {}) {
  const auto sol = solve_alpha_star(p, delta);
  const double a = sol.alpha_star;
  ConverseConstants k;
  k.alpha_star = a;
  k.sigma3_sq = sol.tilted.sigma3_sq;
  k.envelope = moment_envelope(p, env_opt);
  k.achievability_c = achievability_constant(p, delta);

  const double s3 = k.sigma3_sq;
  const double s_inf = k.envelope.sigma3_inf_sq;
  const double s_sup = k.envelope.sigma3_sup_sq;
  const double r_sup = k.envelope.rho3_sup;
  const double ratio = r_sup / std::pow(s_inf, 1.5) + 1.0;

  k.p = kLog2E * (1.0 - a) * s3;
  k.q = 0.5 * kLog2E * (s_sup + r_sup);
  k.r = 19.0 * kLog2E * (1.0 - a) * ratio * std::sqrt(s3 + r_sup);

  const double pp = k.p;
  const double ln2 = std::numbers::ln2;
  k.N1 = detail::first_nonnegative(
      [&](double n) { return pp * std::sqrt(n) - std::log2(n); }, 8.0,
      std::pow(2.0 / (pp * ln2), 2.0));
  const double slope = pp * (1.0 - a);
  k.N2 = detail::first_nonnegative([&](double n) { return slope * n - std::log2(n); }, 3.0,
                                   1.0 / (slope * ln2));

  const double one_qr = 1.0 + k.q + k.r;
  k.n0_berry_esseen = 4.4 * ratio * ratio;
  k.n0_quadratic = 4.0 * one_qr * one_qr / (pp * pp);
  k.n0_alpha_bound = 2.0 * one_qr / (pp * (1.0 - a));
  k.N0 = std::max({k.n0_berry_esseen, k.n0_quadratic, k.n0_alpha_bound, k.N1, k.N2});

  k.C = one_qr / (1.0 - a) + 0.5 * kLog2E * std::abs(s_inf - (1.0 - a) * r_sup) +
        0.5 * kLog2E * (s_sup + r_sup) + 1.0;
  return k;
}

/// Leading terms of the universal rate:
///   H(P_a*) + ((m-2)/2 - 1/(2(1-a*))) log2(n)/n  (+ an O(1/n) term whose
/// constant is not quantified).
struct UniversalRateBound {
  double rate = 0.0;
  double log_n_coefficient = 0.0;
  bool residual_quantified = false;
};

inline UniversalRateBound universal_rate_bound(const SourcePmf& p, std::uint64_t n, double delta) {
  if (n == 0) throw DomainError("universal_rate_bound: n must be positive");
  const auto sol = solve_alpha_star(p, delta);
  const double m = static_cast<double>(p.size());
  const double nn = static_cast<double>(n);
  UniversalRateBound b;
  b.log_n_coefficient = (m - 2.0) / 2.0 - 1.0 / (2.0 * (1.0 - sol.alpha_star));
  b.rate = sol.h_tilted + b.log_n_coefficient * std::log2(nn) / nn;
  return b;
}

/// Prefix-free limit from the one-to-one limit: one extra bit per block.
inline double prefix_adjust(double rate, std::uint64_t n) {
  if (n == 0) throw DomainError("prefix_adjust: n must be positive");
  return rate + 1.0 / static_cast<double>(n);
}

/// One row of the approximation ladder at (n, eps).
struct RateLadder {
  std::uint64_t n = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  std::optional<double> exact;
  double shannon = 0.0;
  double strassen = 0.0;
  std::optional<double> blahut;     // empty when delta is out of range
  std::optional<double> pragmatic;  // empty when delta is out of range
  std::optional<double> alpha_star;
};

/// Approximate columns of the ladder; `exact` is left for the caller.
inline RateLadder rate_ladder(const SourcePmf& p, std::uint64_t n, double eps) {
  RateLadder row;
  row.n = n;
  row.epsilon = eps;
  row.delta = epsilon_to_delta(eps, n);
  row.shannon = shannon_rate(p);
  row.strassen = strassen_rate(p, n, eps);
  const auto range = delta_range(p);
  if (range && range->contains(row.delta)) {
    const auto sol = solve_alpha_star(p, row.delta);
    row.alpha_star = sol.alpha_star;
    row.blahut = sol.h_tilted;
    row.pragmatic = sol.h_tilted - detail::pragmatic_correction(n, sol.alpha_star);
  }
  return row;
}

}  // namespace prate

#endif  // PRATE_APPROXIMATIONS_HPP
