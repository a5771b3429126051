#ifndef PRATE_DISTRIBUTIONS_HPP
#define PRATE_DISTRIBUTIONS_HPP

// Probability vectors, entropy, relative entropy and the exponentially tilted
// family P_alpha(x) = P(x)^alpha / Z_alpha.
//
// Units: entropies, divergences and log Z are in bits. The tilted moments
// (variances and third absolute central moments) are in nats, i.e. they are
// moments of natural-log quantities. Conversions by log2(e) happen only where
// a formula needs them.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "prate/errors.hpp"
#include "prate/numeric.hpp"

namespace prate {

inline constexpr double kSumTolerance = 1e-12;

namespace detail {

inline void check_probability_vector(std::span<const double> p, bool allow_zeros) {
  if (p.size() < 1) throw InvalidInput("probability vector is empty");
  CompensatedSum s;
  for (double x : p) {
    if (!std::isfinite(x) || x < 0.0 || x > 1.0) {
      throw InvalidInput("probability entries must lie in [0,1]");
    }
    if (!allow_zeros && x == 0.0) {
      throw InvalidInput("source distribution must have full support");
    }
    s.add(x);
  }
  if (std::abs(s.value() - 1.0) > kSumTolerance) {
    throw InvalidInput("probability vector does not sum to 1 (sum = " +
                       std::to_string(s.value()) + ")");
  }
}

}  // namespace detail

/// Full-support probability mass function on {0, ..., m-1}, m >= 2.
class SourcePmf {
 public:
  explicit SourcePmf(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.size() < 2) throw InvalidInput("alphabet size must be at least 2");
    detail::check_probability_vector(probs_, /*allow_zeros=*/false);
  }

  static SourcePmf uniform(std::size_t m) {
    return SourcePmf(std::vector<double>(m, 1.0 / static_cast<double>(m)));
  }
  static SourcePmf bernoulli(double p) { return SourcePmf({p, 1.0 - p}); }

  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }

  bool is_uniform(double tol = 1e-15) const {
    const double u = 1.0 / static_cast<double>(probs_.size());
    return std::all_of(probs_.begin(), probs_.end(),
                       [&](double x) { return std::abs(x - u) <= tol; });
  }

  friend bool operator==(const SourcePmf&, const SourcePmf&) = default;

 private:
  std::vector<double> probs_;
};

/// Shannon entropy in bits. Zero entries are allowed (0 log 0 = 0).
inline double entropy(std::span<const double> p) {
  detail::check_probability_vector(p, /*allow_zeros=*/true);
  CompensatedSum s;
  for (double x : p) {
    if (x > 0.0) s.add(-x * std::log2(x));
  }
  return std::max(0.0, s.value());
}

inline double entropy(const SourcePmf& p) { return entropy(p.probs()); }

/// D(q || p) in bits.
inline double kl_divergence(std::span<const double> q, std::span<const double> p) {
  if (q.size() != p.size()) throw DomainError("kl_divergence: alphabet sizes differ");
  detail::check_probability_vector(q, true);
  detail::check_probability_vector(p, true);
  CompensatedSum s;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0.0) continue;
    if (p[i] == 0.0) throw DomainError("kl_divergence: supp(q) is not contained in supp(p)");
    s.add(q[i] * std::log2(q[i] / p[i]));
  }
  return std::max(0.0, s.value());
}

inline double kl_divergence(const SourcePmf& q, const SourcePmf& p) {
  return kl_divergence(q.probs(), p.probs());
}

/// Mean, variance and third absolute / signed central moments of a function
/// of X under a distribution w.
struct CentralMoments {
  double mean = 0.0;
  double variance = 0.0;
  double abs_third = 0.0;
  double third = 0.0;
};

inline CentralMoments central_moments(std::span<const double> w, std::span<const double> values) {
  CentralMoments m;
  m.mean = compensated_sum(w.size(), [&](std::size_t i) { return w[i] * values[i]; });
  CompensatedSum var, abs3, sgn3;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double d = values[i] - m.mean;
    var.add(w[i] * d * d);
    abs3.add(w[i] * std::abs(d) * d * d);
    sgn3.add(w[i] * d * d * d);
  }
  m.variance = std::max(0.0, var.value());
  m.abs_third = std::max(0.0, abs3.value());
  m.third = sgn3.value();
  return m;
}

/// The tilted law P_alpha together with its normaliser and moments.
///
/// sigma1_sq/rho1: moments of ln P_alpha(X) under P_alpha.
/// sigma2_sq/rho2: moments of ln(P_alpha(X)/P(X)) under P_alpha.
/// sigma3_sq/rho3: moments of ln P(X) under P_alpha; third3 is the signed
/// third central moment of the same variable.
struct TiltedPoint {
  double alpha = 1.0;
  SourcePmf pmf;
  double log_z = 0.0;  // bits
  double sigma1_sq = 0.0, rho1 = 0.0;
  double sigma2_sq = 0.0, rho2 = 0.0;
  double sigma3_sq = 0.0, rho3 = 0.0;
  double third3 = 0.0;
};

inline TiltedPoint tilt(const SourcePmf& p, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("tilt: alpha must lie in (0,1]");
  const std::size_t m = p.size();
  std::vector<double> ln_p(m), scaled(m);
  for (std::size_t i = 0; i < m; ++i) {
    ln_p[i] = std::log(p[i]);
    scaled[i] = alpha * ln_p[i];
  }
  // log-sum-exp for ln Z_alpha.
  const double top = *std::max_element(scaled.begin(), scaled.end());
  const double ln_z =
      top + std::log(compensated_sum(m, [&](std::size_t i) { return std::exp(scaled[i] - top); }));

  std::vector<double> tilted(m), ln_tilted(m), ln_ratio(m);
  for (std::size_t i = 0; i < m; ++i) {
    ln_tilted[i] = scaled[i] - ln_z;
    tilted[i] = std::exp(ln_tilted[i]);
    ln_ratio[i] = ln_tilted[i] - ln_p[i];
  }
  // Exact renormalisation keeps the SourcePmf sum check satisfied.
  const double total = compensated_sum(m, [&](std::size_t i) { return tilted[i]; });
  for (double& x : tilted) x /= total;

  if (alpha == 1.0) tilted.assign(p.probs().begin(), p.probs().end());

  const auto m1 = central_moments(tilted, ln_tilted);
  const auto m2 = central_moments(tilted, ln_ratio);
  const auto m3 = central_moments(tilted, ln_p);

  TiltedPoint t{alpha, SourcePmf(std::move(tilted)), nats_to_bits(ln_z)};
  t.sigma1_sq = m1.variance;
  t.rho1 = m1.abs_third;
  t.sigma2_sq = m2.variance;
  t.rho2 = m2.abs_third;
  t.sigma3_sq = m3.variance;
  t.rho3 = m3.abs_third;
  t.third3 = m3.third;
  return t;
}

/// Closed-form derivatives along the tilted family. D and H are in bits per
/// unit alpha; the variance derivative is in nats^2.
struct TiltedDerivatives {
  double dD_dalpha = 0.0;
  double d2D_dalpha2 = 0.0;
  double dH_dalpha = 0.0;
  double d2H_dalpha2 = 0.0;
  double dsigma3sq_dalpha = 0.0;
};

inline TiltedDerivatives tilted_derivatives(const SourcePmf& p, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("tilted_derivatives: alpha must lie in the open interval (0,1)");
  }
  const TiltedPoint t = tilt(p, alpha);
  TiltedDerivatives d;
  d.dsigma3sq_dalpha = t.third3;
  d.dD_dalpha = (alpha - 1.0) * t.sigma3_sq * kLog2E;
  d.d2D_dalpha2 = kLog2E * t.sigma3_sq + kLog2E * (alpha - 1.0) * d.dsigma3sq_dalpha;
  d.dH_dalpha = -kLog2E * alpha * t.sigma3_sq;
  d.d2H_dalpha2 = -kLog2E * (t.sigma3_sq + alpha * d.dsigma3sq_dalpha);
  return d;
}

/// alpha [D(Q||P) - D(P_a||P)] - D(Q||P_a) - (1-alpha) [H(Q) - H(P_a)].
/// Identically zero; exposed so the identity can be checked numerically.
inline double tilting_identity_residual(const SourcePmf& p, std::span<const double> q, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("tilting_identity_residual: alpha must lie in (0,1)");
  }
  if (q.size() != p.size()) throw DomainError("tilting_identity_residual: alphabet sizes differ");
  const TiltedPoint t = tilt(p, alpha);
  const double d_qp = kl_divergence(q, p.probs());
  const double d_tp = kl_divergence(t.pmf, p);
  const double d_qt = kl_divergence(q, t.pmf.probs());
  return alpha * (d_qp - d_tp) - d_qt - (1.0 - alpha) * (entropy(q) - entropy(t.pmf));
}

}  // namespace prate

#endif  // PRATE_DISTRIBUTIONS_HPP
