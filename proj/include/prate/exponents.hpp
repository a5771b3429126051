#ifndef PRATE_EXPONENTS_HPP
#define PRATE_EXPONENTS_HPP

// Inverse error-exponent machinery: the tilt parameter alpha* solving
// D(P_alpha* || P) = delta, the error exponent Delta_P(R), and extremal values
// of the tilted moments over alpha in (0,1).

#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

#include "prate/distributions.hpp"

namespace prate {

/// Open interval (lower, upper) in bits.
struct DeltaInterval {
  double lower = 0.0;
  double upper = 0.0;
  bool contains(double delta) const { return delta > lower && delta < upper; }
};

/// Admissible exponents (0, D(U || P)); empty when P is uniform.
inline std::optional<DeltaInterval> delta_range(const SourcePmf& p) {
  const double upper = kl_divergence(SourcePmf::uniform(p.size()), p);
  if (p.is_uniform() || upper <= 1e-15) return std::nullopt;
  return DeltaInterval{0.0, upper};
}

struct AlphaStarSolution {
  double alpha_star = 0.0;
  double delta = 0.0;      // bits
  double h_tilted = 0.0;   // H(P_alpha*), bits
  TiltedPoint tilted;
};

namespace detail {

inline std::string describe_interval(const std::optional<DeltaInterval>& r) {
  std::ostringstream os;
  os.precision(9);
  if (!r) {
    os << "empty (uniform source)";
  } else {
    os << "(" << r->lower << ", " << r->upper << ")";
  }
  return os.str();
}

inline double divergence_at(const SourcePmf& p, double alpha) {
  return kl_divergence(tilt(p, alpha).pmf, p);
}

}  // namespace detail

/// Bisection for the unique alpha* in (0,1) with D(P_alpha* || P) = delta.
/// D(P_alpha || P) is strictly decreasing in alpha, so the bracket is exact.
inline AlphaStarSolution solve_alpha_star(const SourcePmf& p, double delta) {
  const auto range = delta_range(p);
  if (!range || !range->contains(delta)) {
    std::ostringstream os;
    os.precision(9);
    os << "delta = " << delta << " bits outside admissible interval "
       << detail::describe_interval(range);
    throw DomainError(os.str());
  }
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-14) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (detail::divergence_at(p, mid) > delta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double alpha = 0.5 * (lo + hi);
  TiltedPoint t = tilt(p, alpha);
  const double h = entropy(t.pmf);
  return AlphaStarSolution{alpha, delta, h, std::move(t)};
}

/// Delta_P(R) = inf { D(P'||P) : H(P') >= R } for H(P) <= R <= log2 m, via
/// the tilted family (H(P_alpha) is strictly decreasing in alpha).
inline double error_exponent(const SourcePmf& p, double rate) {
  const double h = entropy(p);
  const double h_max = std::log2(static_cast<double>(p.size()));
  constexpr double tol = 1e-12;
  if (rate < h - tol || rate > h_max + tol) {
    std::ostringstream os;
    os.precision(9);
    os << "error_exponent: rate " << rate << " outside [H(P), log2 m] = [" << h << ", " << h_max
       << "]";
    throw DomainError(os.str());
  }
  if (rate <= h) return 0.0;
  if (rate >= h_max) return kl_divergence(SourcePmf::uniform(p.size()), p);
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-15) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (entropy(tilt(p, mid).pmf) > rate) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return detail::divergence_at(p, 0.5 * (lo + hi));
}

/// Extremes of sigma_{3,alpha}^2 and rho_{3,alpha} over alpha in (0,1), in nats.
struct MomentEnvelope {
  double sigma3_inf_sq = 0.0;
  double sigma3_sup_sq = 0.0;
  double rho3_sup = 0.0;
  std::size_t grid_size = 0;
  double refinement_tol = 0.0;
  bool degenerate = false;  // uniform source: every moment vanishes
};

struct EnvelopeOptions {
  std::size_t grid_size = 4096;
  double margin = 1e-6;  // grid covers [margin, 1 - margin]
  double refinement_tol = 1e-10;
};

namespace detail {

// Golden-section search for the maximiser of f on [a, b].
template <class Fn>
double golden_section_max(Fn&& f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Grid scan followed by golden-section refinement of the best cell.
template <class Fn>
double refined_max(Fn&& f, const std::vector<double>& grid, double tol) {
  std::size_t best = 0;
  double best_val = f(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double v = f(grid[i]);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  const double a = grid[best == 0 ? 0 : best - 1];
  const double b = grid[best + 1 == grid.size() ? best : best + 1];
  const double x = golden_section_max(f, a, b, tol);
  return std::max(best_val, f(x));
}

}  // namespace detail

inline MomentEnvelope moment_envelope(const SourcePmf& p, const EnvelopeOptions& opt = {}) {
  MomentEnvelope env;
  env.grid_size = opt.grid_size;
  env.refinement_tol = opt.refinement_tol;
  if (p.is_uniform()) {
    env.degenerate = true;
    return env;
  }
  if (opt.grid_size < 3) throw DomainError("moment_envelope: grid needs at least 3 points");
  std::vector<double> grid(opt.grid_size);
  const double lo = opt.margin, hi = 1.0 - opt.margin;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid.size() - 1);
  }
  auto sigma = [&](double a) { return tilt(p, a).sigma3_sq; };
  auto neg_sigma = [&](double a) { return -tilt(p, a).sigma3_sq; };
  auto rho = [&](double a) { return tilt(p, a).rho3; };
  env.sigma3_sup_sq = detail::refined_max(sigma, grid, opt.refinement_tol);
  env.sigma3_inf_sq = -detail::refined_max(neg_sigma, grid, opt.refinement_tol);
  env.rho3_sup = detail::refined_max(rho, grid, opt.refinement_tol);
  return env;
}

}  // namespace prate

#endif  // PRATE_EXPONENTS_HPP
