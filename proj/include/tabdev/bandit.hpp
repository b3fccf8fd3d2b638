#pragma once

// The bandit distribution B(kappa): the limiting law of the TAB statistic.
//
// Density  f(x) = phi(|x| - kappa) - kappa * exp(2 kappa |x|) * Phi(-|x| - kappa).
// B(0) is N(0,1); kappa < 0 concentrates mass at 0, kappa > 0 splits it into
// two modes moving away from 0.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "tabdev/error.hpp"
#include "tabdev/normal.hpp"
#include "tabdev/random.hpp"

namespace tabdev {

class BanditParams {
 public:
  explicit BanditParams(double kappa) : kappa_(kappa) {
    if (!std::isfinite(kappa)) throw DomainError("bandit kappa must be finite");
  }
  double kappa() const noexcept { return kappa_; }

 private:
  double kappa_;
};

namespace detail {

// exp(2 k a) * Phi(-a - k) for a >= 0, in log space so neither factor can
// overflow on its own.
inline double reflected_mass(double k, double a) noexcept {
  return std::exp(2.0 * k * a + log_normal_cdf(-a - k));
}

}  // namespace detail

inline double bandit_pdf(double x, const BanditParams& p) {
  if (!std::isfinite(x)) throw DomainError("bandit_pdf: x must be finite");
  const double k = p.kappa();
  const double a = std::abs(x);
  const double value = normal_pdf(a - k) - k * detail::reflected_mass(k, a);
  return value > 0.0 ? value : 0.0;
}

/// g(kappa) = P(|B(-kappa)| > z) = 1 - Phi(kappa + z) + exp(-2 z kappa) Phi(kappa - z).
///
/// Strictly decreasing in kappa; g(0) equals the two-sided normal tail at z.
inline double bandit_tail_prob(double kappa, double z) {
  if (!std::isfinite(kappa) || std::isnan(z)) throw DomainError("bandit_tail_prob: non-finite input");
  if (z < 0.0) throw DomainError("bandit_tail_prob: z must be non-negative");
  if (std::isinf(z)) return 0.0;
  const double value = normal_cdf(-(kappa + z)) + std::exp(-2.0 * z * kappa + log_normal_cdf(kappa - z));
  return std::clamp(value, 0.0, 1.0);
}

namespace detail {

// P(B(kappa) > x) for x >= 0.
inline double bandit_upper_tail(double x, double kappa) {
  return 0.5 * bandit_tail_prob(-kappa, x);
}

}  // namespace detail

inline double bandit_cdf(double x, const BanditParams& p) {
  if (std::isnan(x)) throw DomainError("bandit_cdf: x is NaN");
  if (x == std::numeric_limits<double>::infinity()) return 1.0;
  if (x == -std::numeric_limits<double>::infinity()) return 0.0;
  const double upper = detail::bandit_upper_tail(std::abs(x), p.kappa());
  return x >= 0.0 ? 1.0 - upper : upper;
}

/// Inverse of bandit_cdf: bracketing bisection, then safeguarded secant.
inline double bandit_quantile(double q, const BanditParams& p) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("bandit_quantile: q must lie in (0, 1)");
  if (q == 0.5) return 0.0;
  // Solve on the upper half by symmetry; the target is the upper-tail mass.
  const bool upper_half = q > 0.5;
  const double target = upper_half ? 1.0 - q : q;
  const double k = p.kappa();
  auto h = [&](double x) { return detail::bandit_upper_tail(x, k) - target; };

  double lo = 0.0;
  double hi = 1.0;
  while (h(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw DomainError("bandit_quantile: failed to bracket");
  }
  double h_lo = h(lo);
  double h_hi = h(hi);
  while (hi - lo > 1e-8 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    const double h_mid = h(mid);
    if (h_mid > 0.0) {
      lo = mid;
      h_lo = h_mid;
    } else {
      hi = mid;
      h_hi = h_mid;
    }
  }

  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 60; ++iter) {
    double next = (h_lo != h_hi) ? hi - h_hi * (hi - lo) / (h_hi - h_lo) : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double h_next = h(next);
    x = next;
    if (h_next == 0.0) break;
    if (h_next > 0.0) {
      lo = next;
      h_lo = h_next;
    } else {
      hi = next;
      h_hi = h_next;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi)) break;
    if (std::abs(h_next) <= 1e-17) break;
  }
  return upper_half ? x : -x;
}

/// Inverse-CDF draws; deterministic given the state of `rng`.
template <class URBG>
std::vector<double> bandit_sample(const BanditParams& p, URBG& rng, std::size_t count) {
  if (count == 0) throw DomainError("bandit_sample: count must be at least 1");
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(bandit_quantile(open_uniform(rng), p));
  return out;
}

}  // namespace tabdev
