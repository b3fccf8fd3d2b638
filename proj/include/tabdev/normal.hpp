#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "tabdev/error.hpp"

namespace tabdev {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;

inline double normal_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

inline double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// log Phi(x), accurate deep into the lower tail where Phi(x) underflows.
inline double log_normal_cdf(double x) noexcept {
  if (x > -30.0) return std::log(normal_cdf(x));
  // Asymptotic Mills-ratio series: Phi(x) = phi(x)/|x| * (1 - 1/x^2 + 3/x^4 - ...).
  const double inv2 = 1.0 / (x * x);
  double term = 1.0;
  double series = 1.0;
  for (int k = 1; k <= 6; ++k) {
    term *= -static_cast<double>(2 * k - 1) * inv2;
    series += term;
  }
  return -0.5 * x * x - kLogSqrt2Pi - std::log(-x) + std::log(series);
}

inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal quantile requires 0 < p < 1");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

/// Upper alpha/2 point of N(0,1), the two-sided critical value.
inline double two_sided_critical_value(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  return normal_quantile(1.0 - 0.5 * alpha);
}

/// P(|N(0,1)| > |statistic|).
inline double two_sided_normal_p_value(double statistic) noexcept {
  return std::erfc(std::abs(statistic) / std::numbers::sqrt2);
}

/// Kolmogorov-Smirnov distance between the empirical law of `samples` and `cdf`.
template <class Cdf>
double ks_distance(std::span<const double> samples, Cdf&& cdf) {
  if (samples.empty()) throw DomainError("KS distance needs at least one sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace tabdev
