#pragma once

// Test-only reference computations. Nothing here calls into the code paths
// it is used to check.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "tabdev/matrix.hpp"

namespace tabdev::oracle {

/// Composite Simpson rule with `intervals` (even) panels.
template <class F>
double simpson(F&& f, double a, double b, std::size_t intervals = 20000) {
  if (intervals % 2) ++intervals;
  const double h = (b - a) / static_cast<double>(intervals);
  double acc = f(a) + f(b);
  for (std::size_t i = 1; i < intervals; ++i) {
    acc += (i % 2 ? 4.0 : 2.0) * f(a + static_cast<double>(i) * h);
  }
  return acc * h / 3.0;
}

/// Composite trapezoid rule.
template <class F>
double trapezoid(F&& f, double a, double b, std::size_t intervals = 200000) {
  const double h = (b - a) / static_cast<double>(intervals);
  double acc = 0.5 * (f(a) + f(b));
  for (std::size_t i = 1; i < intervals; ++i) acc += f(a + static_cast<double>(i) * h);
  return acc * h;
}

/// Bandit density typed straight from its defining formula, using erfc
/// without any log-space rearrangement. Valid for moderate |kappa x|.
inline double naive_bandit_pdf(double x, double kappa) {
  const double a = std::abs(x);
  const double phi = std::exp(-0.5 * (a - kappa) * (a - kappa)) / std::sqrt(2.0 * std::numbers::pi);
  const double big_phi = 0.5 * std::erfc((a + kappa) / std::numbers::sqrt2);
  return phi - kappa * std::exp(2.0 * kappa * a) * big_phi;
}

/// P(|B(kappa)| > z) by integrating the naive density over [-z, z].
inline double tail_by_quadrature(double kappa, double z) {
  const auto f = [kappa](double x) { return naive_bandit_pdf(x, kappa); };
  return 1.0 - 2.0 * simpson(f, 0.0, z, 40000);
}

inline double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Tr(S^2) by explicit matrix product.
inline double trace_of_square_brute_force(const Matrix& s) {
  double trace = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i) {
    for (std::size_t k = 0; k < s.cols(); ++k) trace += s(i, k) * s(k, i);
  }
  return trace;
}

/// Tr(A B) by explicit matrix product.
inline double trace_of_product_brute_force(const Matrix& a, const Matrix& b) {
  double trace = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) trace += a(i, k) * b(k, i);
  }
  return trace;
}

inline double quadratic_form_brute_force(const std::vector<double>& x, const Matrix& s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) acc += x[i] * s(i, j) * x[j];
  }
  return acc;
}

/// Sample mean and standard error.
struct MeanSe {
  double mean;
  double se;
};

inline MeanSe mean_se(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double var = ss / static_cast<double>(v.size() - 1);
  return {m, std::sqrt(var / static_cast<double>(v.size()))};
}

}  // namespace tabdev::oracle
