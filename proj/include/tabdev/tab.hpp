#pragma once

// One-sample deviation test  H0: ||mu - mu0|| > d0  vs  H1: ||mu - mu0|| <= d0.
//
// The sample is split into a head (T1 rows) and a tail (T2 rows). Each tail
// row gives a target X_t = mean(head)' x_t - d0^2 with E[X_t] = ||mu||^2 - d0^2.
// The TAB recursion accumulates theta_t * X_t, flipping theta against the sign
// of the running sum: negative feedback under H0, positive feedback under H1.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tabdev/error.hpp"
#include "tabdev/matrix.hpp"
#include "tabdev/normal.hpp"

namespace tabdev {

struct OneSampleConfig {
  double d0 = 1.0;
  /// Reference mean; empty means the zero vector.
  std::vector<double> mu0;
  double alpha = 0.05;
  /// T1 / T.
  double split_fraction = 0.5;

  void validate(std::size_t dimension) const {
    if (!(d0 > 0.0) || !std::isfinite(d0)) throw ConfigError("d0 must be positive and finite");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
      throw ConfigError("split fraction must lie in (0, 1)");
    }
    if (!mu0.empty() && mu0.size() != dimension) {
      throw ConfigError("mu0 has length " + std::to_string(mu0.size()) + " but data has " +
                        std::to_string(dimension) + " columns");
    }
  }
};

struct NuisanceEstimates {
  double tau_hat = 0.0;
  double sigma2_hat = 0.0;
};

struct TabTrajectory {
  std::vector<int> thetas;
  std::vector<double> partials;
  std::vector<double> targets;
  NuisanceEstimates nuisance;
  double final_stat = 0.0;
};

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  bool reject_h0 = false;
  double critical_value = 0.0;
  // Configuration echo.
  double d0 = 0.0;
  double alpha = 0.0;
  std::size_t dimension = 0;
  /// Head rows (T1, or m1 for two samples).
  std::size_t head_rows = 0;
  /// Rows consumed by the recursion (T2, or N0).
  std::size_t tail_rows = 0;
};

struct SplitSample {
  Matrix head;
  Matrix tail;
};

/// Contiguous split: T1 = floor(fraction * T) leading rows, T2 = T - T1 trailing rows.
inline SplitSample split_sample(const Matrix& sample, double split_fraction) {
  if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
    throw ConfigError("split fraction must lie in (0, 1)");
  }
  const auto t = sample.rows();
  const auto t1 = static_cast<std::size_t>(std::floor(split_fraction * static_cast<double>(t)));
  const auto t2 = t - t1;
  if (t1 < 1 || t2 < 2) {
    throw ConfigError("degenerate split: T=" + std::to_string(t) + " gives T1=" +
                      std::to_string(t1) + ", T2=" + std::to_string(t2) +
                      " (need T1 >= 1 and T2 >= 2)");
  }
  return {sample.slice_rows(0, t1), sample.slice_rows(t1, t)};
}

/// X_t = mean(head)' tail_t - d0^2 for each tail row. Both matrices must
/// already be centred at the reference mean.
inline std::vector<double> compute_targets(const Matrix& head, const Matrix& tail, double d0) {
  if (head.cols() != tail.cols()) throw DomainError("head and tail dimensions differ");
  if (head.rows() == 0) throw DomainError("head sample is empty");
  const auto head_mean = column_means(head);
  const double d0_sq = d0 * d0;
  std::vector<double> targets(tail.rows());
  for (std::size_t t = 0; t < tail.rows(); ++t) targets[t] = dot(head_mean, tail.row(t)) - d0_sq;
  return targets;
}

/// Population-divisor mean and variance of the targets.
inline NuisanceEstimates estimate_moments(std::span<const double> targets) {
  if (targets.size() < 2) throw DomainError("moment estimation needs at least two targets");
  const double inv = 1.0 / static_cast<double>(targets.size());
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double x : targets) {
    sum += x;
    sum_sq += x * x;
  }
  const double tau = sum * inv;
  const double sigma2 = sum_sq * inv - tau * tau;
  return {tau, sigma2 > 0.0 ? sigma2 : 0.0};
}

/// Per-step multiplier 1/T2 + 1/sqrt(T2 (tau^2 + sigma^2)).
inline double tab_increment_scale(std::size_t steps, const NuisanceEstimates& nuisance) {
  const double energy = nuisance.tau_hat * nuisance.tau_hat + nuisance.sigma2_hat;
  if (!(energy > 1e-12)) {
    throw DegenerateError("tau_hat^2 + sigma2_hat vanishes; targets are constant");
  }
  const double n = static_cast<double>(steps);
  return 1.0 / n + 1.0 / std::sqrt(n * energy);
}

/// Runs the TAB recursion. theta_1 = +1; afterwards theta_t = +1 iff the
/// previous partial sum is <= 0.
inline TabTrajectory run_tab(std::span<const double> targets, const NuisanceEstimates& nuisance) {
  if (targets.empty()) throw DomainError("run_tab needs at least one target");
  const double scale = tab_increment_scale(targets.size(), nuisance);
  TabTrajectory traj;
  traj.nuisance = nuisance;
  traj.targets.assign(targets.begin(), targets.end());
  traj.thetas.reserve(targets.size());
  traj.partials.reserve(targets.size());
  double m = 0.0;
  for (double x : targets) {
    const int theta = m <= 0.0 ? 1 : -1;
    m += theta * x * scale;
    traj.thetas.push_back(theta);
    traj.partials.push_back(m);
  }
  traj.final_stat = m;
  return traj;
}

/// Two-sided decision against N(0,1): reject iff |statistic| > z_{alpha/2}.
inline TestResult decide(double statistic, double alpha) {
  TestResult r;
  r.statistic = statistic;
  r.alpha = alpha;
  r.critical_value = two_sided_critical_value(alpha);
  r.p_value = two_sided_normal_p_value(statistic);
  r.reject_h0 = std::abs(statistic) > r.critical_value;
  return r;
}

inline void validate_sample(const Matrix& sample, const char* what = "sample") {
  if (sample.cols() == 0) throw DomainError(std::string(what) + " has zero columns");
  if (!all_finite(sample.data())) throw DomainError(std::string(what) + " contains non-finite entries");
}

inline std::pair<TestResult, TabTrajectory> one_sample_deviation_test(const Matrix& sample,
                                                                      const OneSampleConfig& cfg) {
  validate_sample(sample);
  if (sample.rows() < 4) throw DomainError("one-sample test needs T >= 4 observations");
  cfg.validate(sample.cols());

  const std::vector<double> zeros(sample.cols(), 0.0);
  const Matrix centred =
      subtract_from_rows(sample, cfg.mu0.empty() ? std::span<const double>(zeros) : cfg.mu0);
  auto [head, tail] = split_sample(centred, cfg.split_fraction);
  const auto targets = compute_targets(head, tail, cfg.d0);
  const auto nuisance = estimate_moments(targets);
  auto traj = run_tab(targets, nuisance);

  TestResult result = decide(traj.final_stat, cfg.alpha);
  result.d0 = cfg.d0;
  result.dimension = sample.cols();
  result.head_rows = head.rows();
  result.tail_rows = tail.rows();
  return {result, std::move(traj)};
}

}  // namespace tabdev
