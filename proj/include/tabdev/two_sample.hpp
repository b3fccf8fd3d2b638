#pragma once

// Two-sample deviation test  H0: ||mu1 - mu2|| > d0  vs  H1: ||mu1 - mu2|| <= d0.
//
// Each group keeps its first m_i = M_i - N0 rows as a head; the last N0 rows
// are paired positionally. With delta0 = mean(x_head) - mean(z_head), the
// targets Y_i = delta0' (x_tail_i - z_tail_i) - d0^2 feed the same TAB
// recursion as the one-sample test.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tabdev/error.hpp"
#include "tabdev/matrix.hpp"
#include "tabdev/tab.hpp"

namespace tabdev {

struct TwoSampleConfig {
  double d0 = 1.0;
  double alpha = 0.05;
  /// Length of the recursion phase; defaults to floor(min(M1, M2) / 3).
  std::optional<std::size_t> n0;

  std::size_t resolved_n0(std::size_t m1_total, std::size_t m2_total) const {
    return n0 ? *n0 : std::min(m1_total, m2_total) / 3;
  }

  void validate(std::size_t m1_total, std::size_t m2_total) const {
    if (!(d0 > 0.0) || !std::isfinite(d0)) throw ConfigError("d0 must be positive and finite");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    const auto n = resolved_n0(m1_total, m2_total);
    if (n < 1 || n >= std::min(m1_total, m2_total)) {
      throw ConfigError("N0=" + std::to_string(n) + " must satisfy 1 <= N0 < min(M1, M2)=" +
                        std::to_string(std::min(m1_total, m2_total)));
    }
  }
};

inline std::vector<double> compute_delta0(const Matrix& x_head, const Matrix& z_head) {
  if (x_head.cols() != z_head.cols()) throw DomainError("group dimensions differ");
  if (x_head.rows() == 0 || z_head.rows() == 0) throw DomainError("head samples must be nonempty");
  auto delta = column_means(x_head);
  const auto z_mean = column_means(z_head);
  for (std::size_t j = 0; j < delta.size(); ++j) delta[j] -= z_mean[j];
  return delta;
}

inline std::vector<double> compute_pair_targets(const Matrix& x_tail, const Matrix& z_tail,
                                                std::span<const double> delta0, double d0) {
  if (x_tail.rows() != z_tail.rows()) {
    throw DomainError("tails have " + std::to_string(x_tail.rows()) + " and " +
                      std::to_string(z_tail.rows()) + " rows; pairing needs equal counts");
  }
  if (x_tail.cols() != z_tail.cols() || x_tail.cols() != delta0.size()) {
    throw DomainError("dimension mismatch between tails and delta0");
  }
  const double d0_sq = d0 * d0;
  std::vector<double> diff(delta0.size());
  std::vector<double> targets(x_tail.rows());
  for (std::size_t i = 0; i < x_tail.rows(); ++i) {
    const auto xr = x_tail.row(i);
    const auto zr = z_tail.row(i);
    for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = xr[j] - zr[j];
    targets[i] = dot(delta0, diff) - d0_sq;
  }
  return targets;
}

inline std::pair<TestResult, TabTrajectory> two_sample_deviation_test(const Matrix& x, const Matrix& z,
                                                                      const TwoSampleConfig& cfg) {
  validate_sample(x, "first group");
  validate_sample(z, "second group");
  if (x.cols() != z.cols()) throw DomainError("groups have different dimensions");
  cfg.validate(x.rows(), z.rows());

  const std::size_t n0 = cfg.resolved_n0(x.rows(), z.rows());
  const std::size_t m1 = x.rows() - n0;
  const std::size_t m2 = z.rows() - n0;
  const auto delta0 = compute_delta0(x.slice_rows(0, m1), z.slice_rows(0, m2));
  const auto targets =
      compute_pair_targets(x.slice_rows(m1, x.rows()), z.slice_rows(m2, z.rows()), delta0, cfg.d0);
  const auto nuisance = estimate_moments(targets);
  auto traj = run_tab(targets, nuisance);

  TestResult result = decide(traj.final_stat, cfg.alpha);
  result.d0 = cfg.d0;
  result.dimension = x.cols();
  result.head_rows = m1;
  result.tail_rows = n0;
  return {result, std::move(traj)};
}

}  // namespace tabdev
