#pragma once

// Asymptotic size and power. The statistic is asymptotically B(-kappa) with
//   kappa = tau (1 + sqrt(steps / (tau^2 + sigma^2))),
// so the rejection probability at level alpha is g(kappa) = bandit_tail_prob.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "tabdev/bandit.hpp"
#include "tabdev/error.hpp"
#include "tabdev/matrix.hpp"
#include "tabdev/normal.hpp"

namespace tabdev {

/// Population mean and covariance; the second group is optional and
/// defaults to mean zero, covariance zero.
struct PopulationSpec {
  std::vector<double> mu;
  Matrix sigma;
  std::optional<std::vector<double>> mu2;
  std::optional<Matrix> sigma2;

  std::size_t dimension() const noexcept { return mu.size(); }

  void validate() const {
    check_covariance(sigma, "sigma");
    if (sigma.rows() != mu.size()) throw DomainError("mu and sigma dimensions differ");
    if (mu2 && mu2->size() != mu.size()) throw DomainError("mu2 has the wrong dimension");
    if (sigma2) {
      check_covariance(*sigma2, "sigma2");
      if (sigma2->rows() != mu.size()) throw DomainError("sigma2 has the wrong dimension");
    }
  }

  /// Symmetric to 1e-10 with eigenvalues >= -1e-10.
  static void check_covariance(const Matrix& s, const char* name) {
    if (s.rows() != s.cols() || s.rows() == 0) {
      throw DomainError(std::string(name) + " must be a nonempty square matrix");
    }
    const auto n = s.rows();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (std::abs(s(i, j) - s(j, i)) > 1e-10) throw DomainError(std::string(name) + " is not symmetric");
      }
    }
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> view(
        s.data().data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(view, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw DomainError(std::string(name) + ": eigen-solver failed");
    if (solver.eigenvalues().minCoeff() < -1e-10) {
      throw DomainError(std::string(name) + " is not positive semi-definite");
    }
  }
};

namespace detail {

inline double kappa_from_moments(double tau, double sigma2, std::size_t steps) {
  const double energy = tau * tau + sigma2;
  if (!(energy > 0.0)) throw DegenerateError("tau^2 + sigma^2 vanishes; kappa is undefined");
  return tau * (1.0 + std::sqrt(static_cast<double>(steps) / energy));
}

}  // namespace detail

/// kappa_{1,T2} with tau = ||mu||^2 - d0^2 and sigma^2 = mu' S mu + Tr(S^2) / T1.
inline double kappa_one_sample(const PopulationSpec& pop, double d0, std::size_t t1, std::size_t t2) {
  if (t1 < 1 || t2 < 1) throw DomainError("sample sizes must be positive");
  if (pop.sigma.rows() != pop.mu.size()) throw DomainError("mu and sigma dimensions differ");
  const double tau = dot(pop.mu, pop.mu) - d0 * d0;
  const double sigma2 = quadratic_form(pop.mu, pop.sigma) +
                        trace_of_product(pop.sigma, divided(pop.sigma, static_cast<double>(t1)));
  return detail::kappa_from_moments(tau, sigma2, t2);
}

/// kappa_{1,delta} with tau = ||mu1 - mu2||^2 - d0^2 and
/// sigma^2 = d' (S1 + S2) d + Tr((S1 + S2)(S1/m1 + S2/m2)).
inline double kappa_two_sample(const PopulationSpec& pop, double d0, std::size_t m1, std::size_t m2,
                               std::size_t n0) {
  if (m1 < 1 || m2 < 1 || n0 < 1) throw DomainError("sample sizes must be positive");
  const auto n = pop.dimension();
  if (pop.sigma.rows() != n) throw DomainError("mu and sigma dimensions differ");
  const std::vector<double> zeros(n, 0.0);
  const std::span<const double> mu2 = pop.mu2 ? std::span<const double>(*pop.mu2) : std::span<const double>(zeros);
  const Matrix sigma2 = pop.sigma2 ? *pop.sigma2 : Matrix(n, n);

  std::vector<double> delta(n);
  for (std::size_t j = 0; j < n; ++j) delta[j] = pop.mu[j] - mu2[j];
  const double tau = dot(delta, delta) - d0 * d0;
  const Matrix sum = pop.sigma + sigma2;
  const Matrix weighted = divided(pop.sigma, static_cast<double>(m1)) + divided(sigma2, static_cast<double>(m2));
  const double s2 = quadratic_form(delta, sum) + trace_of_product(sum, weighted);
  return detail::kappa_from_moments(tau, s2, n0);
}

/// P(|B(-kappa)| > z_{alpha/2}); at most alpha whenever kappa >= 0.
inline double theoretical_rejection_prob(double kappa, double alpha) {
  return bandit_tail_prob(kappa, two_sided_critical_value(alpha));
}

struct OneSampleSizes {
  std::size_t t1;
  std::size_t t2;
};

struct TwoSampleSizes {
  std::size_t m1;
  std::size_t m2;
  std::size_t n0;
};

using SampleSizes = std::variant<OneSampleSizes, TwoSampleSizes>;

struct PowerRow {
  double d0;
  double kappa;
  double predicted_power;
};

inline std::vector<PowerRow> power_curve(const PopulationSpec& pop, std::span<const double> d0_grid,
                                         const SampleSizes& sizes, double alpha) {
  if (d0_grid.empty()) throw DomainError("power_curve needs a nonempty d0 grid");
  pop.validate();
  std::vector<PowerRow> rows;
  rows.reserve(d0_grid.size());
  for (double d0 : d0_grid) {
    const double kappa = std::visit(
        [&](const auto& s) {
          if constexpr (std::is_same_v<std::decay_t<decltype(s)>, OneSampleSizes>) {
            return kappa_one_sample(pop, d0, s.t1, s.t2);
          } else {
            return kappa_two_sample(pop, d0, s.m1, s.m2, s.n0);
          }
        },
        sizes);
    rows.push_back({d0, kappa, theoretical_rejection_prob(kappa, alpha)});
  }
  return rows;
}

}  // namespace tabdev
