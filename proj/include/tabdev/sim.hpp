#pragma once

// Data generation x_t = mu + Gamma y_t and seeded grid experiments.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "tabdev/error.hpp"
#include "tabdev/matrix.hpp"
#include "tabdev/random.hpp"
#include "tabdev/tab.hpp"
#include "tabdev/two_sample.hpp"

namespace tabdev {

/// Sigma_ij = rho^|i-j|.
inline Matrix ar1_covariance(std::size_t n, double rho) {
  if (!(std::abs(rho) < 1.0)) throw DomainError("AR(1) coefficient must satisfy |rho| < 1");
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      s(i, j) = std::pow(rho, static_cast<double>(i > j ? i - j : j - i));
    }
  }
  return s;
}

/// Lower-triangular Gamma with Gamma Gamma' = sigma.
///
/// Zero pivots (semi-definite input) produce zero columns; a pivot below
/// -tolerance means the input is indefinite.
inline Matrix cholesky_factor(const Matrix& sigma) {
  if (sigma.rows() != sigma.cols()) throw FactorizationError("cholesky_factor needs a square matrix");
  const auto n = sigma.rows();
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(sigma(i, i)));
  const double tol = 1e-10 * std::max(1.0, scale);

  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = sigma(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (pivot < -tol) {
      throw FactorizationError("matrix is not positive semi-definite (pivot " + std::to_string(pivot) +
                               " at column " + std::to_string(j) + ")");
    }
    if (pivot <= tol) continue;  // rank-deficient column
    const double diag = std::sqrt(pivot);
    l(j, j) = diag;
    for (std::size_t i = j + 1; i < n; ++i) {
      double acc = sigma(i, j);
      for (std::size_t k = 0; k < j; ++k) acc -= l(i, k) * l(j, k);
      l(i, j) = acc / diag;
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k <= j; ++k) acc += l(i, k) * l(j, k);
      if (std::abs(acc - sigma(i, j)) > 1e-8 * std::max(1.0, scale)) {
        throw FactorizationError("matrix is not positive semi-definite (reconstruction failed)");
      }
    }
  }
  return l;
}

enum class Noise { gaussian, rademacher };

namespace detail {

inline bool is_lower_triangular(const Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) return false;
    }
  }
  return true;
}

}  // namespace detail

/// t rows of mu + gamma * y with y having independent mean-0, variance-1 entries.
template <class URBG>
Matrix generate_sample(std::span<const double> mu, const Matrix& gamma, std::size_t t, Noise noise, URBG& rng) {
  const auto n = gamma.rows();
  const auto m = gamma.cols();
  if (mu.size() != n) throw DomainError("mu and gamma dimensions differ");
  const bool lower = detail::is_lower_triangular(gamma);
  std::normal_distribution<double> gauss;
  std::vector<double> y(m);
  Matrix out(t, n);
  for (std::size_t r = 0; r < t; ++r) {
    if (noise == Noise::gaussian) {
      for (double& v : y) v = gauss(rng);
    } else {
      for (double& v : y) v = (static_cast<std::uint64_t>(rng()) >> 63) != 0 ? 1.0 : -1.0;
    }
    auto row = out.row(r);
    for (std::size_t i = 0; i < n; ++i) {
      const auto g = gamma.row(i);
      const std::size_t end = lower ? std::min(m, i + 1) : m;
      double acc = 0.0;
      for (std::size_t j = 0; j < end; ++j) acc += g[j] * y[j];
      row[i] = mu[i] + acc;
    }
  }
  return out;
}

struct MuSpec {
  enum class Kind { uniform_unit_norm, zero, custom };
  Kind kind = Kind::uniform_unit_norm;
  std::vector<double> custom;
};

struct SigmaSpec {
  enum class Kind { ar1, identity, custom };
  Kind kind = Kind::ar1;
  double rho = 0.5;
  Matrix custom;
};

struct OneSampleMode {
  double split_fraction = 0.5;
};

struct TwoSampleMode {
  std::size_t n0 = 0;
  std::size_t m1 = 0;
  std::size_t m2 = 0;
};

/// Grid experiment. In two-sample mode the first group has mean mu and the
/// second mean zero, both with covariance sigma, so ||mu1 - mu2|| = ||mu||.
struct SimulationConfig {
  std::size_t n = 100;
  std::size_t t = 200;
  std::vector<double> d0_values;
  std::size_t replications = 200;
  std::uint64_t seed = 0;
  MuSpec mu;
  SigmaSpec sigma;
  Noise noise = Noise::gaussian;
  std::variant<OneSampleMode, TwoSampleMode> mode = OneSampleMode{};

  void validate() const {
    if (n == 0) throw ConfigError("dimension n must be positive");
    if (replications < 1) throw ConfigError("replications must be at least 1");
    if (d0_values.empty()) throw ConfigError("d0 grid is empty");
    for (double d : d0_values) {
      if (!(d > 0.0) || !std::isfinite(d)) throw ConfigError("every d0 must be positive");
    }
    if (sigma.kind == SigmaSpec::Kind::ar1 && !(std::abs(sigma.rho) < 1.0)) {
      throw ConfigError("AR(1) rho must satisfy |rho| < 1");
    }
    if (mu.kind == MuSpec::Kind::custom && mu.custom.size() != n) throw ConfigError("custom mu has wrong length");
    if (sigma.kind == SigmaSpec::Kind::custom && (sigma.custom.rows() != n || sigma.custom.cols() != n)) {
      throw ConfigError("custom sigma has wrong shape");
    }
    if (const auto* two = std::get_if<TwoSampleMode>(&mode)) {
      if (two->n0 < 2 || two->n0 >= std::min(two->m1, two->m2)) {
        throw ConfigError("two-sample mode needs 2 <= n0 < min(m1, m2)");
      }
    } else if (t < 4) {
      throw ConfigError("one-sample mode needs t >= 4");
    }
  }

  std::vector<double> mean_vector() const {
    switch (mu.kind) {
      case MuSpec::Kind::uniform_unit_norm:
        return std::vector<double>(n, 1.0 / std::sqrt(static_cast<double>(n)));
      case MuSpec::Kind::zero:
        return std::vector<double>(n, 0.0);
      case MuSpec::Kind::custom:
        return mu.custom;
    }
    return {};
  }

  Matrix covariance() const {
    switch (sigma.kind) {
      case SigmaSpec::Kind::ar1: return ar1_covariance(n, sigma.rho);
      case SigmaSpec::Kind::identity: return Matrix::identity(n);
      case SigmaSpec::Kind::custom: return sigma.custom;
    }
    return {};
  }

  /// Total rows per replication (T, or M1 + M2).
  std::size_t total_rows() const {
    if (const auto* two = std::get_if<TwoSampleMode>(&mode)) return two->m1 + two->m2;
    return t;
  }
};

struct GridRow {
  std::size_t n = 0;
  std::size_t t = 0;
  double d0 = 0.0;
  double rate = 0.0;
  std::size_t replications = 0;
  double mean_abs_statistic = 0.0;
  double stderr_rate = 0.0;
};

struct GridResult {
  std::vector<GridRow> rows;
};

/// Worker count from TABDEV_THREADS (0 or unset = hardware concurrency).
inline unsigned default_worker_count() {
  unsigned requested = 0;
  if (const char* env = std::getenv("TABDEV_THREADS")) requested = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
  if (requested == 0) requested = std::max(1u, std::thread::hardware_concurrency());
  return requested;
}

namespace detail {

struct ReplicationOutcome {
  bool reject = false;
  double statistic = 0.0;
};

inline ReplicationOutcome run_replication(const SimulationConfig& cfg, std::span<const double> mu,
                                          const Matrix& gamma, double d0, double alpha, std::uint64_t seed) {
  Engine rng(seed);
  if (const auto* two = std::get_if<TwoSampleMode>(&cfg.mode)) {
    const std::vector<double> zeros(cfg.n, 0.0);
    const Matrix x = generate_sample(mu, gamma, two->m1, cfg.noise, rng);
    const Matrix z = generate_sample(zeros, gamma, two->m2, cfg.noise, rng);
    TwoSampleConfig tc{d0, alpha, two->n0};
    const auto [res, traj] = two_sample_deviation_test(x, z, tc);
    return {res.reject_h0, res.statistic};
  }
  const auto& one = std::get<OneSampleMode>(cfg.mode);
  const Matrix x = generate_sample(mu, gamma, cfg.t, cfg.noise, rng);
  OneSampleConfig oc;
  oc.d0 = d0;
  oc.alpha = alpha;
  oc.split_fraction = one.split_fraction;
  const auto [res, traj] = one_sample_deviation_test(x, oc);
  return {res.reject_h0, res.statistic};
}

}  // namespace detail

/// Empirical rejection rate for every d0 of the grid.
///
/// Replication r of cell c is seeded by child_seed(seed, c, r) and outcomes
/// are folded in (cell, replication) order, so the result does not depend on
/// the worker count.
inline GridResult empirical_rejection_rate(const SimulationConfig& cfg, double alpha, unsigned workers = 0) {
  cfg.validate();
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  const auto mu = cfg.mean_vector();
  const Matrix gamma = cholesky_factor(cfg.covariance());

  const std::size_t cells = cfg.d0_values.size();
  const std::size_t reps = cfg.replications;
  const std::size_t tasks = cells * reps;
  std::vector<detail::ReplicationOutcome> outcomes(tasks);
  std::vector<std::exception_ptr> errors(tasks);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < tasks; i = next.fetch_add(1)) {
      const std::size_t cell = i / reps;
      const std::size_t rep = i % reps;
      try {
        outcomes[i] = detail::run_replication(cfg, mu, gamma, cfg.d0_values[cell], alpha,
                                              child_seed(cfg.seed, cell, rep));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  if (workers == 0) workers = default_worker_count();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, tasks));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  for (std::size_t i = 0; i < tasks; ++i) {
    if (!errors[i]) continue;
    const std::string where = " [cell d0=" + std::to_string(cfg.d0_values[i / reps]) +
                              ", replication " + std::to_string(i % reps) + "]";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      throw Error(e.code(), e.what() + where);
    }
  }

  GridResult result;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    std::size_t rejections = 0;
    double abs_sum = 0.0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const auto& o = outcomes[cell * reps + rep];
      rejections += o.reject ? 1 : 0;
      abs_sum += std::abs(o.statistic);
    }
    GridRow row;
    row.n = cfg.n;
    row.t = cfg.total_rows();
    row.d0 = cfg.d0_values[cell];
    row.replications = reps;
    row.rate = static_cast<double>(rejections) / static_cast<double>(reps);
    row.mean_abs_statistic = abs_sum / static_cast<double>(reps);
    row.stderr_rate = std::sqrt(row.rate * (1.0 - row.rate) / static_cast<double>(reps));
    result.rows.push_back(row);
  }
  return result;
}

}  // namespace tabdev
