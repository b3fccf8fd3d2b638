#pragma once

// Euler-Maruyama oracle for dY = alpha sign(Y) ds + beta dB.
//
// Started from Y_0 = 0 with beta = 1, Y_1 has the bandit density with
// kappa = alpha; simulating the diffusion gives a check on B(kappa) that
// shares no code with bandit.hpp.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include "tabdev/error.hpp"
#include "tabdev/normal.hpp"
#include "tabdev/random.hpp"

namespace tabdev {

struct SdeParams {
  double alpha = 0.0;  // drift magnitude; positive pushes away from 0
  double beta = 1.0;   // diffusion coefficient
  double x0 = 0.0;

  void validate() const {
    if (!std::isfinite(alpha) || !std::isfinite(x0)) throw DomainError("SDE parameters must be finite");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("SDE beta must be positive");
  }
};

namespace detail {

template <class URBG>
double euler_path(const SdeParams& p, std::size_t steps, URBG& rng) {
  std::normal_distribution<double> gauss;
  const double h = 1.0 / static_cast<double>(steps);
  const double drift = p.alpha * h;
  const double shock = p.beta * std::sqrt(h);
  double y = p.x0;
  for (std::size_t i = 0; i < steps; ++i) {
    // sign(0) = +1, matching the theta tie rule.
    y += (y >= 0.0 ? drift : -drift) + shock * gauss(rng);
  }
  return y;
}

inline void check_sizes(std::size_t steps, std::size_t paths) {
  if (steps < 100) throw DomainError("simulate_endpoints needs at least 100 steps");
  if (paths < 1) throw DomainError("simulate_endpoints needs at least one path");
}

}  // namespace detail

/// Y_1 endpoints of `paths` independent paths on [0, 1] with step 1/steps,
/// all drawn from one caller-owned stream.
template <class URBG>
std::vector<double> simulate_endpoints(const SdeParams& p, std::size_t steps, std::size_t paths, URBG& rng) {
  p.validate();
  detail::check_sizes(steps, paths);
  std::vector<double> out(paths);
  for (auto& y : out) y = detail::euler_path(p, steps, rng);
  return out;
}

/// Same scheme with path i seeded by child_seed(seed, 0, i); the result is
/// independent of the worker count.
inline std::vector<double> simulate_endpoints_seeded(const SdeParams& p, std::size_t steps, std::size_t paths,
                                                     std::uint64_t seed, unsigned workers = 1) {
  p.validate();
  detail::check_sizes(steps, paths);
  std::vector<double> out(paths);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < paths; i = next.fetch_add(1)) {
      Engine rng(child_seed(seed, 0, i));
      out[i] = detail::euler_path(p, steps, rng);
    }
  };
  workers = static_cast<unsigned>(std::clamp<std::size_t>(workers, 1, paths));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return out;
}

/// Transition density of Y_s given Y_t = x.
inline double spiked_density(double w, double x, double t, double s, double alpha, double beta) {
  if (!(s > t)) throw DomainError("spiked_density requires s > t");
  if (!(beta > 0.0)) throw DomainError("spiked_density requires beta > 0");
  if (!std::isfinite(w) || !std::isfinite(x) || !std::isfinite(alpha)) {
    throw DomainError("spiked_density: non-finite input");
  }
  const double dt = s - t;
  const double wb = w / beta;
  const double xb = x / beta;
  const double exponent =
      ((wb - xb) * (wb - xb) - 2.0 * alpha * dt * (std::abs(wb) - std::abs(xb)) / beta +
       alpha * alpha * dt * dt / (beta * beta)) /
      (2.0 * dt);
  const double gaussian_part = std::exp(-exponent) / (std::sqrt(2.0 * std::numbers::pi * dt) * beta);
  // int_L^inf exp(-u^2 / (2 dt)) / sqrt(2 pi dt) du = Phi(-L / sqrt(dt)).
  const double lower = std::abs(wb) + std::abs(xb) + alpha * dt / beta;
  const double reflected = std::exp(2.0 * alpha * std::abs(w) / (beta * beta) +
                                    log_normal_cdf(-lower / std::sqrt(dt))) /
                           (beta * beta);
  const double value = gaussian_part - alpha * reflected;
  return value > 0.0 ? value : 0.0;
}

/// CDF of spiked_density tabulated by composite Simpson quadrature and
/// interpolated with cubic Hermite segments.
class SpikedCdf {
 public:
  SpikedCdf(double x, double t, double s, double alpha, double beta, std::size_t intervals = 20000)
      : x_(x), t_(t), s_(s), alpha_(alpha), beta_(beta) {
    if (intervals < 2 || intervals % 2 != 0) throw DomainError("SpikedCdf needs an even interval count");
    const double dt = s - t;
    half_width_ = std::abs(x) + std::abs(alpha) * dt + 40.0 * beta * std::sqrt(dt);
    step_ = 2.0 * half_width_ / static_cast<double>(intervals);
    nodes_.resize(intervals + 1);
    density_.resize(intervals + 1);
    cumulative_.resize(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) {
      nodes_[i] = -half_width_ + static_cast<double>(i) * step_;
      density_[i] = pdf(nodes_[i]);
    }
    cumulative_[0] = 0.0;
    for (std::size_t i = 0; i < intervals; ++i) {
      const double mid = pdf(nodes_[i] + 0.5 * step_);
      cumulative_[i + 1] = cumulative_[i] + step_ / 6.0 * (density_[i] + 4.0 * mid + density_[i + 1]);
    }
  }

  double pdf(double w) const { return spiked_density(w, x_, t_, s_, alpha_, beta_); }

  /// Total mass captured on the grid.
  double mass() const noexcept { return cumulative_.back(); }

  double operator()(double w) const {
    if (w <= nodes_.front()) return 0.0;
    if (w >= nodes_.back()) return cumulative_.back();
    const auto i = std::min(static_cast<std::size_t>((w - nodes_.front()) / step_), nodes_.size() - 2);
    const double u = (w - nodes_[i]) / step_;
    const double u2 = u * u;
    const double u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * cumulative_[i] + (u3 - 2 * u2 + u) * step_ * density_[i] +
           (-2 * u3 + 3 * u2) * cumulative_[i + 1] + (u3 - u2) * step_ * density_[i + 1];
  }

 private:
  double x_, t_, s_, alpha_, beta_;
  double half_width_ = 0.0;
  double step_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> density_;
  std::vector<double> cumulative_;
};

struct SdeCheckResult {
  double ks = 0.0;
  std::size_t paths = 0;
  std::size_t steps = 0;
  double alpha = 0.0;
  double beta = 1.0;
};

/// KS distance between simulated Y_1 endpoints (from x0 = 0) and the
/// quadrature CDF of the transition density.
inline SdeCheckResult sde_ks_check(double alpha, double beta, std::size_t steps, std::size_t paths,
                                   std::uint64_t seed, unsigned workers = 1) {
  const SdeParams p{alpha, beta, 0.0};
  const auto endpoints = simulate_endpoints_seeded(p, steps, paths, seed, workers);
  const SpikedCdf cdf(0.0, 0.0, 1.0, alpha, beta);
  return {ks_distance(endpoints, cdf), paths, steps, alpha, beta};
}

}  // namespace tabdev
