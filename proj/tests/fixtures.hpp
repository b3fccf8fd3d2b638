#pragma once

// Synthetic data shared by several suites.

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "tabdev/matrix.hpp"
#include "tabdev/random.hpp"
#include "tabdev/sim.hpp"

namespace tabdev::fixture {

/// Two groups shaped like the microbiome comparison: 130 coordinates, 313 and
/// 303 rows, mean difference of norm `gap` spread evenly, isotropic noise.
inline std::pair<Matrix, Matrix> two_group_standin(double gap = 1.3, double noise_sd = 1.0,
                                                   std::uint64_t seed = 20250314) {
  constexpr std::size_t n = 130;
  const std::vector<double> mu1(n, gap / std::sqrt(static_cast<double>(n)));
  const std::vector<double> mu2(n, 0.0);
  Matrix gamma = Matrix::identity(n);
  for (double& v : gamma.data()) v *= noise_sd;
  Engine rng(seed);
  Matrix x = generate_sample(mu1, gamma, 313, Noise::gaussian, rng);
  Matrix z = generate_sample(mu2, gamma, 303, Noise::gaussian, rng);
  return {std::move(x), std::move(z)};
}

}  // namespace tabdev::fixture
