#include "tabdev/sim.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

namespace {

using tabdev::Matrix;

double max_reconstruction_error(const Matrix& gamma, const Matrix& sigma) {
  double worst = 0.0;
  for (std::size_t i = 0; i < sigma.rows(); ++i) {
    for (std::size_t j = 0; j < sigma.cols(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < gamma.cols(); ++k) acc += gamma(i, k) * gamma(j, k);
      worst = std::max(worst, std::abs(acc - sigma(i, j)));
    }
  }
  return worst;
}

Eigen::VectorXd spectrum(const Matrix& s) {
  Eigen::MatrixXd m(s.rows(), s.cols());
  for (std::size_t i = 0; i < s.rows(); ++i) {
    for (std::size_t j = 0; j < s.cols(); ++j) m(i, j) = s(i, j);
  }
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues();
}

tabdev::SimulationConfig desk_config(std::size_t n, std::size_t t, std::vector<double> d0) {
  tabdev::SimulationConfig cfg;
  cfg.n = n;
  cfg.t = t;
  cfg.d0_values = std::move(d0);
  cfg.replications = 200;
  cfg.seed = 1234567;
  return cfg;
}

std::vector<double> table_grid() {
  std::vector<double> g;
  for (int l = 0; l <= 10; ++l) g.push_back(0.5 + 0.1 * l);
  return g;
}

TEST(Ar1Covariance, SmallCase) {
  EXPECT_EQ(tabdev::ar1_covariance(2, 0.5), Matrix(2, 2, std::vector<double>{1.0, 0.5, 0.5, 1.0}));
}

TEST(Ar1Covariance, UnitDiagonalToeplitz) {
  const auto s = tabdev::ar1_covariance(30, -0.4);
  double trace = 0.0;
  for (std::size_t i = 0; i < 30; ++i) {
    trace += s(i, i);
    for (std::size_t j = 0; j < 30; ++j) {
      EXPECT_EQ(s(i, j), s(j, i));
      if (i > 0 && j > 0) EXPECT_EQ(s(i, j), s(i - 1, j - 1));
    }
  }
  EXPECT_EQ(trace, 30.0);
}

TEST(Ar1Covariance, SpectrumBounds) {
  const auto ev = spectrum(tabdev::ar1_covariance(100, 0.5));
  EXPECT_GT(ev.minCoeff(), 0.0);
  EXPECT_LE(ev.maxCoeff(), 3.0);
}

TEST(Ar1Covariance, RejectsUnitRho) {
  EXPECT_THROW(tabdev::ar1_covariance(3, 1.0), tabdev::DomainError);
  EXPECT_THROW(tabdev::ar1_covariance(3, -1.5), tabdev::DomainError);
}

TEST(Cholesky, IdentityIsFixed) {
  EXPECT_EQ(tabdev::cholesky_factor(Matrix::identity(5)), Matrix::identity(5));
}

TEST(Cholesky, HandComputedTwoByTwo) {
  const auto l = tabdev::cholesky_factor(tabdev::ar1_covariance(2, 0.5));
  EXPECT_EQ(l(0, 0), 1.0);
  EXPECT_EQ(l(0, 1), 0.0);
  EXPECT_NEAR(l(1, 0), 0.5, 1e-15);
  EXPECT_NEAR(l(1, 1), std::sqrt(0.75), 1e-15);
}

TEST(Cholesky, RandomGramMatrix) {
  tabdev::Engine rng(42);
  std::normal_distribution<double> gauss;
  Matrix a(25, 20);
  for (double& v : a.data()) v = gauss(rng);
  Matrix s(20, 20);
  for (std::size_t i = 0; i < 20; ++i) {
    for (std::size_t j = 0; j < 20; ++j) {
      for (std::size_t k = 0; k < 25; ++k) s(i, j) += a(k, i) * a(k, j);
    }
  }
  const auto l = tabdev::cholesky_factor(s);
  EXPECT_LT(max_reconstruction_error(l, s), 1e-8);
  for (std::size_t i = 0; i < 20; ++i) {
    for (std::size_t j = i + 1; j < 20; ++j) EXPECT_EQ(l(i, j), 0.0);
  }
}

TEST(Cholesky, RankDeficientInput) {
  // v v' + e3 e3' has rank 2 in dimension 4.
  const std::vector<double> v{1.0, 2.0, 0.0, -1.0};
  Matrix s(4, 4);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) s(i, j) = v[i] * v[j];
  }
  s(2, 2) += 1.0;
  EXPECT_LT(max_reconstruction_error(tabdev::cholesky_factor(s), s), 1e-8);
  EXPECT_LT(max_reconstruction_error(tabdev::cholesky_factor(Matrix(3, 3)), Matrix(3, 3)), 1e-15);
}

TEST(Cholesky, IndefiniteIsAnError) {
  EXPECT_THROW(tabdev::cholesky_factor(Matrix(2, 2, std::vector<double>{1.0, 2.0, 2.0, 1.0})),
               tabdev::FactorizationError);
  EXPECT_THROW(tabdev::cholesky_factor(Matrix(2, 2, std::vector<double>{-1.0, 0.0, 0.0, 1.0})),
               tabdev::FactorizationError);
  EXPECT_THROW(tabdev::cholesky_factor(Matrix(2, 3)), tabdev::FactorizationError);
}

TEST(GenerateSample, ZeroFactorRepeatsMean) {
  tabdev::Engine rng(1);
  const std::vector<double> mu{1.5, -2.0, 0.25};
  const auto x = tabdev::generate_sample(mu, Matrix(3, 3), 7, tabdev::Noise::gaussian, rng);
  for (std::size_t i = 0; i < 7; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(x(i, j), mu[j]);
  }
}

TEST(GenerateSample, GaussianColumnVariances) {
  tabdev::Engine rng(2);
  const std::size_t n = 5;
  const auto x = tabdev::generate_sample(std::vector<double>(n, 0.0), Matrix::identity(n), 100000,
                                         tabdev::Noise::gaussian, rng);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      s += x(i, j);
      ss += x(i, j) * x(i, j);
    }
    const double m = s / 1e5;
    const double var = ss / 1e5 - m * m;
    EXPECT_GE(var, 0.97);
    EXPECT_LE(var, 1.03);
  }
}

TEST(GenerateSample, RademacherEntriesAreSigns) {
  tabdev::Engine rng(3);
  const std::vector<double> mu{0.5, -0.5};
  const auto x = tabdev::generate_sample(mu, Matrix::identity(2), 1000, tabdev::Noise::rademacher, rng);
  int plus = 0;
  for (std::size_t i = 0; i < 1000; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const double e = x(i, j) - mu[j];
      EXPECT_TRUE(e == 1.0 || e == -1.0);
      plus += e > 0;
    }
  }
  EXPECT_NEAR(plus / 2000.0, 0.5, 0.05);
}

TEST(GenerateSample, FullAndTriangularFactorsAgree) {
  // A dense factor and its triangular counterpart produce the same rows from one stream.
  const Matrix l = tabdev::cholesky_factor(tabdev::ar1_covariance(4, 0.5));
  Matrix dense = l;
  dense(0, 3) = 0.0;
  tabdev::Engine a(9);
  tabdev::Engine b(9);
  const std::vector<double> mu(4, 0.0);
  EXPECT_EQ(tabdev::generate_sample(mu, l, 20, tabdev::Noise::gaussian, a),
            tabdev::generate_sample(mu, dense, 20, tabdev::Noise::gaussian, b));
}

TEST(GenerateSample, DimensionMismatch) {
  tabdev::Engine rng(1);
  EXPECT_THROW(tabdev::generate_sample(std::vector<double>(2), Matrix::identity(3), 5, tabdev::Noise::gaussian, rng),
               tabdev::DomainError);
}

TEST(SimulationConfig, Validation) {
  auto cfg = desk_config(10, 20, {1.0});
  cfg.replications = 0;
  EXPECT_THROW(cfg.validate(), tabdev::ConfigError);
  cfg = desk_config(10, 20, {});
  EXPECT_THROW(cfg.validate(), tabdev::ConfigError);
  cfg = desk_config(10, 20, {1.0, -0.5});
  EXPECT_THROW(cfg.validate(), tabdev::ConfigError);
  cfg = desk_config(10, 20, {1.0});
  cfg.sigma.rho = 1.0;
  EXPECT_THROW(cfg.validate(), tabdev::ConfigError);
  cfg = desk_config(10, 20, {1.0});
  cfg.mode = tabdev::TwoSampleMode{30, 20, 40};
  EXPECT_THROW(cfg.validate(), tabdev::ConfigError);
}

TEST(EmpiricalRejectionRate, SmallestCellRatesAndMonotonicity) {
  const auto grid = tabdev::empirical_rejection_rate(desk_config(100, 200, table_grid()), 0.05);
  ASSERT_EQ(grid.rows.size(), 11u);
  EXPECT_LE(grid.rows[3].rate, 0.06);   // d0 = 0.8
  EXPECT_GE(grid.rows[10].rate, 0.95);  // d0 = 1.5
  for (std::size_t i = 1; i < grid.rows.size(); ++i) {
    EXPECT_GE(grid.rows[i].rate, grid.rows[i - 1].rate - grid.rows[i - 1].stderr_rate) << "d0=" << grid.rows[i].d0;
  }
  for (const auto& r : grid.rows) {
    EXPECT_EQ(r.n, 100u);
    EXPECT_EQ(r.t, 200u);
    EXPECT_EQ(r.replications, 200u);
    EXPECT_DOUBLE_EQ(r.stderr_rate, std::sqrt(r.rate * (1.0 - r.rate) / 200.0));
  }
}

TEST(EmpiricalRejectionRate, SecondCellAtTransition) {
  const auto grid = tabdev::empirical_rejection_rate(desk_config(200, 400, {1.2}), 0.05);
  EXPECT_NEAR(grid.rows[0].rate, 0.85, 0.10);
}

TEST(EmpiricalRejectionRate, NullCalibration) {
  // ||mu|| = 1 > d0 = 0.5: the deviation hypothesis holds.
  const auto grid = tabdev::empirical_rejection_rate(desk_config(100, 200, {0.5}), 0.05);
  const double se = std::sqrt(0.05 * 0.95 / 200.0);
  EXPECT_LE(grid.rows[0].rate, 0.05 + 3.0 * se);
}

TEST(EmpiricalRejectionRate, RademacherNoiseRobustness) {
  auto cfg = desk_config(100, 200, {1.5});
  const double gaussian = tabdev::empirical_rejection_rate(cfg, 0.05).rows[0].rate;
  cfg.noise = tabdev::Noise::rademacher;
  const double rademacher = tabdev::empirical_rejection_rate(cfg, 0.05).rows[0].rate;
  EXPECT_LE(std::abs(gaussian - rademacher), 0.1);
}

TEST(EmpiricalRejectionRate, IndependentOfWorkerCount) {
  auto cfg = desk_config(30, 60, {0.8, 1.0, 1.2});
  cfg.replications = 50;
  const auto one = tabdev::empirical_rejection_rate(cfg, 0.05, 1);
  const auto four = tabdev::empirical_rejection_rate(cfg, 0.05, 4);
  const auto again = tabdev::empirical_rejection_rate(cfg, 0.05, 4);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(one.rows[i].rate, four.rows[i].rate);
    EXPECT_EQ(one.rows[i].mean_abs_statistic, four.rows[i].mean_abs_statistic);
    EXPECT_EQ(four.rows[i].mean_abs_statistic, again.rows[i].mean_abs_statistic);
  }
}

TEST(EmpiricalRejectionRate, TwoSampleMode) {
  auto cfg = desk_config(40, 0, {0.5, 1.5});
  cfg.replications = 50;
  cfg.mode = tabdev::TwoSampleMode{60, 180, 180};
  const auto one = tabdev::empirical_rejection_rate(cfg, 0.05, 1);
  const auto three = tabdev::empirical_rejection_rate(cfg, 0.05, 3);
  EXPECT_EQ(one.rows[0].rate, three.rows[0].rate);
  EXPECT_EQ(one.rows[1].mean_abs_statistic, three.rows[1].mean_abs_statistic);
  EXPECT_EQ(one.rows[0].t, 360u);
  // ||mu1 - mu2|| = 1: d0 = 1.5 is well inside, d0 = 0.5 well outside.
  EXPECT_GT(one.rows[1].rate, one.rows[0].rate);
}

TEST(EmpiricalRejectionRate, ErrorsNameTheCell) {
  auto cfg = desk_config(3, 8, {1.0});
  cfg.replications = 3;
  cfg.sigma.kind = tabdev::SigmaSpec::Kind::custom;
  cfg.sigma.custom = Matrix(3, 3);
  cfg.mu.kind = tabdev::MuSpec::Kind::custom;
  cfg.mu.custom = {1.0, 0.0, 0.0};
  try {
    tabdev::empirical_rejection_rate(cfg, 0.05, 1);
    FAIL() << "expected a degenerate-scale error";
  } catch (const tabdev::Error& e) {
    EXPECT_EQ(e.code(), tabdev::ErrorCode::degenerate);
    EXPECT_NE(std::string(e.what()).find("replication 0"), std::string::npos) << e.what();
  }
}

}  // namespace
