#include <cmath>
#include <random>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "roughsim/kernels.hpp"

using namespace roughsim;

namespace {

// Independent oracle: tanh-sinh on the raw (unsubstituted) integrand.
template <class F>
double tanh_sinh(F f, double a, double b) {
  boost::math::quadrature::tanh_sinh<double> q;
  return q.integrate(f, a, b, 1e-13);
}

// int_0^t u^alpha e^{beta u} du as a power series.
double gamma_G_series(double alpha, double beta, double t) {
  double sum = 0.0, term = 1.0;
  for (int k = 0; k < 80; ++k) {
    if (k > 0) term *= beta * t / k;
    sum += term * std::pow(t, alpha + 1.0) / (alpha + k + 1.0);
  }
  return sum;
}

}  // namespace

TEST(EvalG, ConstantKernel) { EXPECT_DOUBLE_EQ(eval_g(RiemannLiouville{0.0}, 0.7), 1.0); }

TEST(EvalG, UnitArgument) { EXPECT_DOUBLE_EQ(eval_g(RiemannLiouville{0.25}, 1.0), 1.0); }

TEST(EvalG, GammaAtOne) {
  EXPECT_NEAR(eval_g(GammaFractional{0.25, -1.0}, 1.0), 0.36787944117144233, 1e-15);
}

TEST(EvalG, PowerLawFormula) {
  EXPECT_NEAR(eval_g(PowerLaw{0.2, -2.0}, 0.5), std::pow(0.5, 0.2) * std::pow(1.5, -2.2), 1e-15);
}

TEST(EvalG, SingularAtZeroThrows) {
  EXPECT_THROW(eval_g(RiemannLiouville{-0.2}, 0.0), std::domain_error);
  EXPECT_THROW(eval_g(RiemannLiouville{0.2}, -1.0), std::domain_error);
  EXPECT_DOUBLE_EQ(eval_g(RiemannLiouville{0.2}, 0.0), 0.0);
}

TEST(EvalBigG, Examples) {
  EXPECT_DOUBLE_EQ(eval_G(RiemannLiouville{0.0}, 2.0), 2.0);
  EXPECT_NEAR(eval_G(RiemannLiouville{-0.4}, 1.0), 1.0 / 0.6, 1e-14);
  EXPECT_NEAR(eval_G(GammaFractional{0.0, -1.0}, 1.0), 1.0 - std::exp(-1.0), 1e-12);
}

TEST(EvalBigG, GammaAgainstSeries) {
  for (double alpha : {-0.45, -0.2, 0.0, 0.3, 0.8}) {
    for (double beta : {-0.5, -2.0}) {
      for (double t : {0.1, 1.0, 3.0}) {
        const double expected = gamma_G_series(alpha, beta, t);
        EXPECT_NEAR(eval_G(GammaFractional{alpha, beta}, t), expected, 1e-12 * std::max(1.0, expected))
            << alpha << " " << beta << " " << t;
      }
    }
  }
}

TEST(EvalBigG, PowerLawAgainstTanhSinh) {
  const PowerLaw k{-0.3, -1.8};
  const double expected = tanh_sinh([&](double u) { return eval_g(k, u); }, 0.0, 2.0);
  EXPECT_NEAR(eval_G(k, 2.0), expected, 1e-11);
}

TEST(EvalBigG, NondecreasingAndZeroAtOrigin) {
  const std::vector<KernelSpec> kernels{RiemannLiouville{-0.4}, GammaFractional{-0.3, -1.5},
                                        PowerLaw{0.2, -3.0}};
  for (const auto& k : kernels) {
    EXPECT_EQ(eval_G(k, 0.0), 0.0);
    double prev = 0.0;
    for (int i = 1; i <= 40; ++i) {
      const double g = eval_G(k, 0.1 * i);
      EXPECT_GE(g, prev);
      prev = g;
    }
  }
}

TEST(SquaredKernelIntegral, Examples) {
  EXPECT_DOUBLE_EQ(squared_kernel_integral(RiemannLiouville{0.0}, 0.0, 1.0), 1.0);
  EXPECT_NEAR(squared_kernel_integral(RiemannLiouville{-0.45}, 0.0, 1.0), 10.0, 1e-12);
  EXPECT_NEAR(squared_kernel_integral(RiemannLiouville{0.25}, 0.5, 1.0),
              (1.0 - std::pow(0.5, 1.5)) / 1.5, 1e-14);
  EXPECT_NEAR(squared_kernel_integral(RiemannLiouville{0.25}, 0.5, 1.0), 0.430964, 1e-6);
}

TEST(SquaredKernelIntegral, InvalidInterval) {
  EXPECT_THROW(squared_kernel_integral(RiemannLiouville{0.1}, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(squared_kernel_integral(RiemannLiouville{0.1}, 1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(squared_kernel_integral(RiemannLiouville{0.1}, -0.1, 0.5), std::invalid_argument);
}

TEST(SquaredKernelIntegral, QuadratureMatchesClosedFormOnRandomSample) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ualpha(-0.49, 0.99), ua(0.0, 1.0), ulen(1e-3, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double alpha = ualpha(rng);
    const double a = trial % 4 == 0 ? 0.0 : ua(rng);
    const double b = a + ulen(rng);
    const RiemannLiouville k{alpha};
    const double closed = squared_kernel_integral(k, a, b);
    const double quad = detail::squared_integral_quadrature(k, a, b);
    worst = std::max(worst, std::abs(quad - closed) / closed);
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(SquaredKernelIntegral, NonRlAgainstTanhSinh) {
  const std::vector<KernelSpec> kernels{GammaFractional{-0.45, -1.0}, GammaFractional{0.3, -4.0},
                                        PowerLaw{-0.4, -1.5}, PowerLaw{0.1, -5.0}};
  for (const auto& k : kernels) {
    for (auto [a, b] : {std::pair{0.0, 1.0}, std::pair{0.25, 0.5}, std::pair{0.0, 0.01}}) {
      const double expected = tanh_sinh([&](double u) { return std::pow(eval_g(k, u), 2); }, a, b);
      EXPECT_NEAR(squared_kernel_integral(k, a, b), expected, 1e-12 * std::max(1.0, expected))
          << kernel_name(k) << " [" << a << "," << b << "]";
    }
  }
}

TEST(KernelProductIntegral, MatchesTanhSinh) {
  const std::vector<KernelSpec> kernels{RiemannLiouville{-0.2}, RiemannLiouville{0.25},
                                        GammaFractional{-0.3, -1.0}};
  for (const auto& k : kernels) {
    for (double lag : {0.0, 0.03125, 0.5}) {
      const double s = 0.75;
      const double expected = tanh_sinh([&](double v) { return eval_g(k, lag + v) * eval_g(k, v); }, 0.0, s);
      EXPECT_NEAR(kernel_product_integral(k, lag, s), expected, 1e-11) << lag;
    }
  }
}

TEST(OptimalEvalWeights, ConstantKernelGivesOnes) {
  for (double w : optimal_eval_weights(RiemannLiouville{0.0}, Grid(7, 2.5))) EXPECT_NEAR(w, 1.0, 1e-15);
}

TEST(OptimalEvalWeights, SingleStep) {
  const auto w = optimal_eval_weights(RiemannLiouville{-0.45}, Grid(1, 1.0));
  ASSERT_EQ(w.size(), 1u);
  EXPECT_NEAR(w[0], std::sqrt(10.0), 1e-12);
}

TEST(OptimalEvalWeights, TwoSteps) {
  const auto w = optimal_eval_weights(RiemannLiouville{0.25}, Grid(2, 1.0));
  EXPECT_NEAR(w[0], std::sqrt(2.0 * std::pow(0.5, 1.5) / 1.5), 1e-14);
  EXPECT_NEAR(w[1], std::sqrt(2.0 * (1.0 - std::pow(0.5, 1.5)) / 1.5), 1e-14);
  EXPECT_NEAR(w[0], 0.686589, 1e-6);
  EXPECT_NEAR(w[1], 0.928401, 1e-6);
}

TEST(OptimalEvalWeights, MomentIdentityRl) {
  for (double h : {0.05, 0.1, 0.3, 0.5, 0.75}) {
    const Grid grid(500, 1.0);
    const auto w = optimal_eval_weights(rl_from_hurst(h), grid);
    double sum = 0.0;
    for (std::size_t i = 1; i <= grid.steps(); ++i) {
      sum += grid.dt() * w[i - 1] * w[i - 1];
      const double exact = std::pow(grid.time(i), 2.0 * h) / (2.0 * h);
      ASSERT_NEAR(sum, exact, 1e-10 * exact) << "H=" << h << " i=" << i;
    }
  }
}

TEST(OptimalEvalWeights, MomentIdentityGamma) {
  const GammaFractional k{-0.3, -1.0};
  const Grid grid(64, 2.0);
  const auto w = optimal_eval_weights(k, grid);
  double sum = 0.0;
  for (std::size_t i = 1; i <= grid.steps(); ++i) {
    sum += grid.dt() * w[i - 1] * w[i - 1];
    const double exact = squared_kernel_integral(k, 0.0, grid.time(i));
    EXPECT_NEAR(sum, exact, 1e-10 * exact) << i;
  }
}

TEST(LeftPointWeights, Examples) {
  for (double w : left_point_weights(RiemannLiouville{0.0}, Grid(4, 1.0))) EXPECT_EQ(w, 1.0);
  const auto w = left_point_weights(RiemannLiouville{0.25}, Grid(2, 1.0));
  EXPECT_NEAR(w[0], std::pow(0.5, 0.25), 1e-15);
  EXPECT_NEAR(w[0], 0.840896, 1e-6);
  EXPECT_DOUBLE_EQ(w[1], 1.0);
  const auto wg = left_point_weights(GammaFractional{0.0, -1.0}, Grid(2, 2.0));
  EXPECT_NEAR(wg[0], std::exp(-1.0), 1e-15);
  EXPECT_NEAR(wg[1], std::exp(-2.0), 1e-15);
}

TEST(LeftPointWeights, UnderestimateFirstLagForRoughKernel) {
  for (double h : {0.05, 0.1, 0.3}) {
    const Grid grid(100, 1.0);
    const auto left = left_point_weights(rl_from_hurst(h), grid);
    const auto opt = optimal_eval_weights(rl_from_hurst(h), grid);
    EXPECT_LE(left[0], opt[0]);
    for (double w : left) EXPECT_GE(w, 0.0);
  }
}

TEST(ValidateKernel, Ranges) {
  EXPECT_NO_THROW(validate_kernel(RiemannLiouville{-0.45}));
  EXPECT_THROW(validate_kernel(RiemannLiouville{-0.6}), ConfigError);
  EXPECT_NO_THROW(validate_kernel(RiemannLiouville{-0.6}, false));
  EXPECT_THROW(validate_kernel(RiemannLiouville{1.0}), ConfigError);
  EXPECT_THROW(validate_kernel(GammaFractional{0.1, 0.5}), ConfigError);
  EXPECT_THROW(validate_kernel(PowerLaw{0.1, -0.5}), ConfigError);
}

TEST(GridTest, Times) {
  const Grid g(3, 1.5);
  EXPECT_EQ(g.time(0), 0.0);
  EXPECT_EQ(g.time(3), 1.5);
  EXPECT_LT(g.time(1), g.time(2));
  EXPECT_THROW(Grid(0, 1.0), ConfigError);
  EXPECT_THROW(Grid(2, 0.0), ConfigError);
}
