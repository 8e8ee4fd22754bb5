#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "roughsim/convolution.hpp"
#include "roughsim/fft.hpp"

using namespace roughsim;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(Fft, MatchesDirectDft) {
  const std::size_t n = 16;
  std::vector<std::complex<double>> x(n), y(n);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto& v : x) v = {u(rng), u(rng)};
  y = x;
  FftPlan(n).forward(y);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> s = 0;
    for (std::size_t j = 0; j < n; ++j) {
      s += x[j] * std::polar(1.0, -2.0 * M_PI * static_cast<double>(j * k) / n);
    }
    EXPECT_NEAR(std::abs(s - y[k]), 0.0, 1e-12);
  }
}

TEST(Fft, RoundTrip) {
  const std::size_t n = 1024;
  std::vector<std::complex<double>> x(n);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto& v : x) v = {u(rng), u(rng)};
  auto y = x;
  const FftPlan plan(n);
  plan.forward(y);
  plan.inverse(y);
  for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(std::abs(x[k] - y[k]), 0.0, 1e-13);
}

TEST(Fft, RejectsNonPowerOfTwo) { EXPECT_THROW(FftPlan(12), std::invalid_argument); }

TEST(Convolution, AllOnesTelescopes) {
  const std::vector<double> w(5, 1.0), d{0.5, -1.0, 2.0, 0.25, -0.75};
  for (auto method : {ConvolutionMethod::fft, ConvolutionMethod::naive}) {
    std::vector<double> out(6);
    Convolver(w, method).apply(d, out);
    double y = 0.0;
    EXPECT_EQ(out[0], 0.0);
    for (std::size_t i = 1; i <= 5; ++i) {
      y += d[i - 1];
      EXPECT_NEAR(out[i], y, 1e-14);
    }
  }
}

TEST(Convolution, UnrolledThreeSteps) {
  const double w1 = 0.3, w2 = -1.7, w3 = 2.2, d1 = 1.1, d2 = -0.4, d3 = 0.9;
  const std::vector<double> w{w1, w2, w3}, d{d1, d2, d3};
  std::vector<double> out(4);
  convolve_naive(w, d, out);
  EXPECT_DOUBLE_EQ(out[1], w1 * d1);
  EXPECT_DOUBLE_EQ(out[2], w2 * d1 + w1 * d2);
  EXPECT_DOUBLE_EQ(out[3], w3 * d1 + w2 * d2 + w1 * d3);
  std::vector<double> f(4);
  Convolver(w, ConvolutionMethod::fft).apply(d, f);
  EXPECT_LT(max_abs_diff(out, f), 1e-15);
}

TEST(Convolution, FftEqualsNaiveExhaustiveSmallN) {
  std::mt19937_64 rng(3);
  for (std::size_t n = 1; n <= 64; ++n) {
    const auto w = random_vector(rng, n), d1 = random_vector(rng, n), d2 = random_vector(rng, n);
    std::vector<double> a1(n + 1), a2(n + 1), b1(n + 1), b2(n + 1);
    Convolver(w, ConvolutionMethod::fft).apply(d1, a1, d2, a2);
    convolve_naive(w, d1, b1);
    convolve_naive(w, d2, b2);
    EXPECT_LT(max_abs_diff(a1, b1), 1e-9) << n;
    EXPECT_LT(max_abs_diff(a2, b2), 1e-9) << n;
  }
}

TEST(Convolution, FftEqualsNaiveLargeN) {
  std::mt19937_64 rng(4);
  for (std::size_t n : {1024, 4096}) {
    const auto w = random_vector(rng, n), d = random_vector(rng, n);
    std::vector<double> a(n + 1), b(n + 1);
    Convolver(w, ConvolutionMethod::fft).apply(d, a);
    convolve_naive(w, d, b);
    // Relative bound from the reference: 1e-10 * max|w| * max|d| * n.
    EXPECT_LT(max_abs_diff(a, b), 1e-10 * static_cast<double>(n));
    EXPECT_LT(max_abs_diff(a, b), 1e-9);
  }
}

TEST(Convolution, PairedEqualsSingle) {
  std::mt19937_64 rng(5);
  const std::size_t n = 300;
  const auto w = random_vector(rng, n), d1 = random_vector(rng, n), d2 = random_vector(rng, n);
  const Convolver c(w, ConvolutionMethod::fft);
  std::vector<double> p1(n + 1), p2(n + 1), s1(n + 1);
  c.apply(d1, p1, d2, p2);
  c.apply(d1, s1);
  EXPECT_LT(max_abs_diff(p1, s1), 1e-13);
}

TEST(Convolution, DimensionMismatch) {
  const std::vector<double> w(4, 1.0), d(3, 1.0);
  std::vector<double> out(5);
  EXPECT_THROW(convolve_naive(w, d, out), std::invalid_argument);
  EXPECT_THROW(Convolver(w, ConvolutionMethod::fft).apply(d, out), std::invalid_argument);
}
