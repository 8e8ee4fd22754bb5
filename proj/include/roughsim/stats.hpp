#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace roughsim {

/// Pairwise (cascade) summation; the result depends only on the input order.
inline double pairwise_sum(std::span<const double> x) {
  constexpr std::size_t kBlock = 64;
  if (x.size() <= kBlock) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

/// Sample mean with its standard error.
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Mean and standard error of iid samples. Deviations are taken from the
/// first sample, so a constant sample yields a standard error of exactly 0.
inline Estimate estimate_mean(std::span<const double> samples) {
  Estimate out;
  const std::size_t m = samples.size();
  if (m == 0) return out;
  const double shift = samples[0];
  std::vector<double> dev(m);
  for (std::size_t j = 0; j < m; ++j) dev[j] = samples[j] - shift;
  const double mean_dev = pairwise_sum(dev) / static_cast<double>(m);
  out.mean = shift + mean_dev;
  if (m < 2) return out;
  for (std::size_t j = 0; j < m; ++j) {
    const double d = dev[j] - mean_dev;
    dev[j] = d * d;
  }
  const double var = pairwise_sum(dev) / static_cast<double>(m - 1);
  out.std_error = std::sqrt(var / static_cast<double>(m));
  return out;
}

}  // namespace roughsim
