#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "roughsim/fft.hpp"

namespace roughsim {

enum class ConvolutionMethod { fft, naive };

inline std::string to_string(ConvolutionMethod m) {
  return m == ConvolutionMethod::fft ? "fft" : "naive";
}

/// out[i] = sum_{k=1}^{i} w[i-k+1] d[k] for i = 1..n (1-based lags and
/// increments), out[0] = 0. Here w and d are 0-based spans of length n and
/// out has length n + 1.
inline void convolve_naive(std::span<const double> w, std::span<const double> d,
                           std::span<double> out) {
  const std::size_t n = w.size();
  if (d.size() != n || out.size() != n + 1) {
    throw std::invalid_argument("convolve_naive: dimension mismatch");
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double dk = d[k];
    double* o = out.data() + k + 1;
    const std::size_t len = n - k;
    for (std::size_t m = 0; m < len; ++m) o[m] += w[m] * dk;
  }
}

/// Convolution against a fixed weight vector, by FFT or by the direct sum.
/// The FFT path transforms the weights once and convolves two real rows per
/// complex transform (one in the real part, one in the imaginary part).
class Convolver {
 public:
  using Complex = std::complex<double>;

  Convolver(std::vector<double> weights, ConvolutionMethod method)
      : weights_(std::move(weights)), method_(method),
        plan_(next_power_of_two(weights_.empty() ? 1 : 2 * weights_.size() - 1)) {
    if (weights_.empty()) throw std::invalid_argument("Convolver: empty weight vector");
    if (method_ == ConvolutionMethod::fft) {
      spectrum_.assign(plan_.size(), Complex(0.0, 0.0));
      for (std::size_t k = 0; k < weights_.size(); ++k) spectrum_[k] = Complex(weights_[k], 0.0);
      plan_.forward(spectrum_);
    }
  }

  std::size_t steps() const noexcept { return weights_.size(); }
  ConvolutionMethod method() const noexcept { return method_; }
  std::span<const double> weights() const noexcept { return weights_; }

  /// Convolves d1 (and d2 when non-empty) into out1 (and out2).
  void apply(std::span<const double> d1, std::span<double> out1, std::span<const double> d2 = {},
             std::span<double> out2 = {}) const {
    const std::size_t n = weights_.size();
    const bool pair = !d2.empty();
    if (d1.size() != n || out1.size() != n + 1 || (pair && (d2.size() != n || out2.size() != n + 1))) {
      throw std::invalid_argument("Convolver: dimension mismatch");
    }
    if (method_ == ConvolutionMethod::naive) {
      convolve_naive(weights_, d1, out1);
      if (pair) convolve_naive(weights_, d2, out2);
      return;
    }
    thread_local std::vector<Complex> scratch;
    scratch.assign(plan_.size(), Complex(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k) scratch[k] = Complex(d1[k], pair ? d2[k] : 0.0);
    plan_.forward(scratch);
    for (std::size_t k = 0; k < scratch.size(); ++k) {
      const double ar = scratch[k].real(), ai = scratch[k].imag();
      const double br = spectrum_[k].real(), bi = spectrum_[k].imag();
      scratch[k] = Complex(ar * br - ai * bi, ar * bi + ai * br);
    }
    plan_.inverse(scratch);
    out1[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) out1[i] = scratch[i - 1].real();
    if (pair) {
      out2[0] = 0.0;
      for (std::size_t i = 1; i <= n; ++i) out2[i] = scratch[i - 1].imag();
    }
  }

 private:
  std::vector<double> weights_;
  ConvolutionMethod method_;
  FftPlan plan_;
  std::vector<Complex> spectrum_;
};

}  // namespace roughsim
