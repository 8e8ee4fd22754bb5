#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace roughsim {

inline std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// Iterative radix-2 complex FFT of a fixed power-of-two length.
/// Tables are built once; transform() is const and thread-safe.
class FftPlan {
 public:
  using Complex = std::complex<double>;

  explicit FftPlan(std::size_t size) : size_(size) {
    if (size == 0 || (size & (size - 1)) != 0) {
      throw std::invalid_argument("FftPlan: size must be a power of two");
    }
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < size) ++bits;
    reversal_.resize(size);
    for (std::size_t i = 0; i < size; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
      reversal_[i] = r;
    }
    // Stage with half-length h uses twiddles e^{-i pi j / h}, j < h, stored at offset h - 1.
    twiddles_.resize(size > 1 ? size - 1 : 0);
    for (std::size_t h = 1; h < size; h <<= 1) {
      for (std::size_t j = 0; j < h; ++j) {
        const double angle = -std::numbers::pi * static_cast<double>(j) / static_cast<double>(h);
        twiddles_[h - 1 + j] = Complex(std::cos(angle), std::sin(angle));
      }
    }
  }

  std::size_t size() const noexcept { return size_; }

  /// In-place forward transform (sign -1 in the exponent).
  void forward(std::span<Complex> x) const { transform(x); }

  /// In-place inverse transform, including the 1/N factor.
  void inverse(std::span<Complex> x) const {
    for (auto& v : x) v = Complex(v.real(), -v.imag());
    transform(x);
    const double scale = 1.0 / static_cast<double>(size_);
    for (auto& v : x) v = Complex(v.real() * scale, -v.imag() * scale);
  }

 private:
  void transform(std::span<Complex> x) const {
    if (x.size() != size_) throw std::invalid_argument("FftPlan: length mismatch");
    for (std::size_t i = 0; i < size_; ++i) {
      const std::size_t r = reversal_[i];
      if (r > i) std::swap(x[i], x[r]);
    }
    double* d = reinterpret_cast<double*>(x.data());
    for (std::size_t h = 1; h < size_; h <<= 1) {
      const Complex* tw = twiddles_.data() + (h - 1);
      for (std::size_t start = 0; start < size_; start += 2 * h) {
        for (std::size_t j = 0; j < h; ++j) {
          // Explicit arithmetic keeps the compiler off the slow NaN-checked complex multiply.
          double* a = d + 2 * (start + j);
          double* b = d + 2 * (start + j + h);
          const double wr = tw[j].real();
          const double wi = tw[j].imag();
          const double tr = wr * b[0] - wi * b[1];
          const double ti = wr * b[1] + wi * b[0];
          b[0] = a[0] - tr;
          b[1] = a[1] - ti;
          a[0] += tr;
          a[1] += ti;
        }
      }
    }
  }

  std::size_t size_;
  std::vector<std::size_t> reversal_;
  std::vector<Complex> twiddles_;
};

}  // namespace roughsim
