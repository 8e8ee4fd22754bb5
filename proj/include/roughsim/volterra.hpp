#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "roughsim/convolution.hpp"
#include "roughsim/errors.hpp"
#include "roughsim/grid.hpp"
#include "roughsim/kernels.hpp"
#include "roughsim/matrix.hpp"
#include "roughsim/parallel.hpp"
#include "roughsim/rng.hpp"

namespace roughsim {

enum class SchemeTag { euler, rdonsker_left, rdonsker_matched, hybrid, cholesky, log_stock, variance };

inline std::string to_string(SchemeTag s) {
  switch (s) {
    case SchemeTag::euler: return "euler";
    case SchemeTag::rdonsker_left: return "rdonsker_left";
    case SchemeTag::rdonsker_matched: return "rdonsker_matched";
    case SchemeTag::hybrid: return "hybrid";
    case SchemeTag::cholesky: return "cholesky";
    case SchemeTag::log_stock: return "log_stock";
    case SchemeTag::variance: return "variance";
  }
  return "unknown";
}

enum class EvalMode { left_point, moment_matched };

inline std::string to_string(EvalMode m) {
  return m == EvalMode::left_point ? "left_point" : "moment_matched";
}

/// Run telemetry attached to a path set.
struct Diagnostics {
  std::size_t truncations = 0;  // Euler steps whose state left the diffusion domain
  std::size_t clamps = 0;       // variance cells clamped at zero
  std::vector<std::size_t> failed_paths;
};

/// M x (n+1) process values on a grid, one row per path.
struct PathSet {
  PathSet(Matrix v, Grid g, SchemeTag tag = SchemeTag::euler, std::uint64_t s = 0,
          ConvolutionMethod m = ConvolutionMethod::fft)
      : values(std::move(v)), grid(g), scheme(tag), seed(s), method(m) {}

  Matrix values;
  Grid grid;
  SchemeTag scheme = SchemeTag::euler;
  std::uint64_t seed = 0;
  ConvolutionMethod method = ConvolutionMethod::fft;
  Diagnostics diagnostics;
  std::optional<KernelSpec> kernel;  // set for Volterra paths
  bool diffusion_driver = false;

  std::size_t paths() const noexcept { return values.rows(); }
};

/// dY = b(Y) dt + a(Y) dW on the state domain [lower, upper].
struct DiffusionSpec {
  std::function<double(double)> drift;
  std::function<double(double)> diffusion;
  double y0 = 0.0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

struct Brownian {};

using Driver = std::variant<Brownian, DiffusionSpec>;

inline DiffusionSpec cir_diffusion(double kappa, double theta, double vol_of_vol, double y0) {
  DiffusionSpec s;
  s.drift = [kappa, theta](double y) { return kappa * (theta - y); };
  s.diffusion = [vol_of_vol](double y) { return vol_of_vol * std::sqrt(y); };
  s.y0 = y0;
  s.lower = 0.0;
  return s;
}

/// Sampled check of |b(x)-b(y)| <= c_b |x-y| and |a(x)-a(y)| <= c_a sqrt|x-y|
/// on a uniform grid of [lo, hi] (inside the domain).
inline bool check_coefficients(const DiffusionSpec& s, double c_b, double c_a, double lo,
                               double hi, std::size_t samples = 64) {
  std::vector<double> x(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
  }
  for (std::size_t i = 0; i < samples; ++i) {
    for (std::size_t j = i + 1; j < samples; ++j) {
      const double h = x[j] - x[i];
      if (std::abs(s.drift(x[j]) - s.drift(x[i])) > c_b * h * (1 + 1e-12)) return false;
      if (std::abs(s.diffusion(x[j]) - s.diffusion(x[i])) > c_a * std::sqrt(h) * (1 + 1e-12)) {
        return false;
      }
    }
  }
  return true;
}

/// One Euler increment; the diffusion coefficient is evaluated at the state
/// projected onto the domain (full truncation for square-root diffusions).
inline double euler_increment(const DiffusionSpec& s, double y, double dt, double sqrt_dt,
                              double zeta, std::size_t& truncations) {
  const double inside = std::clamp(y, s.lower, s.upper);
  if (inside != y) ++truncations;
  return s.drift(y) * dt + s.diffusion(inside) * sqrt_dt * zeta;
}

namespace detail {

// Euler row: y has n + 1 entries. Returns false when a non-finite value appears.
inline bool euler_row(const DiffusionSpec& s, std::span<const double> zeta, double dt,
                      std::span<double> y, std::size_t& truncations) {
  const double sdt = std::sqrt(dt);
  y[0] = s.y0;
  for (std::size_t i = 1; i < y.size(); ++i) {
    y[i] = y[i - 1] + euler_increment(s, y[i - 1], dt, sdt, zeta[i - 1], truncations);
    if (!std::isfinite(y[i])) {
      std::fill(y.begin() + static_cast<std::ptrdiff_t>(i), y.end(),
                std::numeric_limits<double>::quiet_NaN());
      return false;
    }
  }
  return true;
}

inline void require_shape(const Matrix& m, const Grid& grid, const char* what) {
  if (m.cols() != grid.steps()) {
    throw std::invalid_argument(std::string(what) + ": shock columns must equal grid steps");
  }
}

}  // namespace detail

/// Euler paths of Y driven by the shocks zeta (M x n).
inline PathSet euler_diffusion(const DiffusionSpec& spec, const Matrix& zeta, const Grid& grid) {
  detail::require_shape(zeta, grid, "euler_diffusion");
  const std::size_t m = zeta.rows();
  PathSet out{Matrix(m, grid.steps() + 1), grid, SchemeTag::euler};
  std::vector<std::size_t> truncations(m, 0);
  std::vector<char> failed(m, 0);
  parallel_for(m, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      failed[j] = !detail::euler_row(spec, zeta.row(j), grid.dt(), out.values.row(j), truncations[j]);
    }
  });
  for (std::size_t j = 0; j < m; ++j) {
    out.diagnostics.truncations += truncations[j];
    if (failed[j]) out.diagnostics.failed_paths.push_back(j);
  }
  return out;
}

/// Convolves each row of increments (M x n) with the lag weights.
inline PathSet convolve_gfo(std::span<const double> weights, const Matrix& increments,
                            const Grid& grid, ConvolutionMethod method) {
  if (weights.size() != grid.steps()) {
    throw std::invalid_argument("convolve_gfo: weights length must equal grid steps");
  }
  detail::require_shape(increments, grid, "convolve_gfo");
  const Convolver conv(std::vector<double>(weights.begin(), weights.end()), method);
  const std::size_t m = increments.rows();
  PathSet out{Matrix(m, grid.steps() + 1), grid, SchemeTag::rdonsker_left, 0, method};
  const std::size_t pairs = (m + 1) / 2;
  parallel_for(pairs, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const std::size_t j = 2 * p;
      if (j + 1 < m) {
        conv.apply(increments.row(j), out.values.row(j), increments.row(j + 1),
                   out.values.row(j + 1));
      } else {
        conv.apply(increments.row(j), out.values.row(j));
      }
    }
  });
  return out;
}

inline std::vector<double> lag_weights(const KernelSpec& kernel, const Grid& grid, EvalMode mode) {
  return mode == EvalMode::left_point ? left_point_weights(kernel, grid)
                                      : optimal_eval_weights(kernel, grid);
}

/// rDonsker approximation of the Volterra process G^alpha Y on the grid.
inline PathSet rdonsker_volterra(const KernelSpec& kernel, const Driver& driver,
                                 const Matrix& zeta, const Grid& grid, EvalMode mode,
                                 ConvolutionMethod method) {
  const bool brownian = std::holds_alternative<Brownian>(driver);
  validate_kernel(kernel, brownian);
  if (mode == EvalMode::moment_matched && !brownian) {
    throw ConfigError("rdonsker: moment-matched weights require a Brownian driver");
  }
  detail::require_shape(zeta, grid, "rdonsker_volterra");
  Matrix increments(zeta.rows(), zeta.cols());
  Diagnostics diag;
  if (brownian) {
    const double sdt = std::sqrt(grid.dt());
    for (std::size_t j = 0; j < zeta.rows(); ++j) {
      for (std::size_t i = 0; i < zeta.cols(); ++i) increments(j, i) = sdt * zeta(j, i);
    }
  } else {
    const PathSet y = euler_diffusion(std::get<DiffusionSpec>(driver), zeta, grid);
    diag = y.diagnostics;
    for (std::size_t j = 0; j < zeta.rows(); ++j) {
      for (std::size_t i = 0; i < zeta.cols(); ++i) {
        increments(j, i) = y.values(j, i + 1) - y.values(j, i);
      }
    }
  }
  PathSet out = convolve_gfo(lag_weights(kernel, grid, mode), increments, grid, method);
  out.scheme = mode == EvalMode::left_point ? SchemeTag::rdonsker_left : SchemeTag::rdonsker_matched;
  out.diagnostics = std::move(diag);
  out.kernel = kernel;
  out.diffusion_driver = !brownian;
  return out;
}

/// Hybrid scheme (kappa = 1) for the Riemann-Liouville kernel. Lags m >= 2
/// use the kernel at the optimal point b*_m, i.e. the step average
/// dt^alpha (m^{alpha+1} - (m-1)^{alpha+1}) / (alpha+1); lag 1 is replaced by
/// the exact last-interval integral I = c zeta + s eta, eta independent.
struct HybridScheme {
  std::vector<double> weights;  // lag weights, weights[0] = 0
  double c = 0.0;               // Cov(I, zeta)
  double s = 0.0;               // residual standard deviation of I
};

inline HybridScheme hybrid_weights(double hurst, const Grid& grid) {
  detail::require(hurst > 0.0 && hurst < 1.0, "hybrid: hurst must lie in (0, 1)");
  const double alpha = hurst - 0.5;
  const double dt = grid.dt();
  const std::size_t n = grid.steps();
  HybridScheme h;
  h.weights.assign(n, 0.0);
  const double scale = std::pow(dt, alpha) / (alpha + 1.0);
  for (std::size_t m = 2; m <= n; ++m) {
    h.weights[m - 1] =
        scale * detail::power_difference(static_cast<double>(m - 1), static_cast<double>(m), alpha + 1.0);
  }
  h.c = std::pow(dt, alpha + 0.5) / (alpha + 1.0);
  const double var = std::pow(dt, 2.0 * alpha + 1.0) / (2.0 * alpha + 1.0);
  h.s = std::sqrt(std::max(0.0, var - h.c * h.c));
  return h;
}

namespace detail {

// Adds the last-interval term to a convolution row (n + 1 entries).
inline void add_hybrid_last_interval(const HybridScheme& h, std::span<const double> zeta,
                                     std::span<const double> eta, std::span<double> out) {
  for (std::size_t i = 1; i < out.size(); ++i) out[i] += h.c * zeta[i - 1] + h.s * eta[i - 1];
}

}  // namespace detail

/// Hybrid paths with an explicit auxiliary Gaussian matrix eta (M x n).
inline PathSet hybrid_scheme_rl(double hurst, const Matrix& zeta, const Matrix& eta,
                                const Grid& grid, ConvolutionMethod method = ConvolutionMethod::fft) {
  detail::require_shape(zeta, grid, "hybrid_scheme_rl");
  detail::require_shape(eta, grid, "hybrid_scheme_rl");
  if (eta.rows() != zeta.rows()) throw std::invalid_argument("hybrid_scheme_rl: eta rows differ");
  const HybridScheme h = hybrid_weights(hurst, grid);
  const double sdt = std::sqrt(grid.dt());
  Matrix increments(zeta.rows(), zeta.cols());
  for (std::size_t j = 0; j < zeta.rows(); ++j) {
    for (std::size_t i = 0; i < zeta.cols(); ++i) increments(j, i) = sdt * zeta(j, i);
  }
  PathSet out = convolve_gfo(h.weights, increments, grid, method);
  for (std::size_t j = 0; j < zeta.rows(); ++j) {
    detail::add_hybrid_last_interval(h, zeta.row(j), eta.row(j), out.values.row(j));
  }
  out.scheme = SchemeTag::hybrid;
  out.kernel = rl_from_hurst(hurst);
  return out;
}

/// Hybrid paths; the auxiliary Gaussians come from a dedicated stream of seed.
inline PathSet hybrid_scheme_rl(double hurst, const Matrix& zeta, const Grid& grid,
                                std::uint64_t seed) {
  Matrix eta(zeta.rows(), zeta.cols());
  for (std::size_t j = 0; j < zeta.rows(); ++j) {
    auto row = eta.row(j);
    for (std::size_t i = 0; i < row.size(); ++i) {
      row[i] = normal_pair(random_block(seed, Stream::hybrid_aux, j, i))[0];
    }
  }
  PathSet out = hybrid_scheme_rl(hurst, zeta, eta, grid);
  out.seed = seed;
  return out;
}

/// Exact covariance Cov(Z_{t_i}, Z_{t_j}), i, j = 1..n, of Z = int g(t-s) dW_s.
inline Matrix volterra_covariance(const KernelSpec& kernel, const Grid& grid) {
  validate_kernel(kernel);
  const std::size_t n = grid.steps();
  Matrix c(n, n);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= i; ++j) {
      const double v = kernel_product_integral(kernel, grid.time(i) - grid.time(j), grid.time(j));
      c(i - 1, j - 1) = v;
      c(j - 1, i - 1) = v;
    }
  }
  return c;
}

/// Covariance of a convolution scheme with lag weights w on a Brownian
/// driver: dt sum_{k <= min(i,j)} w_{i-k+1} w_{j-k+1}.
inline Matrix convolution_covariance(std::span<const double> w, const Grid& grid) {
  const std::size_t n = grid.steps();
  Matrix c(n, n);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t k = 1; k <= j; ++k) s += w[i - k] * w[j - k];
      c(i - 1, j - 1) = s * grid.dt();
      c(j - 1, i - 1) = c(i - 1, j - 1);
    }
  }
  return c;
}

/// Lower Cholesky factor. Retries once with diagonal jitter 1e-12 and throws
/// std::runtime_error if the matrix is still not positive definite.
inline Matrix cholesky_factor(const Matrix& a, double jitter = 1e-12) {
  if (a.rows() != a.cols()) throw std::invalid_argument("cholesky_factor: matrix must be square");
  const std::size_t n = a.rows();
  auto attempt = [&](double shift, Matrix& l) {
    for (std::size_t j = 0; j < n; ++j) {
      double d = a(j, j) + shift;
      for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
      if (!(d > 0.0)) return false;
      l(j, j) = std::sqrt(d);
      for (std::size_t i = j + 1; i < n; ++i) {
        double v = a(i, j);
        for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
        l(i, j) = v / l(j, j);
      }
    }
    return true;
  };
  Matrix l(n, n);
  if (attempt(0.0, l)) return l;
  l = Matrix(n, n);
  if (attempt(jitter, l)) return l;
  throw std::runtime_error("cholesky_factor: covariance matrix is not positive definite");
}

inline constexpr std::size_t kCholeskyMaxSteps = 512;

/// Exact Gaussian samples of the Riemann-Liouville Volterra process on the grid.
inline PathSet cholesky_exact_rl(const KernelSpec& kernel, const Grid& grid, std::size_t paths,
                                 std::uint64_t seed) {
  detail::require(is_riemann_liouville(kernel), "cholesky_exact_rl: kernel must be Riemann-Liouville");
  detail::require(grid.steps() <= kCholeskyMaxSteps, "cholesky_exact_rl: at most 512 steps");
  const std::size_t n = grid.steps();
  const Matrix l = cholesky_factor(volterra_covariance(kernel, grid));
  PathSet out{Matrix(paths, n + 1), grid, SchemeTag::cholesky, seed};
  out.kernel = kernel;
  parallel_for(paths, [&](std::size_t begin, std::size_t end) {
    std::vector<double> z(n + 1);
    for (std::size_t j = begin; j < end; ++j) {
      for (std::size_t k = 0; 2 * k < n; ++k) {
        const auto pair = normal_pair(random_block(seed, Stream::exact, j, k));
        z[2 * k] = pair[0];
        z[2 * k + 1] = pair[1];
      }
      auto row = out.values.row(j);
      row[0] = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double v = 0.0;
        for (std::size_t k = 0; k <= i; ++k) v += l(i, k) * z[k];
        row[i + 1] = v;
      }
    }
  });
  return out;
}

}  // namespace roughsim
