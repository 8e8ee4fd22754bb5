#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "roughsim/errors.hpp"
#include "roughsim/grid.hpp"
#include "roughsim/quadrature.hpp"

namespace roughsim {

/// g(u) = u^alpha.
struct RiemannLiouville {
  double alpha = 0.0;
  friend bool operator==(const RiemannLiouville&, const RiemannLiouville&) = default;
};

/// g(u) = u^alpha e^{beta u}, beta <= 0 (signed decay rate).
struct GammaFractional {
  double alpha = 0.0;
  double beta = -1.0;
  friend bool operator==(const GammaFractional&, const GammaFractional&) = default;
};

/// g(u) = u^alpha (1 + u)^{beta - alpha}, beta < -1.
struct PowerLaw {
  double alpha = 0.0;
  double beta = -2.0;
  friend bool operator==(const PowerLaw&, const PowerLaw&) = default;
};

using KernelSpec = std::variant<RiemannLiouville, GammaFractional, PowerLaw>;

inline KernelSpec rl_from_hurst(double hurst) { return RiemannLiouville{hurst - 0.5}; }

inline double kernel_alpha(const KernelSpec& k) {
  return std::visit([](const auto& v) { return v.alpha; }, k);
}

inline bool is_riemann_liouville(const KernelSpec& k) {
  return std::holds_alternative<RiemannLiouville>(k);
}

inline std::string kernel_name(const KernelSpec& k) {
  if (std::holds_alternative<RiemannLiouville>(k)) return "rl";
  if (std::holds_alternative<GammaFractional>(k)) return "gamma";
  return "powerlaw";
}

/// Throws ConfigError unless the parameters lie in the admissible range.
/// brownian_driver additionally requires alpha > -1/2 (square integrability).
inline void validate_kernel(const KernelSpec& k, bool brownian_driver = true) {
  const double alpha = kernel_alpha(k);
  detail::require(std::isfinite(alpha) && alpha > -1.0 && alpha < 1.0,
                  "kernel: alpha must lie in (-1, 1)");
  if (brownian_driver) {
    detail::require(alpha > -0.5, "kernel: alpha must exceed -1/2 for a Brownian driver");
  }
  if (const auto* g = std::get_if<GammaFractional>(&k)) {
    detail::require(std::isfinite(g->beta) && g->beta <= 0.0,
                    "kernel: gamma rate beta must be <= 0");
  }
  if (const auto* p = std::get_if<PowerLaw>(&k)) {
    detail::require(std::isfinite(p->beta) && p->beta < -1.0,
                    "kernel: power-law beta must be < -1");
  }
}

namespace detail {

// Slowly varying factor L(u) with g(u) = u^alpha L(u).
inline double slow_factor(const KernelSpec& k, double u) {
  if (const auto* g = std::get_if<GammaFractional>(&k)) return std::exp(g->beta * u);
  if (const auto* p = std::get_if<PowerLaw>(&k)) return std::pow(1.0 + u, p->beta - p->alpha);
  return 1.0;
}

// b^c - a^c for 0 <= a < b, c > 0, without cancellation when a is close to b.
inline double power_difference(double a, double b, double c) {
  if (a <= 0.0) return std::pow(b, c);
  return -std::pow(b, c) * std::expm1(c * std::log(a / b));
}

}  // namespace detail

inline double eval_g(const KernelSpec& k, double u) {
  const double alpha = kernel_alpha(k);
  if (!(u >= 0.0)) throw std::domain_error("eval_g: argument must be nonnegative");
  if (u == 0.0) {
    if (alpha < 0.0) throw std::domain_error("eval_g: kernel is singular at 0");
    return alpha == 0.0 ? 1.0 : 0.0;
  }
  return std::pow(u, alpha) * detail::slow_factor(k, u);
}

/// G(t) = integral of g over [0, t].
inline double eval_G(const KernelSpec& k, double t) {
  if (!(t >= 0.0)) throw std::domain_error("eval_G: argument must be nonnegative");
  const double alpha = kernel_alpha(k);
  if (is_riemann_liouville(k)) return std::pow(t, alpha + 1.0) / (alpha + 1.0);
  return detail::power_weighted_integral(
      alpha, [&](double u) { return detail::slow_factor(k, u); }, 0.0, t);
}

namespace detail {

inline double squared_integral_quadrature(const KernelSpec& k, double a, double b) {
  const double alpha = kernel_alpha(k);
  return power_weighted_integral(
      2.0 * alpha,
      [&](double u) {
        const double l = slow_factor(k, u);
        return l * l;
      },
      a, b);
}

}  // namespace detail

/// Integral of g(u)^2 over [a, b].
inline double squared_kernel_integral(const KernelSpec& k, double a, double b) {
  if (!(a >= 0.0) || !(b > a)) {
    throw std::invalid_argument("squared_kernel_integral: need 0 <= a < b");
  }
  if (is_riemann_liouville(k)) {
    const double two_h = 2.0 * kernel_alpha(k) + 1.0;
    return detail::power_difference(a, b, two_h) / two_h;
  }
  return detail::squared_integral_quadrature(k, a, b);
}

/// Integral of g(lag + v) g(v) over v in [0, s]: the covariance of the
/// Volterra process at times s and s + lag.
inline double kernel_product_integral(const KernelSpec& k, double lag, double s) {
  if (!(lag >= 0.0) || !(s >= 0.0)) {
    throw std::invalid_argument("kernel_product_integral: need lag >= 0 and s >= 0");
  }
  if (s == 0.0) return 0.0;
  if (lag == 0.0) return squared_kernel_integral(k, 0.0, s);
  const double alpha = kernel_alpha(k);
  return detail::power_weighted_integral(
      alpha, [&](double v) { return detail::slow_factor(k, v) * eval_g(k, lag + v); }, 0.0, s);
}

/// Moment-matched lag weights w_k = sqrt((n/T) * int_{t_{k-1}}^{t_k} g^2), k = 1..n.
inline std::vector<double> optimal_eval_weights(const KernelSpec& k, const Grid& grid) {
  const std::size_t n = grid.steps();
  const double scale = static_cast<double>(n) / grid.horizon();
  std::vector<double> w(n);
  for (std::size_t i = 1; i <= n; ++i) {
    w[i - 1] = std::sqrt(scale * squared_kernel_integral(k, grid.time(i - 1), grid.time(i)));
  }
  return w;
}

/// Left-point lag weights w_k = g(t_k), k = 1..n.
inline std::vector<double> left_point_weights(const KernelSpec& k, const Grid& grid) {
  const std::size_t n = grid.steps();
  std::vector<double> w(n);
  for (std::size_t i = 1; i <= n; ++i) w[i - 1] = eval_g(k, grid.time(i));
  return w;
}

}  // namespace roughsim
