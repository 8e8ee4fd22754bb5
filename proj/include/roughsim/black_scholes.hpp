#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace roughsim {

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

inline double norm_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

/// Undiscounted Black-Scholes call on a forward with total variance sigma^2 T.
inline double bs_call(double forward, double strike, double total_variance) {
  if (!(total_variance > 0.0)) return std::max(forward - strike, 0.0);
  const double sd = std::sqrt(total_variance);
  const double d1 = (std::log(forward / strike) + 0.5 * total_variance) / sd;
  const double d2 = d1 - sd;
  return forward * norm_cdf(d1) - strike * norm_cdf(d2);
}

inline double bs_put(double forward, double strike, double total_variance) {
  if (!(total_variance > 0.0)) return std::max(strike - forward, 0.0);
  const double sd = std::sqrt(total_variance);
  const double d1 = (std::log(forward / strike) + 0.5 * total_variance) / sd;
  const double d2 = d1 - sd;
  return strike * norm_cdf(-d2) - forward * norm_cdf(-d1);
}

/// Black-Scholes volatility of an undiscounted call price. Throws
/// std::domain_error when the price lies outside (intrinsic, forward) or the
/// root falls outside sigma in [1e-6, 5].
inline double implied_vol(double price, double forward, double strike, double maturity) {
  if (!(forward > 0.0) || !(strike > 0.0) || !(maturity > 0.0)) {
    throw std::domain_error("implied_vol: forward, strike and maturity must be positive");
  }
  const double intrinsic = std::max(forward - strike, 0.0);
  if (!(price > intrinsic) || !(price < forward)) {
    throw std::domain_error("implied_vol: price outside no-arbitrage bounds");
  }
  // Invert the out-of-the-money side; the in-the-money price carries the
  // intrinsic value, which swamps the time value in rounding.
  const bool use_put = strike < forward;
  const double target = use_put ? price - (forward - strike) : price;
  auto f = [&](double sigma) {
    const double w = sigma * sigma * maturity;
    return (use_put ? bs_put(forward, strike, w) : bs_call(forward, strike, w)) - target;
  };
  double lo = 1e-6, hi = 5.0;
  const double flo = f(lo), fhi = f(hi);
  if (flo > 0.0 || fhi < 0.0) throw std::domain_error("implied_vol: no root in [1e-6, 5]");
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  const double sqrt_t = std::sqrt(maturity);
  double sigma = std::clamp(std::sqrt(2.0 * std::abs(std::log(forward / strike)) / maturity) +
                                0.2, lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double fs = f(sigma);
    if (fs == 0.0) return sigma;
    if (fs < 0.0) {
      lo = sigma;
    } else {
      hi = sigma;
    }
    const double sd = sigma * sqrt_t;
    const double d1 = (std::log(forward / strike) + 0.5 * sd * sd) / sd;
    const double vega = forward * norm_pdf(d1) * sqrt_t;
    double next = vega > 0.0 ? sigma - fs / vega : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - sigma) < 1e-15 * sigma || hi - lo < 1e-15 * hi) return next;
    sigma = next;
  }
  return sigma;
}

}  // namespace roughsim
