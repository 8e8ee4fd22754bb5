#pragma once

#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

namespace roughsim::detail {

// Below this fraction of the upper limit the integral is done analytically.
inline constexpr double kGradingFloor = 1e-13;

/// Integral of u^p h(u) over [a, b], with p > -1 and h smooth on [0, b].
/// [a, b] is cut into dyadic pieces [x, 2x] towards the origin; on each piece
/// the distance to the singularity is at least the piece length, so a fixed
/// 20-point Gauss-Legendre rule converges to rounding. The last piece [0, e]
/// uses h interpolated linearly, which integrates against u^p exactly.
template <class H>
double power_weighted_integral(double p, H&& h, double a, double b) {
  using Rule = boost::math::quadrature::gauss<double, 20>;
  if (!(b > a)) return 0.0;
  auto f = [&](double u) { return p == 0.0 ? h(u) : std::pow(u, p) * h(u); };
  const double floor = a > 0.0 ? a : b * kGradingFloor;
  double sum = 0.0;
  double hi = b;
  while (hi > 2.0 * floor) {
    const double lo = 0.5 * hi;
    sum += Rule::integrate(f, lo, hi);
    hi = lo;
  }
  if (a > 0.0) return sum + Rule::integrate(f, a, hi);
  const double q = p + 1.0;
  const double h0 = h(0.0);
  const double m = std::pow(hi, q);
  return sum + h0 * m / q + (h(hi) - h0) * m / (q + 1.0);
}

}  // namespace roughsim::detail
