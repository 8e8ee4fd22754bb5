#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "roughsim/errors.hpp"

namespace roughsim {

/// Uniform partition t_i = i T / n of [0, T].
class Grid {
 public:
  Grid(std::size_t steps, double horizon) : steps_(steps), horizon_(horizon) {
    detail::require(steps >= 1, "grid: number of steps must be >= 1");
    detail::require(std::isfinite(horizon) && horizon > 0.0, "grid: horizon must be positive");
  }

  std::size_t steps() const noexcept { return steps_; }
  double horizon() const noexcept { return horizon_; }
  double dt() const noexcept { return horizon_ / static_cast<double>(steps_); }

  /// t_0 = 0 and t_n = T exactly.
  double time(std::size_t i) const noexcept {
    if (i >= steps_) return horizon_;
    return horizon_ * static_cast<double>(i) / static_cast<double>(steps_);
  }

  std::vector<double> times() const {
    std::vector<double> t(steps_ + 1);
    for (std::size_t i = 0; i <= steps_; ++i) t[i] = time(i);
    return t;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t steps_;
  double horizon_;
};

}  // namespace roughsim
