#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "roughsim/errors.hpp"
#include "roughsim/grid.hpp"
#include "roughsim/kernels.hpp"
#include "roughsim/parallel.hpp"
#include "roughsim/volterra.hpp"

namespace roughsim {

/// Piecewise-constant forward variance curve with right-continuous lookup:
/// value(t) = v_k for t_k <= t < t_{k+1}, and v_0 before the first knot.
class ForwardVarianceCurve {
 public:
  ForwardVarianceCurve(double level = 0.04) : knots_{{0.0, level}} { check(); }  // NOLINT
  explicit ForwardVarianceCurve(std::vector<std::pair<double, double>> knots)
      : knots_(std::move(knots)) {
    check();
  }

  double operator()(double t) const {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                               [](double x, const auto& k) { return x < k.first; });
    if (it == knots_.begin()) return knots_.front().second;
    return std::prev(it)->second;
  }

  const std::vector<std::pair<double, double>>& knots() const noexcept { return knots_; }
  bool is_flat() const noexcept { return knots_.size() == 1; }

  friend bool operator==(const ForwardVarianceCurve&, const ForwardVarianceCurve&) = default;

 private:
  void check() const {
    detail::require(!knots_.empty(), "xi0: curve needs at least one knot");
    for (std::size_t i = 0; i < knots_.size(); ++i) {
      detail::require(std::isfinite(knots_[i].second) && knots_[i].second > 0.0,
                      "xi0: forward variance must be positive");
      if (i) detail::require(knots_[i].first > knots_[i - 1].first, "xi0: knot times must increase");
    }
  }

  std::vector<std::pair<double, double>> knots_;
};

struct RoughBergomi {
  ForwardVarianceCurve xi0;
  double nu = 1.0;
  double hurst = 0.3;
};

/// Bergomi model with the kernel (t-s)^{H-1/2} e^{-beta_decay (t-s)}.
struct GammaBergomi {
  ForwardVarianceCurve xi0;
  double nu = 1.0;
  double hurst = 0.3;
  double beta_decay = 1.0;
};

/// V = eta + int g(t-s) dY_s with a CIR driver Y.
struct RoughHestonGJRS {
  double eta = 0.04;
  double kappa = 1.0;
  double theta = 0.04;
  double vol_of_vol = 0.1;
  double y0 = 0.04;
  double hurst = 0.3;
};

struct ModelSpec {
  std::variant<RoughBergomi, GammaBergomi, RoughHestonGJRS> variant;
  double rho = 0.0;
  double spot = 1.0;
};

inline std::string model_name(const ModelSpec& m) {
  switch (m.variant.index()) {
    case 0: return "rbergomi";
    case 1: return "gbergomi";
    default: return "rheston_gjrs";
  }
}

inline double model_hurst(const ModelSpec& m) {
  return std::visit([](const auto& v) { return v.hurst; }, m.variant);
}

inline bool is_bergomi(const ModelSpec& m) { return m.variant.index() != 2; }

/// Normalising constant in the Wick exponential (see README).
inline double c_h(double hurst) { return std::sqrt(2.0 * hurst); }

inline void validate(const ModelSpec& m) {
  detail::require(std::isfinite(m.rho) && std::abs(m.rho) <= 1.0, "model: |rho| must be <= 1");
  detail::require(std::isfinite(m.spot) && m.spot > 0.0, "model: spot must be positive");
  const double h = model_hurst(m);
  detail::require(h > 0.0 && h < 1.0, "model: hurst must lie in (0, 1)");
  if (const auto* b = std::get_if<RoughBergomi>(&m.variant)) {
    detail::require(b->nu >= 0.0, "model: nu must be >= 0");
  } else if (const auto* g = std::get_if<GammaBergomi>(&m.variant)) {
    detail::require(g->nu >= 0.0, "model: nu must be >= 0");
    detail::require(g->beta_decay > 0.0, "model: gamma beta must be > 0");
  } else {
    const auto& r = std::get<RoughHestonGJRS>(m.variant);
    detail::require(r.eta > 0.0 && r.kappa > 0.0 && r.theta > 0.0 && r.y0 > 0.0,
                    "model: eta, kappa, theta and y0 must be positive");
    detail::require(r.vol_of_vol >= 0.0, "model: vol-of-vol must be >= 0");
    detail::require(2.0 * r.kappa * r.theta > r.vol_of_vol * r.vol_of_vol,
                    "model: Feller condition 2 kappa theta > xi^2 violated");
  }
}

inline KernelSpec model_kernel(const ModelSpec& m) {
  if (const auto* g = std::get_if<GammaBergomi>(&m.variant)) {
    return GammaFractional{g->hurst - 0.5, -g->beta_decay};
  }
  return RiemannLiouville{model_hurst(m) - 0.5};
}

inline Driver model_driver(const ModelSpec& m) {
  if (const auto* r = std::get_if<RoughHestonGJRS>(&m.variant)) {
    return cir_diffusion(r->kappa, r->theta, r->vol_of_vol, r->y0);
  }
  return Brownian{};
}

/// Grid-dependent part of the map phi -> V, computed once and shared.
class VarianceMap {
 public:
  VarianceMap(const ModelSpec& model, const Grid& grid) : grid_(grid) {
    validate(model);
    const std::size_t n = grid.steps();
    level_.assign(n + 1, 0.0);
    compensator_.assign(n + 1, 0.0);
    if (const auto* r = std::get_if<RoughHestonGJRS>(&model.variant)) {
      heston_ = true;
      eta_ = r->eta;
      return;
    }
    const auto [xi0, nu] = std::visit(
        [](const auto& v) -> std::pair<ForwardVarianceCurve, double> {
          if constexpr (std::is_same_v<std::decay_t<decltype(v)>, RoughHestonGJRS>) {
            return {ForwardVarianceCurve(), 0.0};
          } else {
            return {v.xi0, v.nu};
          }
        },
        model.variant);
    const KernelSpec kernel = model_kernel(model);
    const double ch = c_h(model_hurst(model));
    scale_ = 2.0 * nu * ch;
    double q = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      if (i > 0) q += squared_kernel_integral(kernel, grid.time(i - 1), grid.time(i));
      level_[i] = xi0(grid.time(i));
      compensator_[i] = 2.0 * nu * nu * ch * ch * q;
    }
  }

  /// V at grid index i given the Volterra value phi; counts zero clamps.
  double operator()(std::size_t i, double phi, std::size_t& clamps) const {
    if (heston_) {
      const double v = eta_ + phi;
      if (v < 0.0) {
        ++clamps;
        return 0.0;
      }
      return v;
    }
    return level_[i] * std::exp(scale_ * phi - compensator_[i]);
  }

  void apply(std::span<const double> phi, std::span<double> v, std::size_t& clamps) const {
    for (std::size_t i = 0; i < phi.size(); ++i) v[i] = (*this)(i, phi[i], clamps);
  }

  const Grid& grid() const noexcept { return grid_; }

 private:
  Grid grid_;
  bool heston_ = false;
  double eta_ = 0.0;
  double scale_ = 0.0;
  std::vector<double> level_;
  std::vector<double> compensator_;
};

/// Variance paths V = Phi(phi) from Volterra paths of the model's kernel.
inline PathSet phi_apply(const ModelSpec& model, const PathSet& volterra, const Grid& grid) {
  if (volterra.values.cols() != grid.steps() + 1) {
    throw std::invalid_argument("phi_apply: path set does not match the grid");
  }
  if (volterra.kernel && !(*volterra.kernel == model_kernel(model))) {
    throw ConfigError("phi_apply: paths were generated with a different kernel");
  }
  if (volterra.kernel && volterra.diffusion_driver == is_bergomi(model)) {
    throw ConfigError("phi_apply: driver type does not match the model");
  }
  const VarianceMap map(model, grid);
  const std::size_t m = volterra.paths();
  PathSet out{Matrix(m, grid.steps() + 1), grid, SchemeTag::variance, volterra.seed,
              volterra.method};
  out.diagnostics = volterra.diagnostics;
  out.kernel = volterra.kernel;
  out.diffusion_driver = volterra.diffusion_driver;
  std::vector<std::size_t> clamps(m, 0);
  parallel_for(m, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) map.apply(volterra.values.row(j), out.values.row(j), clamps[j]);
  });
  for (auto c : clamps) out.diagnostics.clamps += c;
  return out;
}

}  // namespace roughsim
