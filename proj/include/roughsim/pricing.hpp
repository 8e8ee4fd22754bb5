#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "roughsim/black_scholes.hpp"
#include "roughsim/convolution.hpp"
#include "roughsim/errors.hpp"
#include "roughsim/grid.hpp"
#include "roughsim/models.hpp"
#include "roughsim/parallel.hpp"
#include "roughsim/shocks.hpp"
#include "roughsim/stats.hpp"
#include "roughsim/volterra.hpp"

namespace roughsim {

enum class Scheme { rdonsker_left, rdonsker_matched, hybrid };
enum class VarianceReduction { none, conditional_bs };

inline std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::rdonsker_left: return "rdonsker_left";
    case Scheme::rdonsker_matched: return "rdonsker_matched";
    case Scheme::hybrid: return "hybrid";
  }
  return "unknown";
}

inline std::string to_string(VarianceReduction v) {
  return v == VarianceReduction::none ? "none" : "conditional_bs";
}

struct MCConfig {
  std::size_t num_paths = 10000;
  Grid grid{256, 1.0};
  VarianceReduction variance_reduction = VarianceReduction::none;
  bool antithetic = false;
  Scheme scheme = Scheme::rdonsker_matched;
  std::uint64_t seed = 0;
  ConvolutionMethod method = ConvolutionMethod::fft;
  Distribution distribution = Distribution::gaussian;
};

enum class OptionType { call, put };

inline std::string to_string(OptionType t) { return t == OptionType::call ? "call" : "put"; }

struct Payoff {
  OptionType type = OptionType::call;
  double strike = 1.0;

  double operator()(double spot) const {
    return type == OptionType::call ? std::max(spot - strike, 0.0) : std::max(strike - spot, 0.0);
  }
};

/// Antithetic group size used by the estimator: the conditional estimator
/// integrates out the orthogonal shock, so only the (+,+)/(-,-) pair is useful.
inline std::size_t estimator_group_size(const MCConfig& cfg, double rho) {
  if (!cfg.antithetic) return 1;
  if (cfg.variance_reduction == VarianceReduction::conditional_bs) return 2;
  return std::abs(rho) == 1.0 ? 2 : 4;
}

inline NoiseConfig noise_config(const MCConfig& cfg, double rho) {
  return {cfg.distribution, cfg.num_paths, cfg.grid.steps(), rho, cfg.seed, cfg.antithetic};
}

/// Streams variance paths one pair at a time: shocks, Volterra convolution
/// (two rows per FFT) and the model map, without materialising M x n arrays.
class PathEngine {
 public:
  PathEngine(const ModelSpec& model, const MCConfig& cfg)
      : model_(model), cfg_(cfg), group_(estimator_group_size(cfg, model.rho)),
        map_(model, cfg.grid), conv_(make_convolver()) {
    detail::require(cfg.num_paths >= 1, "mc: paths must be >= 1");
    detail::require(cfg.num_paths % group_ == 0,
                    "mc: antithetic sampling needs paths divisible by " + std::to_string(group_));
  }

  std::size_t group_size() const noexcept { return group_; }
  const MCConfig& config() const noexcept { return cfg_; }
  const ModelSpec& model() const noexcept { return model_; }

  /// visit(j, zeta, perp, V) for every path j; spans are valid during the call.
  /// visit may run concurrently for different j.
  template <class Visit>
  Diagnostics for_each_path(Visit&& visit) const {
    const std::size_t m = cfg_.num_paths;
    const std::size_t n = cfg_.grid.steps();
    const double dt = cfg_.grid.dt();
    const double sdt = std::sqrt(dt);
    const NoiseConfig noise = noise_config(cfg_, model_.rho);
    std::vector<std::size_t> clamps(m, 0), truncations(m, 0);
    std::vector<char> failed(m, 0);
    parallel_for((m + 1) / 2, [&](std::size_t begin, std::size_t end) {
      struct Lane {
        std::vector<double> zeta, perp, eta, inc, y, phi, v;
      };
      Lane lanes[2];
      for (auto& l : lanes) {
        l.zeta.resize(n);
        l.perp.resize(n);
        l.eta.resize(hybrid_ ? n : 0);
        l.inc.resize(n);
        l.y.resize(n + 1);
        l.phi.resize(n + 1);
        l.v.resize(n + 1);
      }
      for (std::size_t p = begin; p < end; ++p) {
        const std::size_t count = std::min<std::size_t>(2, m - 2 * p);
        for (std::size_t c = 0; c < count; ++c) {
          const std::size_t j = 2 * p + c;
          Lane& l = lanes[c];
          shock_rows(noise, group_, j, l.zeta, l.perp, {});
          if (diffusion_) {
            if (!detail::euler_row(*diffusion_, l.zeta, dt, l.y, truncations[j])) failed[j] = 1;
            for (std::size_t i = 0; i < n; ++i) l.inc[i] = l.y[i + 1] - l.y[i];
          } else {
            for (std::size_t i = 0; i < n; ++i) l.inc[i] = sdt * l.zeta[i];
          }
          if (hybrid_) {
            const double sign = variate_signs(group_, j % group_).zeta;
            for (std::size_t i = 0; i < n; ++i) {
              l.eta[i] = sign * normal_pair(random_block(cfg_.seed, Stream::hybrid_aux, j / group_, i))[0];
            }
          }
        }
        if (count == 2) {
          conv_.apply(lanes[0].inc, lanes[0].phi, lanes[1].inc, lanes[1].phi);
        } else {
          conv_.apply(lanes[0].inc, lanes[0].phi);
        }
        for (std::size_t c = 0; c < count; ++c) {
          const std::size_t j = 2 * p + c;
          Lane& l = lanes[c];
          if (hybrid_) detail::add_hybrid_last_interval(*hybrid_, l.zeta, l.eta, l.phi);
          map_.apply(l.phi, l.v, clamps[j]);
          visit(j, std::span<const double>(l.zeta), std::span<const double>(l.perp),
                std::span<const double>(l.v));
        }
      }
    });
    Diagnostics diag;
    for (std::size_t j = 0; j < m; ++j) {
      diag.clamps += clamps[j];
      diag.truncations += truncations[j];
      if (failed[j]) diag.failed_paths.push_back(j);
    }
    if (!diag.failed_paths.empty()) {
      throw std::runtime_error("mc: " + std::to_string(diag.failed_paths.size()) +
                               " path(s) produced non-finite values");
    }
    return diag;
  }

 private:
  Convolver make_convolver() {
    validate(model_);
    const KernelSpec kernel = model_kernel(model_);
    const Driver driver = model_driver(model_);
    if (const auto* d = std::get_if<DiffusionSpec>(&driver)) diffusion_ = *d;
    switch (cfg_.scheme) {
      case Scheme::rdonsker_left:
        return Convolver(left_point_weights(kernel, cfg_.grid), cfg_.method);
      case Scheme::rdonsker_matched:
        if (diffusion_) throw ConfigError("mc: moment-matched weights require a Brownian driver");
        return Convolver(optimal_eval_weights(kernel, cfg_.grid), cfg_.method);
      case Scheme::hybrid:
        if (diffusion_ || !is_riemann_liouville(kernel)) {
          throw ConfigError("mc: the hybrid scheme supports the rough Bergomi model only");
        }
        hybrid_ = hybrid_weights(model_hurst(model_), cfg_.grid);
        return Convolver(hybrid_->weights, cfg_.method);
    }
    throw ConfigError("mc: unknown scheme");
  }

  ModelSpec model_;
  MCConfig cfg_;
  std::size_t group_;
  VarianceMap map_;
  std::optional<DiffusionSpec> diffusion_;
  std::optional<HybridScheme> hybrid_;
  Convolver conv_;
};

namespace detail {

// Euler log-stock increment with the variance frozen at the left end point.
inline double log_stock_step(double v, double dt, double xi) {
  return -0.5 * v * dt + std::sqrt(v * dt) * xi;
}

}  // namespace detail

/// Terminal quantities of every path.
struct PathSummary {
  std::vector<double> log_stock;       // X(T)
  std::vector<double> cond_log_stock;  // X1(T), the volatility-driven part
  std::vector<double> cond_variance;   // Sigma = (1 - rho^2) dt sum_{k<n} V(t_k)
  std::size_t group = 1;
  Diagnostics diagnostics;
  double seconds = 0.0;
};

inline PathSummary simulate_summaries(const ModelSpec& model, const MCConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const PathEngine engine(model, cfg);
  const std::size_t m = cfg.num_paths;
  const double dt = cfg.grid.dt();
  const double rho = model.rho;
  const double rb = rho_bar(rho);
  PathSummary out;
  out.group = engine.group_size();
  out.log_stock.resize(m);
  out.cond_log_stock.resize(m);
  out.cond_variance.resize(m);
  out.diagnostics = engine.for_each_path(
      [&](std::size_t j, std::span<const double> zeta, std::span<const double> perp,
          std::span<const double> v) {
        double x = 0.0, x1 = 0.0, iv = 0.0;
        for (std::size_t i = 0; i < zeta.size(); ++i) {
          const double vi = v[i];
          const double sq = std::sqrt(vi * dt);
          x += -0.5 * vi * dt + sq * (rho * zeta[i] + rb * perp[i]);
          x1 += -0.5 * rho * rho * vi * dt + rho * sq * zeta[i];
          iv += vi;
        }
        out.log_stock[j] = x;
        out.cond_log_stock[j] = x1;
        out.cond_variance[j] = (1.0 - rho * rho) * dt * iv;
      });
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

/// Mean over antithetic groups first, then the estimate over group means.
inline Estimate group_estimate(std::span<const double> values, std::size_t group) {
  if (group <= 1) return estimate_mean(values);
  std::vector<double> means(values.size() / group);
  for (std::size_t g = 0; g < means.size(); ++g) {
    means[g] = pairwise_sum(values.subspan(g * group, group)) / static_cast<double>(group);
  }
  return estimate_mean(means);
}

inline Estimate price_from_summary(const PathSummary& s, const Payoff& payoff, double spot,
                                   VarianceReduction vr) {
  const std::size_t m = s.log_stock.size();
  std::vector<double> values(m);
  for (std::size_t j = 0; j < m; ++j) {
    if (vr == VarianceReduction::conditional_bs) {
      const double forward = spot * std::exp(s.cond_log_stock[j]);
      values[j] = payoff.type == OptionType::call
                      ? bs_call(forward, payoff.strike, s.cond_variance[j])
                      : bs_put(forward, payoff.strike, s.cond_variance[j]);
    } else {
      values[j] = payoff(spot * std::exp(s.log_stock[j]));
    }
  }
  return group_estimate(values, s.group);
}

/// Log-stock paths X(t_i) with X(0) = 0.
inline PathSet simulate_logstock(const ModelSpec& model, const MCConfig& cfg) {
  const PathEngine engine(model, cfg);
  const std::size_t n = cfg.grid.steps();
  const double dt = cfg.grid.dt();
  const double rb = rho_bar(model.rho);
  PathSet out{Matrix(cfg.num_paths, n + 1), cfg.grid, SchemeTag::log_stock, cfg.seed, cfg.method};
  out.diagnostics = engine.for_each_path([&](std::size_t j, std::span<const double> zeta,
                                             std::span<const double> perp,
                                             std::span<const double> v) {
    auto row = out.values.row(j);
    row[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      row[i] = row[i - 1] + detail::log_stock_step(v[i - 1], dt,
                                                   model.rho * zeta[i - 1] + rb * perp[i - 1]);
    }
  });
  return out;
}

/// Variance paths V(t_i) produced by the same engine.
inline PathSet simulate_variance(const ModelSpec& model, const MCConfig& cfg) {
  const PathEngine engine(model, cfg);
  const std::size_t n = cfg.grid.steps();
  PathSet out{Matrix(cfg.num_paths, n + 1), cfg.grid, SchemeTag::variance, cfg.seed, cfg.method};
  out.diagnostics = engine.for_each_path(
      [&](std::size_t j, std::span<const double>, std::span<const double>,
          std::span<const double> v) { std::copy(v.begin(), v.end(), out.values.row(j).begin()); });
  return out;
}

/// Plain Monte-Carlo price of payoff(S_T), S_T = spot e^{X(T)}.
inline Estimate mc_price(const ModelSpec& model, MCConfig cfg, const Payoff& payoff) {
  cfg.variance_reduction = VarianceReduction::none;
  return price_from_summary(simulate_summaries(model, cfg), payoff, model.spot,
                            VarianceReduction::none);
}

/// Conditional Black-Scholes estimate: Black-Scholes price given the volatility path.
inline Estimate conditional_bs_estimate(const ModelSpec& model, MCConfig cfg, const Payoff& payoff) {
  cfg.variance_reduction = VarianceReduction::conditional_bs;
  return price_from_summary(simulate_summaries(model, cfg), payoff, model.spot,
                            VarianceReduction::conditional_bs);
}

/// Estimate of E[e^{X(T)}], which equals 1 for a martingale.
inline Estimate martingale_estimate(const PathSummary& s) {
  std::vector<double> values(s.log_stock.size());
  for (std::size_t j = 0; j < values.size(); ++j) values[j] = std::exp(s.log_stock[j]);
  return group_estimate(values, s.group);
}

struct SmileMetadata {
  std::string model;
  std::string scheme;
  std::string variance_reduction;
  std::size_t paths = 0;
  std::size_t steps = 0;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  bool antithetic = false;
  double runtime_seconds = 0.0;
  std::size_t clamps = 0;
  std::size_t truncations = 0;
};

struct SmileResult {
  std::vector<double> strikes;
  std::vector<Estimate> prices;
  std::vector<std::optional<double>> implied_vols;
  SmileMetadata metadata;
};

/// Call prices and implied volatilities for all strikes on one shared path set.
inline SmileResult smile(const ModelSpec& model, const MCConfig& cfg, std::span<const double> strikes) {
  for (std::size_t i = 0; i < strikes.size(); ++i) {
    detail::require(strikes[i] > 0.0, "smile: strikes must be positive");
    if (i) detail::require(strikes[i] > strikes[i - 1], "smile: strikes must be increasing");
  }
  const auto start = std::chrono::steady_clock::now();
  const PathSummary summary = simulate_summaries(model, cfg);
  SmileResult out;
  out.strikes.assign(strikes.begin(), strikes.end());
  for (double k : strikes) {
    const Estimate e =
        price_from_summary(summary, {OptionType::call, k}, model.spot, cfg.variance_reduction);
    out.prices.push_back(e);
    try {
      out.implied_vols.emplace_back(implied_vol(e.mean, model.spot, k, cfg.grid.horizon()));
    } catch (const std::domain_error&) {
      out.implied_vols.emplace_back(std::nullopt);
    }
  }
  auto& md = out.metadata;
  md.model = model_name(model);
  md.scheme = to_string(cfg.scheme);
  md.variance_reduction = to_string(cfg.variance_reduction);
  md.paths = cfg.num_paths;
  md.steps = cfg.grid.steps();
  md.horizon = cfg.grid.horizon();
  md.seed = cfg.seed;
  md.antithetic = cfg.antithetic;
  md.clamps = summary.diagnostics.clamps;
  md.truncations = summary.diagnostics.truncations;
  md.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace roughsim
