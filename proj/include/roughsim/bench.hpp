#pragma once

#include <algorithm>
#include <optional>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "roughsim/convolution.hpp"
#include "roughsim/kernels.hpp"
#include "roughsim/models.hpp"
#include "roughsim/parallel.hpp"
#include "roughsim/pricing.hpp"
#include "roughsim/shocks.hpp"
#include "roughsim/stats.hpp"
#include "roughsim/volterra.hpp"

namespace roughsim {

enum class BenchScheme { rdonsker_fft, rdonsker_naive, hybrid, markovian_euler };

inline std::string to_string(BenchScheme s) {
  switch (s) {
    case BenchScheme::rdonsker_fft: return "rdonsker-fft";
    case BenchScheme::rdonsker_naive: return "rdonsker-naive";
    case BenchScheme::hybrid: return "hybrid";
    case BenchScheme::markovian_euler: return "markovian-euler";
  }
  return "unknown";
}

/// One-factor Markovian Bergomi baseline: the driver is the Ornstein-Uhlenbeck
/// process dZ = -kappa Z dt + dW stepped exactly, V = xi0 exp(2 nu Z - 2 nu^2 Var Z_t).
struct MarkovianBergomi {
  double xi0 = 0.04;
  double nu = 1.0;
  double kappa = 1.0;
  double rho = -0.7;
};

/// Terminal log-stock values of the Markovian baseline, same Euler log-stock step.
inline std::vector<double> markovian_log_stock(const MarkovianBergomi& model, std::size_t paths,
                                               const Grid& grid, std::uint64_t seed) {
  const std::size_t n = grid.steps();
  const double dt = grid.dt();
  const double decay = std::exp(-model.kappa * dt);
  const double step_sd = std::sqrt(-std::expm1(-2.0 * model.kappa * dt) / (2.0 * model.kappa));
  std::vector<double> compensator(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double var = -std::expm1(-2.0 * model.kappa * grid.time(i)) / (2.0 * model.kappa);
    compensator[i] = 2.0 * model.nu * model.nu * var;
  }
  const NoiseConfig noise{Distribution::gaussian, paths, n, model.rho, seed, false};
  const double rb = rho_bar(model.rho);
  std::vector<double> out(paths);
  parallel_for(paths, [&](std::size_t begin, std::size_t end) {
    std::vector<double> zeta(n), perp(n);
    for (std::size_t j = begin; j < end; ++j) {
      shock_rows(noise, 1, j, zeta, perp, {});
      double z = 0.0, x = 0.0;
      double v = model.xi0;
      for (std::size_t i = 0; i < n; ++i) {
        x += detail::log_stock_step(v, dt, model.rho * zeta[i] + rb * perp[i]);
        z = decay * z + step_sd * zeta[i];
        v = model.xi0 * std::exp(2.0 * model.nu * z - compensator[i + 1]);
      }
      out[j] = x;
    }
  });
  return out;
}

/// Generates paths of the driving process only (shocks plus the scheme) and
/// returns a checksum so the work cannot be optimised away.
inline double generate_paths(BenchScheme scheme, std::size_t n, std::size_t paths,
                             std::uint64_t seed, double hurst = 0.3) {
  const Grid grid(n, 1.0);
  const NoiseConfig noise{Distribution::gaussian, paths, n, 0.0, seed, false};
  const double sdt = std::sqrt(grid.dt());
  std::vector<double> sums(paths, 0.0);
  if (scheme == BenchScheme::markovian_euler) {
    const double decay = std::exp(-grid.dt());
    const double step_sd = std::sqrt(-std::expm1(-2.0 * grid.dt()) / 2.0);
    parallel_for(paths, [&](std::size_t begin, std::size_t end) {
      std::vector<double> zeta(n);
      for (std::size_t j = begin; j < end; ++j) {
        shock_rows(noise, 1, j, zeta, {}, {});
        double z = 0.0, s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          z = decay * z + step_sd * zeta[i];
          s += z;
        }
        sums[j] = s;
      }
    });
    return pairwise_sum(sums);
  }
  const KernelSpec kernel = rl_from_hurst(hurst);
  std::optional<HybridScheme> hybrid;
  std::vector<double> weights;
  if (scheme == BenchScheme::hybrid) {
    hybrid = hybrid_weights(hurst, grid);
    weights = hybrid->weights;
  } else {
    weights = optimal_eval_weights(kernel, grid);
  }
  const Convolver conv(weights, scheme == BenchScheme::rdonsker_naive ? ConvolutionMethod::naive
                                                                      : ConvolutionMethod::fft);
  parallel_for((paths + 1) / 2, [&](std::size_t begin, std::size_t end) {
    std::vector<double> z[2], inc[2], eta[2], out[2];
    for (int c = 0; c < 2; ++c) {
      z[c].resize(n);
      inc[c].resize(n);
      eta[c].resize(hybrid ? n : 0);
      out[c].resize(n + 1);
    }
    for (std::size_t p = begin; p < end; ++p) {
      const std::size_t count = std::min<std::size_t>(2, paths - 2 * p);
      for (std::size_t c = 0; c < count; ++c) {
        const std::size_t j = 2 * p + c;
        if (hybrid) {
          shock_rows(noise, 1, j, z[c], {}, {});
          for (std::size_t i = 0; i < n; ++i) {
            eta[c][i] = normal_pair(random_block(seed, Stream::hybrid_aux, j, i))[0];
          }
        } else {
          shock_rows(noise, 1, j, z[c], {}, {});
        }
        for (std::size_t i = 0; i < n; ++i) inc[c][i] = sdt * z[c][i];
      }
      if (count == 2) {
        conv.apply(inc[0], out[0], inc[1], out[1]);
      } else {
        conv.apply(inc[0], out[0]);
      }
      for (std::size_t c = 0; c < count; ++c) {
        if (hybrid) detail::add_hybrid_last_interval(*hybrid, z[c], eta[c], out[c]);
        sums[2 * p + c] = pairwise_sum(out[c]);
      }
    }
  });
  return pairwise_sum(sums);
}

struct BenchRow {
  std::string scheme;
  std::size_t steps = 0;
  std::size_t paths = 0;
  double median_seconds = 0.0;
  std::vector<double> trial_seconds;
};

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

/// Median wall time of trials runs of f().
template <class F>
BenchRow time_trials(const std::string& name, std::size_t steps, std::size_t paths,
                     std::size_t trials, F&& f) {
  BenchRow row;
  row.scheme = name;
  row.steps = steps;
  row.paths = paths;
  volatile double sink = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto start = std::chrono::steady_clock::now();
    sink = sink + f(t);
    row.trial_seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  row.median_seconds = median(row.trial_seconds);
  return row;
}

/// Path-generation timing table over schemes and step counts.
inline std::vector<BenchRow> bench_path_generation(std::span<const BenchScheme> schemes,
                                                   std::span<const std::size_t> steps,
                                                   std::size_t paths, std::size_t trials) {
  std::vector<BenchRow> rows;
  for (BenchScheme s : schemes) {
    for (std::size_t n : steps) {
      rows.push_back(time_trials(to_string(s), n, paths, trials, [&](std::size_t t) {
        return generate_paths(s, n, paths, 1000 + t);
      }));
    }
  }
  return rows;
}

/// Full pipeline (shocks, variance, log-stock) of rough Bergomi with
/// rDonsker-FFT against the Markovian Euler baseline at equal (n, M).
inline std::vector<BenchRow> bench_pipeline(std::size_t n, std::size_t paths, std::size_t trials) {
  const Grid grid(n, 1.0);
  ModelSpec rough{RoughBergomi{ForwardVarianceCurve(0.04), 1.0, 0.3}, -0.7, 1.0};
  MCConfig cfg;
  cfg.num_paths = paths;
  cfg.grid = grid;
  cfg.scheme = Scheme::rdonsker_matched;
  std::vector<BenchRow> rows;
  rows.push_back(time_trials("pipeline/rdonsker-fft", n, paths, trials, [&](std::size_t t) {
    cfg.seed = 2000 + t;
    return simulate_summaries(rough, cfg).log_stock[0];
  }));
  rows.push_back(time_trials("pipeline/markovian-euler", n, paths, trials, [&](std::size_t t) {
    return markovian_log_stock(MarkovianBergomi{}, paths, grid, 2000 + t)[0];
  }));
  return rows;
}

}  // namespace roughsim
