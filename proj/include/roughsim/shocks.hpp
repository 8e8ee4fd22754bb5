#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>

#include "roughsim/errors.hpp"
#include "roughsim/matrix.hpp"
#include "roughsim/parallel.hpp"
#include "roughsim/rng.hpp"

namespace roughsim {

enum class Distribution { gaussian, rademacher };

inline std::string to_string(Distribution d) {
  return d == Distribution::gaussian ? "gaussian" : "rademacher";
}

struct NoiseConfig {
  Distribution distribution = Distribution::gaussian;
  std::size_t num_paths = 1;
  std::size_t num_steps = 1;
  double rho = 0.0;
  std::uint64_t seed = 0;
  bool antithetic = false;
};

/// Number of consecutive paths generated from one base draw.
inline std::size_t antithetic_group_size(const NoiseConfig& c) {
  if (!c.antithetic) return 1;
  return std::abs(c.rho) == 1.0 ? 2 : 4;
}

inline void validate(const NoiseConfig& c) {
  detail::require(c.num_paths >= 1, "noise: paths must be >= 1");
  detail::require(c.num_steps >= 1, "noise: steps must be >= 1");
  detail::require(std::isfinite(c.rho) && std::abs(c.rho) <= 1.0, "noise: |rho| must be <= 1");
  const std::size_t g = antithetic_group_size(c);
  detail::require(c.num_paths % g == 0, "noise: antithetic sampling needs paths divisible by " +
                                            std::to_string(g));
}

inline double rho_bar(double rho) { return std::sqrt(std::max(0.0, 1.0 - rho * rho)); }

/// Independent base draws (zeta, zeta_perp), one row per base path.
struct BaseShocks {
  Matrix zeta;
  Matrix perp;
};

/// Volatility-driver shocks zeta and stock-driver shocks xi = rho zeta + rho_bar zeta_perp.
struct ShockMatrices {
  Matrix zeta;
  Matrix xi;
};

/// Sign pattern applied to the base pair (zeta, zeta_perp) for member v of an
/// antithetic group of size 4: (+,+), (+,-), (-,-), (-,+); size 2: (+,+), (-,-).
struct VariateSigns {
  double zeta = 1.0;
  double perp = 1.0;
};

inline VariateSigns variate_signs(std::size_t group, std::size_t member) {
  if (group == 4) {
    static constexpr std::array<VariateSigns, 4> kSigns{
        {{1.0, 1.0}, {1.0, -1.0}, {-1.0, -1.0}, {-1.0, 1.0}}};
    return kSigns[member];
  }
  if (group == 2) return member == 0 ? VariateSigns{1.0, 1.0} : VariateSigns{-1.0, -1.0};
  return {};
}

/// Base pair rows for one base path from the given stream.
inline void draw_base_rows(Distribution dist, std::uint64_t seed, Stream stream,
                           std::uint64_t base_path, std::span<double> zeta,
                           std::span<double> perp) {
  const std::size_t n = zeta.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto block = random_block(seed, stream, base_path, i);
    const auto pair =
        dist == Distribution::gaussian ? normal_pair(block) : rademacher_pair(block);
    zeta[i] = pair[0];
    if (!perp.empty()) perp[i] = pair[1];
  }
}

/// Shock rows of path j of the (possibly antithetic) path set. Any of the
/// output spans may be empty when not needed.
inline void shock_rows(const NoiseConfig& c, std::size_t group, std::size_t j,
                       std::span<double> zeta, std::span<double> perp, std::span<double> xi) {
  const std::size_t n = c.num_steps;
  const VariateSigns s = variate_signs(group, j % group);
  const std::uint64_t base = j / group;
  const double rb = rho_bar(c.rho);
  for (std::size_t i = 0; i < n; ++i) {
    const auto block = random_block(c.seed, Stream::shocks, base, i);
    const auto pair =
        c.distribution == Distribution::gaussian ? normal_pair(block) : rademacher_pair(block);
    const double z = s.zeta * pair[0];
    const double p = s.perp * pair[1];
    if (!zeta.empty()) zeta[i] = z;
    if (!perp.empty()) perp[i] = p;
    if (!xi.empty()) xi[i] = c.rho * z + rb * p;
  }
}

inline BaseShocks draw_base_shocks(const NoiseConfig& c, std::size_t base_paths) {
  BaseShocks out{Matrix(base_paths, c.num_steps), Matrix(base_paths, c.num_steps)};
  parallel_for(base_paths, [&](std::size_t begin, std::size_t end) {
    for (std::size_t b = begin; b < end; ++b) {
      draw_base_rows(c.distribution, c.seed, Stream::shocks, b, out.zeta.row(b), out.perp.row(b));
    }
  });
  return out;
}

/// Expands base draws into groups of antithetic variates stored contiguously.
inline ShockMatrices antithetic_expand(const BaseShocks& base, double rho, std::size_t group = 4) {
  detail::require(group == 2 || group == 4, "antithetic_expand: group size must be 2 or 4");
  detail::require(base.zeta.rows() == base.perp.rows() && base.zeta.cols() == base.perp.cols(),
                  "antithetic_expand: base matrices differ in shape");
  const std::size_t mb = base.zeta.rows();
  const std::size_t n = base.zeta.cols();
  const double rb = rho_bar(rho);
  ShockMatrices out{Matrix(mb * group, n), Matrix(mb * group, n)};
  for (std::size_t b = 0; b < mb; ++b) {
    for (std::size_t v = 0; v < group; ++v) {
      const VariateSigns s = variate_signs(group, v);
      auto z = out.zeta.row(b * group + v);
      auto x = out.xi.row(b * group + v);
      for (std::size_t i = 0; i < n; ++i) {
        z[i] = s.zeta * base.zeta(b, i);
        x[i] = rho * z[i] + rb * (s.perp * base.perp(b, i));
      }
    }
  }
  return out;
}

/// Full shock matrices for the configuration. Path j depends only on
/// (seed, j / group, j % group), so adding paths never changes earlier ones.
inline ShockMatrices draw_shocks(const NoiseConfig& c) {
  validate(c);
  const std::size_t group = antithetic_group_size(c);
  ShockMatrices out{Matrix(c.num_paths, c.num_steps), Matrix(c.num_paths, c.num_steps)};
  parallel_for(c.num_paths, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      shock_rows(c, group, j, out.zeta.row(j), {}, out.xi.row(j));
    }
  });
  return out;
}

}  // namespace roughsim
