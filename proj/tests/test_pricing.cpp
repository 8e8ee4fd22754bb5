#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "roughsim/black_scholes.hpp"
#include "roughsim/pricing.hpp"

using namespace roughsim;

namespace {

ModelSpec rbergomi(double nu, double rho, double hurst = 0.3) {
  return {RoughBergomi{0.04, nu, hurst}, rho, 1.0};
}

MCConfig config(std::size_t paths, std::uint64_t seed, bool antithetic = false,
                VarianceReduction vr = VarianceReduction::none) {
  MCConfig c;
  c.num_paths = paths;
  c.seed = seed;
  c.antithetic = antithetic;
  c.variance_reduction = vr;
  return c;
}

}  // namespace

TEST(BlackScholes, ReferenceValues) {
  EXPECT_EQ(bs_call(1.0, 1.0, 0.0), 0.0);
  EXPECT_NEAR(bs_call(1.0, 1.0, 0.04), 0.0796557, 5e-8);
  EXPECT_NEAR(bs_call(1.0, 1.0, 0.04), 0.079655674554057976, 1e-15);
  const double c = bs_call(1.0, 0.8, 0.04);
  EXPECT_GE(c, 0.2);
  EXPECT_LE(c, 1.0);
  EXPECT_EQ(bs_call(1.2, 1.0, 0.0), 1.2 - 1.0);
  EXPECT_EQ(bs_put(0.9, 1.0, 0.0), 1.0 - 0.9);
}

TEST(BlackScholes, PutCallParity) {
  for (double k : {0.5, 0.9, 1.0, 1.3}) {
    for (double v : {0.01, 0.04, 0.3}) {
      EXPECT_NEAR(bs_call(1.1, k, v) - bs_put(1.1, k, v), 1.1 - k, 1e-14);
    }
  }
}

TEST(ImpliedVol, RoundTrip) {
  EXPECT_NEAR(implied_vol(bs_call(1.0, 1.0, 0.04), 1.0, 1.0, 1.0), 0.2, 1e-8);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> us(0.05, 1.0), uk(0.5, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const double sigma = us(rng), k = uk(rng);
    const double price = bs_call(1.0, k, sigma * sigma);
    if (price - std::max(1.0 - k, 0.0) < 1e-12) continue;  // no vega left
    worst = std::max(worst, std::abs(implied_vol(price, 1.0, k, 1.0) - sigma));
  }
  EXPECT_LT(worst, 1e-7);
}

TEST(ImpliedVol, PriceAccuracy) {
  const double price = bs_call(1.0, 1.1, 0.3 * 0.3 * 2.0);
  const double sigma = implied_vol(price, 1.0, 1.1, 2.0);
  EXPECT_NEAR(bs_call(1.0, 1.1, sigma * sigma * 2.0), price, 1e-10);
}

TEST(ImpliedVol, OutOfBounds) {
  EXPECT_THROW(implied_vol(0.0, 1.0, 1.0, 1.0), std::domain_error);
  EXPECT_THROW(implied_vol(0.15, 1.0, 0.8, 1.0), std::domain_error);
  EXPECT_THROW(implied_vol(1.0, 1.0, 0.8, 1.0), std::domain_error);
  EXPECT_THROW(implied_vol(0.1, 1.0, 1.0, 0.0), std::domain_error);
}

TEST(ConditionalBs, FlatVolatilityIsExact) {
  const ModelSpec m{RoughBergomi{0.04, 0.0, 0.3}, 0.0, 1.0};
  const Estimate e = conditional_bs_estimate(m, config(1000, 1), {OptionType::call, 1.0});
  EXPECT_NEAR(e.mean, 0.0796557, 5e-8);
  EXPECT_EQ(e.std_error, 0.0);
}

TEST(ConditionalBs, PerfectCorrelationHasNoResidualVariance) {
  for (double rho : {-1.0, 1.0}) {
    const PathSummary s = simulate_summaries(rbergomi(1.0, rho), config(64, 2));
    for (std::size_t j = 0; j < 64; ++j) {
      EXPECT_EQ(s.cond_variance[j], 0.0);
      EXPECT_NEAR(s.cond_log_stock[j], s.log_stock[j], 1e-14);
    }
    // Sigma = 0: the conditional estimator is plain MC on X1.
    const Payoff call{OptionType::call, 1.0};
    const Estimate a = price_from_summary(s, call, 1.0, VarianceReduction::conditional_bs);
    const Estimate b = price_from_summary(s, call, 1.0, VarianceReduction::none);
    EXPECT_NEAR(a.mean, b.mean, 1e-14);
  }
}

TEST(ConditionalBs, StandardErrorReduction) {
  const ModelSpec m = rbergomi(1.0, -0.7);
  const Payoff atm{OptionType::call, 1.0};
  const Estimate plain = mc_price(m, config(40000, 3), atm);
  const Estimate cond = conditional_bs_estimate(m, config(40000, 3), atm);
  const double ratio = cond.std_error / plain.std_error;
  RecordProperty("stderr_ratio", std::to_string(ratio));
  EXPECT_LT(ratio, 0.8);
}

TEST(ConditionalBs, ConsistentWithPlainMonteCarlo) {
  const ModelSpec m = rbergomi(1.0, -0.7);
  const PathSummary a = simulate_summaries(m, config(100000, 4));
  const PathSummary b = simulate_summaries(m, config(100000, 5));
  for (double k : {0.8, 0.9, 1.0, 1.1, 1.2}) {
    const Estimate p = price_from_summary(a, {OptionType::call, k}, 1.0, VarianceReduction::none);
    const Estimate c =
        price_from_summary(b, {OptionType::call, k}, 1.0, VarianceReduction::conditional_bs);
    EXPECT_LT(std::abs(p.mean - c.mean), 3.0 * std::hypot(p.std_error, c.std_error)) << k;
  }
}

TEST(LogStock, ZeroVarianceGivesZeroPath) {
  EXPECT_EQ(detail::log_stock_step(0.0, 0.01, 1.7), 0.0);
}

TEST(LogStock, ConstantVarianceMoments) {
  for (double rho : {-0.7, 0.0, 1.0}) {
    const ModelSpec m{RoughBergomi{0.09, 0.0, 0.3}, rho, 1.0};
    const PathSet x = simulate_logstock(m, config(100000, 6));
    std::vector<double> xt(x.paths()), dev(x.paths());
    for (std::size_t j = 0; j < xt.size(); ++j) xt[j] = x.values(j, 256);
    const Estimate mean = estimate_mean(xt);
    EXPECT_LT(std::abs(mean.mean + 0.045), 3.0 * mean.std_error) << rho;
    for (std::size_t j = 0; j < xt.size(); ++j) dev[j] = (xt[j] - mean.mean) * (xt[j] - mean.mean);
    const Estimate var = estimate_mean(dev);
    EXPECT_LT(std::abs(var.mean - 0.09), 3.0 * var.std_error) << rho;
  }
}

TEST(LogStock, PathsAgreeWithSummaries) {
  const ModelSpec m = rbergomi(1.0, -0.7);
  const MCConfig c = config(32, 7, true);
  const PathSet x = simulate_logstock(m, c);
  const PathSummary s = simulate_summaries(m, c);
  for (std::size_t j = 0; j < 32; ++j) EXPECT_NEAR(x.values(j, 256), s.log_stock[j], 1e-13);
}

TEST(Martingale, AllModelsAtDeskParameters) {
  const ModelSpec models[] = {
      rbergomi(1.0, -0.7),
      {GammaBergomi{0.04, 1.0, 0.3, 1.0}, -0.7, 1.0},
      {RoughHestonGJRS{0.04, 1.0, 0.04, 0.1, 0.04, 0.3}, -0.7, 1.0},
  };
  for (const auto& m : models) {
    MCConfig c = config(100000, 8, true);
    if (!is_bergomi(m)) c.scheme = Scheme::rdonsker_left;
    const Estimate e = martingale_estimate(simulate_summaries(m, c));
    EXPECT_LT(std::abs(e.mean - 1.0), 3.0 * e.std_error) << model_name(m);
  }
}

TEST(Antithetic, UnbiasedAndNotNoisier) {
  const ModelSpec m = rbergomi(1.0, -0.7);
  const Payoff atm{OptionType::call, 1.0};
  const Estimate plain = mc_price(m, config(80000, 9), atm);
  const Estimate anti = mc_price(m, config(80000, 10, true), atm);
  EXPECT_LT(std::abs(plain.mean - anti.mean), 3.0 * std::hypot(plain.std_error, anti.std_error));
  EXPECT_LE(anti.std_error, plain.std_error);
}

TEST(Antithetic, GroupSizes) {
  MCConfig c = config(8, 1, true);
  EXPECT_EQ(estimator_group_size(c, -0.7), 4u);
  EXPECT_EQ(estimator_group_size(c, 1.0), 2u);
  c.variance_reduction = VarianceReduction::conditional_bs;
  EXPECT_EQ(estimator_group_size(c, -0.7), 2u);
  c.antithetic = false;
  EXPECT_EQ(estimator_group_size(c, -0.7), 1u);
  EXPECT_THROW(PathEngine(rbergomi(1.0, -0.7), config(6, 1, true)), ConfigError);
}

TEST(Smile, FlatWithoutVolOfVol) {
  const ModelSpec m{RoughBergomi{0.04, 0.0, 0.3}, 0.0, 1.0};
  const std::vector<double> strikes{0.8, 0.9, 1.0, 1.1, 1.2};
  const SmileResult s = smile(m, config(256, 11, true, VarianceReduction::conditional_bs), strikes);
  ASSERT_EQ(s.implied_vols.size(), 5u);
  for (const auto& v : s.implied_vols) {
    ASSERT_TRUE(v.has_value());
    EXPECT_NEAR(*v, 0.2, 1e-6);
  }
  EXPECT_EQ(s.metadata.model, "rbergomi");
  EXPECT_EQ(s.metadata.paths, 256u);
}

TEST(Smile, PricesMonotoneInStrike) {
  const std::vector<double> strikes{0.8, 0.85, 0.9, 0.95, 1.0, 1.05, 1.1, 1.15, 1.2};
  for (auto vr : {VarianceReduction::none, VarianceReduction::conditional_bs}) {
    const SmileResult s = smile(rbergomi(1.0, -0.7), config(8000, 12, false, vr), strikes);
    for (std::size_t i = 0; i < strikes.size(); ++i) {
      EXPECT_GE(s.prices[i].mean, 0.0);
      EXPECT_GE(s.prices[i].std_error, 0.0);
      if (i) {
        EXPECT_LE(s.prices[i].mean, s.prices[i - 1].mean);
      }
    }
  }
}

TEST(Smile, RejectsUnsortedStrikes) {
  const std::vector<double> bad{1.0, 0.9};
  EXPECT_THROW(smile(rbergomi(1.0, -0.7), config(8, 1), bad), ConfigError);
  const std::vector<double> negative{-1.0, 1.0};
  EXPECT_THROW(smile(rbergomi(1.0, -0.7), config(8, 1), negative), ConfigError);
}

TEST(Engine, SchemeRestrictions) {
  MCConfig c = config(8, 1);
  c.scheme = Scheme::hybrid;
  const ModelSpec gamma{GammaBergomi{0.04, 1.0, 0.3, 1.0}, -0.7, 1.0};
  EXPECT_THROW(PathEngine(gamma, c), ConfigError);
  const ModelSpec heston{RoughHestonGJRS{}, -0.7, 1.0};
  c.scheme = Scheme::rdonsker_matched;
  EXPECT_THROW(PathEngine(heston, c), ConfigError);
}

TEST(Engine, ThreadCountDoesNotChangeResults) {
  const ModelSpec m = rbergomi(1.0, -0.7);
  const MCConfig c = config(4000, 13, true, VarianceReduction::conditional_bs);
  const std::size_t saved = thread_count();
  set_thread_count(1);
  const Estimate a = conditional_bs_estimate(m, c, {OptionType::call, 1.0});
  set_thread_count(7);
  const Estimate b = conditional_bs_estimate(m, c, {OptionType::call, 1.0});
  set_thread_count(saved);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(Engine, HybridMatchesStandaloneScheme) {
  const ModelSpec m = rbergomi(1.0, -0.7);
  MCConfig c = config(6, 14);
  c.grid = Grid(64, 1.0);
  c.scheme = Scheme::hybrid;
  const PathSet v = simulate_variance(m, c);
  const ShockMatrices sh = draw_shocks(noise_config(c, m.rho));
  const PathSet phi = hybrid_scheme_rl(0.3, sh.zeta, c.grid, c.seed);
  const PathSet v2 = phi_apply(m, phi, c.grid);
  for (std::size_t j = 0; j < 6; ++j) {
    for (std::size_t i = 0; i <= 64; ++i) {
      EXPECT_NEAR(v.values(j, i), v2.values(j, i), 1e-13 * v2.values(j, i));
    }
  }
}
