// Riemann-Liouville fractional Brownian paths written as CSV to stdout.
#include <iostream>

#include "roughsim/roughsim.hpp"

int main() {
  using namespace roughsim;
  const Grid grid(512, 1.0);
  const NoiseConfig noise{Distribution::gaussian, 5, grid.steps(), 0.0, 42, false};
  const ShockMatrices shocks = draw_shocks(noise);
  PathSet paths = rdonsker_volterra(rl_from_hurst(0.1), Brownian{}, shocks.zeta, grid,
                                    EvalMode::moment_matched, ConvolutionMethod::fft);
  paths.seed = noise.seed;
  write_pathset_csv(std::cout, paths);
}
