// American and European puts on a two-branch rough Bergomi tree.
#include <cstdio>

#include "roughsim/roughsim.hpp"

int main() {
  using namespace roughsim;
  for (double hurst : {0.1, 0.3, 0.5}) {
    TreeConfig c;
    c.model = {RoughBergomi{0.04, 1.0, hurst}, -1.0, 1.0};
    c.depth = 16;
    c.rate = 0.05;
    const BushyTree tree = build_tree(c);
    const AmericanResult r = tree_price_american(tree, {OptionType::put, 1.1});
    std::printf("H=%.1f  american %.5f  european %.5f  premium %.5f\n", hurst, r.price,
                r.european_price, r.early_exercise_premium);
  }
}
