#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "roughsim/errors.hpp"
#include "roughsim/grid.hpp"
#include "roughsim/models.hpp"
#include "roughsim/parallel.hpp"
#include "roughsim/pathset_io.hpp"
#include "roughsim/pricing.hpp"
#include "roughsim/shocks.hpp"
#include "roughsim/volterra.hpp"

namespace roughsim {

struct TreeConfig {
  ModelSpec model;
  std::size_t depth = 10;
  double rate = 0.0;
  double dividend = 0.0;
  double horizon = 1.0;
  EvalMode eval_mode = EvalMode::left_point;
  std::optional<std::size_t> branching;  // default: 2 if |rho| = 1, else 4
  std::size_t node_cap = std::size_t{1} << 16;  // largest level kept in memory
};

inline constexpr std::size_t kMaxDepthFourBranch = 12;
inline constexpr std::size_t kMaxDepthTwoBranch = 24;

inline std::size_t tree_branching(const TreeConfig& c) {
  if (c.branching) return *c.branching;
  return std::abs(c.model.rho) == 1.0 ? 2 : 4;
}

inline void validate(const TreeConfig& c) {
  validate(c.model);
  const std::size_t b = tree_branching(c);
  detail::require(b == 2 || b == 4, "tree: branching must be 2 or 4");
  detail::require(b == 4 || std::abs(c.model.rho) == 1.0, "tree: two branches require |rho| = 1");
  detail::require(c.depth >= 1, "tree: depth must be >= 1");
  detail::require(b == 2 ? c.depth <= kMaxDepthTwoBranch : c.depth <= kMaxDepthFourBranch,
                  "tree: depth exceeds the guard (" +
                      std::to_string(b == 2 ? kMaxDepthTwoBranch : kMaxDepthFourBranch) +
                      " for " + std::to_string(b) + " branches)");
  detail::require(std::isfinite(c.rate) && std::isfinite(c.dividend), "tree: rates must be finite");
  detail::require(c.horizon > 0.0, "tree: horizon must be positive");
  detail::require(c.node_cap >= 1, "tree: node cap must be >= 1");
  if (c.eval_mode == EvalMode::moment_matched) {
    detail::require(is_bergomi(c.model), "tree: moment-matched weights require a Brownian driver");
  }
}

/// Shock pair for child c: four branches (+,+), (+,-), (-,+), (-,-); two
/// branches zeta = +1, -1.
inline std::pair<double, double> tree_shocks(std::size_t branching, std::size_t child) {
  if (branching == 2) return {child == 0 ? 1.0 : -1.0, 1.0};
  return {(child & 2u) ? -1.0 : 1.0, (child & 1u) ? -1.0 : 1.0};
}

struct TreeNode {
  double log_stock = 0.0;
  double variance = 0.0;
  double volterra = 0.0;
  double driver = 0.0;   // Y at the node
  double delta_y = 0.0;  // driver increment on the edge into the node
};

/// Non-recombining tree. Levels 0..materialized are stored; node k at level i
/// has children b k + c at level i + 1. Deeper levels are regenerated on demand.
class BushyTree {
 public:
  explicit BushyTree(const TreeConfig& config)
      : config_(config), branching_(tree_branching(config)), grid_(config.depth, config.horizon),
        map_(config.model, grid_) {
    validate(config_);
    const KernelSpec kernel = model_kernel(config_.model);
    weights_ = lag_weights(kernel, grid_, config_.eval_mode);
    const Driver driver = model_driver(config_.model);
    if (const auto* d = std::get_if<DiffusionSpec>(&driver)) diffusion_ = *d;
    rho_bar_ = rho_bar(config_.model.rho);

    TreeNode root;
    root.driver = diffusion_ ? diffusion_->y0 : 0.0;
    std::size_t clamps = 0;
    root.variance = map_(0, 0.0, clamps);
    levels_.push_back({root});
    std::vector<double> history;
    for (std::size_t i = 0; i < config_.depth; ++i) {
      const std::size_t next = levels_.back().size() * branching_;
      if (next > config_.node_cap) break;
      std::vector<TreeNode> level(next);
      const auto& prev = levels_.back();
      for (std::size_t k = 0; k < prev.size(); ++k) {
        history_into(i, k, history);
        for (std::size_t c = 0; c < branching_; ++c) {
          level[k * branching_ + c] = extend(prev[k], i, history, c);
        }
      }
      levels_.push_back(std::move(level));
    }
  }

  const TreeConfig& config() const noexcept { return config_; }
  std::size_t depth() const noexcept { return config_.depth; }
  std::size_t branching() const noexcept { return branching_; }
  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> weights() const noexcept { return weights_; }
  double spot() const noexcept { return config_.model.spot; }

  /// Highest level held in memory.
  std::size_t materialized_depth() const noexcept { return levels_.size() - 1; }
  const std::vector<TreeNode>& level(std::size_t i) const { return levels_.at(i); }

  /// Child c of node (level i) whose edge history holds the driver increments
  /// of levels 1..i. The history is read, not modified.
  TreeNode extend(const TreeNode& node, std::size_t i, std::span<const double> history,
                  std::size_t c) const {
    const double dt = grid_.dt();
    const double sdt = std::sqrt(dt);
    const auto [zeta, perp] = tree_shocks(branching_, c);
    const double xi = config_.model.rho * zeta + rho_bar_ * perp;
    TreeNode child;
    child.log_stock = node.log_stock + (config_.rate - config_.dividend) * dt +
                      detail::log_stock_step(node.variance, dt, xi);
    std::size_t counter = 0;
    child.delta_y = diffusion_ ? euler_increment(*diffusion_, node.driver, dt, sdt, zeta, counter)
                               : sdt * zeta;
    child.driver = node.driver + child.delta_y;
    // phi(t_{i+1}) = sum_{k=1}^{i+1} w_{i+2-k} dY_k
    double phi = 0.0;
    for (std::size_t k = 0; k < i; ++k) phi += weights_[i - k] * history[k];
    phi += weights_[0] * child.delta_y;
    child.volterra = phi;
    child.variance = map_(i + 1, phi, counter);
    return child;
  }

  /// Driver increments along the path from the root to node k of level i.
  void history_into(std::size_t i, std::size_t k, std::vector<double>& out) const {
    out.assign(i, 0.0);
    for (std::size_t level = i; level >= 1; --level) {
      out[level - 1] = levels_[level][k].delta_y;
      k /= branching_;
    }
  }

 private:
  TreeConfig config_;
  std::size_t branching_;
  Grid grid_;
  VarianceMap map_;
  std::vector<double> weights_;
  std::optional<DiffusionSpec> diffusion_;
  double rho_bar_ = 1.0;
  std::vector<std::vector<TreeNode>> levels_;
};

inline BushyTree build_tree(const TreeConfig& config) { return BushyTree(config); }

/// Recomputes a node from the root along the given child choices.
inline TreeNode node_from_path(const BushyTree& tree, std::span<const std::size_t> children) {
  TreeNode node = tree.level(0)[0];
  std::vector<double> history;
  for (std::size_t i = 0; i < children.size(); ++i) {
    node = tree.extend(node, i, history, children[i]);
    history.push_back(node.delta_y);
  }
  return node;
}

namespace detail {

template <class Leaf>
void leaf_dfs(const BushyTree& tree, const TreeNode& node, std::size_t level, std::size_t index,
              std::vector<double>& history, Leaf& leaf) {
  if (level == tree.depth()) {
    leaf(index, node);
    return;
  }
  for (std::size_t c = 0; c < tree.branching(); ++c) {
    const TreeNode child = tree.extend(node, level, history, c);
    history.push_back(child.delta_y);
    leaf_dfs(tree, child, level + 1, index * tree.branching() + c, history, leaf);
    history.pop_back();
  }
}

}  // namespace detail

/// Calls leaf(index, node) for every leaf in index order.
template <class Leaf>
void for_each_leaf(const BushyTree& tree, Leaf&& leaf) {
  const std::size_t top = tree.materialized_depth();
  std::vector<double> history;
  const auto& frontier = tree.level(top);
  for (std::size_t k = 0; k < frontier.size(); ++k) {
    tree.history_into(top, k, history);
    detail::leaf_dfs(tree, frontier[k], top, k, history, leaf);
  }
}

struct AmericanResult {
  double price = 0.0;
  double european_price = 0.0;
  double early_exercise_premium = 0.0;
  std::size_t depth = 0;
  std::size_t branching = 0;
  /// Distribution of the first level at which exercise is optimal; the mass
  /// missing from the total never exercises.
  std::vector<double> exercise_mass;
};

namespace detail {

struct NodeValue {
  double european = 0.0;
  double american = 0.0;
  // Conditional law of the first exercise level, given the node is reached.
  std::array<double, kMaxDepthTwoBranch + 1> first_exercise{};
};

struct InductionContext {
  const BushyTree& tree;
  const Payoff& payoff;
  double discount;
};

inline NodeValue combine(const InductionContext& ctx, const TreeNode& node, std::size_t level,
                         const NodeValue* children) {
  const std::size_t b = ctx.tree.branching();
  double se = 0.0, sa = 0.0;
  for (std::size_t c = 0; c < b; ++c) {
    se += children[c].european;
    sa += children[c].american;
  }
  NodeValue v;
  v.european = ctx.discount * (se / static_cast<double>(b));
  const double continuation = ctx.discount * (sa / static_cast<double>(b));
  const double exercise = ctx.payoff(ctx.tree.spot() * std::exp(node.log_stock));
  v.american = std::max(continuation, exercise);
  if (exercise > continuation) {
    v.first_exercise[level] = 1.0;
  } else {
    for (std::size_t i = level + 1; i <= ctx.tree.depth(); ++i) {
      double s = 0.0;
      for (std::size_t c = 0; c < b; ++c) s += children[c].first_exercise[i];
      v.first_exercise[i] = s / static_cast<double>(b);
    }
  }
  if (!(v.american >= v.european) || !(v.american >= exercise)) {
    throw std::logic_error("tree: Snell envelope domination violated at level " +
                           std::to_string(level));
  }
  return v;
}

inline NodeValue induct(const InductionContext& ctx, const TreeNode& node, std::size_t level,
                        std::vector<double>& history) {
  const BushyTree& tree = ctx.tree;
  if (level == tree.depth()) {
    const double p = ctx.payoff(tree.spot() * std::exp(node.log_stock));
    NodeValue leaf{p, p, {}};
    leaf.first_exercise[level] = p > 0.0 ? 1.0 : 0.0;
    return leaf;
  }
  NodeValue children[4];
  for (std::size_t c = 0; c < tree.branching(); ++c) {
    const TreeNode child = tree.extend(node, level, history, c);
    history.push_back(child.delta_y);
    children[c] = induct(ctx, child, level + 1, history);
    history.pop_back();
  }
  return combine(ctx, node, level, children);
}

}  // namespace detail

/// European and American (Snell envelope) values in one backward induction.
/// Continuation values are discounted by e^{-r dt} per step.
inline AmericanResult tree_price_american(const BushyTree& tree, const Payoff& payoff) {
  const std::size_t n = tree.depth();
  const std::size_t b = tree.branching();
  const double discount = std::exp(-tree.config().rate * tree.grid().dt());
  const std::size_t top = tree.materialized_depth();
  const auto& frontier = tree.level(top);
  const detail::InductionContext ctx{tree, payoff, discount};

  std::vector<detail::NodeValue> values(frontier.size());
  parallel_for(frontier.size(), [&](std::size_t begin, std::size_t end) {
    std::vector<double> history;
    for (std::size_t k = begin; k < end; ++k) {
      tree.history_into(top, k, history);
      values[k] = detail::induct(ctx, frontier[k], top, history);
    }
  });
  for (std::size_t level = top; level-- > 0;) {
    const auto& nodes = tree.level(level);
    std::vector<detail::NodeValue> up(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      up[k] = detail::combine(ctx, nodes[k], level, values.data() + k * b);
    }
    values = std::move(up);
  }
  AmericanResult r;
  r.price = values[0].american;
  r.european_price = values[0].european;
  r.early_exercise_premium = r.price - r.european_price;
  r.depth = n;
  r.branching = b;
  r.exercise_mass.assign(values[0].first_exercise.begin(),
                         values[0].first_exercise.begin() + static_cast<std::ptrdiff_t>(n + 1));
  return r;
}

/// Discounted equal-weight expectation of payoff over the leaves.
inline double tree_price_european(const BushyTree& tree, const Payoff& payoff) {
  return tree_price_american(tree, payoff).european_price;
}

/// Level-ordered CSV of all nodes; needs every level in memory.
inline void write_tree_csv(std::ostream& os, const BushyTree& tree) {
  detail::require(tree.materialized_depth() == tree.depth(),
                  "tree dump: the whole tree must fit under the node cap");
  os << "level,index,parent,zeta,zeta_perp,time,log_stock,stock,variance,volterra\n";
  for (std::size_t i = 0; i <= tree.depth(); ++i) {
    const auto& nodes = tree.level(i);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const auto& nd = nodes[k];
      os << i << ',' << k << ',';
      if (i == 0) {
        os << ",,,";
      } else {
        const auto [z, p] = tree_shocks(tree.branching(), k % tree.branching());
        os << k / tree.branching() << ',' << z << ',' << p << ',';
      }
      os << detail::format_double(tree.grid().time(i)) << ',' << detail::format_double(nd.log_stock)
         << ',' << detail::format_double(tree.spot() * std::exp(nd.log_stock)) << ','
         << detail::format_double(nd.variance) << ',' << detail::format_double(nd.volterra) << '\n';
    }
  }
}

}  // namespace roughsim
