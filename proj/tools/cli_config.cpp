#include "cli_config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace roughsim::cli {

namespace {

template <class T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

template <class T>
T get_required(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing required key '" + key + "'");
  return get_or<T>(obj, key, T{}, where);
}

const json& section(const json& cfg, const char* name, bool required) {
  static const json empty = json::object();
  if (!cfg.contains(name)) {
    if (required) throw ConfigError(std::string("config: missing required section '") + name + "'");
    return empty;
  }
  const json& s = cfg.at(name);
  if (!s.is_object()) throw ConfigError(std::string(name) + ": must be an object");
  return s;
}

std::string lower_string(const json& obj, const char* key, const std::string& fallback,
                         const std::string& where) {
  return get_or<std::string>(obj, key, fallback, where);
}

}  // namespace

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    json cfg = json::parse(ss.str());
    if (!cfg.is_object()) throw ConfigError("config: top level must be an object");
    return cfg;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
}

void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& where) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const auto& a : allowed) ok = ok || item.key() == a;
    if (!ok) throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

void check_top_level(const json& cfg) {
  reject_unknown_keys(cfg,
                      {"kernel", "noise", "model", "driver", "horizon", "scheme", "method",
                       "process", "variance_reduction", "strikes", "strike", "option", "tree",
                       "output", "format", "bench", "threads"},
                      "config");
}

KernelSpec parse_kernel(const json& cfg) {
  const json& k = section(cfg, "kernel", true);
  reject_unknown_keys(k, {"type", "alpha", "beta", "hurst"}, "kernel");
  const std::string type = lower_string(k, "type", "rl", "kernel");
  if (k.contains("hurst") && k.contains("alpha")) {
    throw ConfigError("kernel: give either 'hurst' or 'alpha', not both");
  }
  if (type == "rl") {
    if (k.contains("beta")) throw ConfigError("kernel: 'beta' is not used by the rl kernel");
    const double alpha = k.contains("hurst") ? get_or<double>(k, "hurst", 0.5, "kernel") - 0.5
                                             : get_required<double>(k, "alpha", "kernel");
    return RiemannLiouville{alpha};
  }
  if (k.contains("hurst")) throw ConfigError("kernel: 'hurst' is only accepted for type rl");
  const double alpha = get_required<double>(k, "alpha", "kernel");
  const double beta = get_required<double>(k, "beta", "kernel");
  if (type == "gamma") return GammaFractional{alpha, beta};
  if (type == "powerlaw") return PowerLaw{alpha, beta};
  throw ConfigError("kernel: unknown type '" + type + "' (rl, gamma, powerlaw)");
}

NoiseConfig parse_noise(const json& cfg, std::optional<double> model_rho) {
  const json& n = section(cfg, "noise", false);
  reject_unknown_keys(n, {"distribution", "paths", "steps", "rho", "seed", "antithetic"}, "noise");
  NoiseConfig c;
  const std::string dist = lower_string(n, "distribution", "gaussian", "noise");
  if (dist == "gaussian") {
    c.distribution = Distribution::gaussian;
  } else if (dist == "rademacher") {
    c.distribution = Distribution::rademacher;
  } else {
    throw ConfigError("noise.distribution: expected gaussian or rademacher");
  }
  const auto paths = get_or<std::int64_t>(n, "paths", 1000, "noise");
  const auto steps = get_or<std::int64_t>(n, "steps", 256, "noise");
  detail::require(paths >= 1, "noise.paths: must be >= 1");
  detail::require(steps >= 1, "noise.steps: must be >= 1");
  c.num_paths = static_cast<std::size_t>(paths);
  c.num_steps = static_cast<std::size_t>(steps);
  c.seed = get_or<std::uint64_t>(n, "seed", 0, "noise");
  c.antithetic = get_or<bool>(n, "antithetic", false, "noise");
  if (model_rho) {
    if (n.contains("rho") && get_or<double>(n, "rho", 0.0, "noise") != *model_rho) {
      throw ConfigError("noise.rho conflicts with model.rho");
    }
    c.rho = *model_rho;
  } else {
    c.rho = get_or<double>(n, "rho", 0.0, "noise");
  }
  return c;
}

ModelSpec parse_model(const json& cfg) {
  const json& m = section(cfg, "model", true);
  if (!m.contains("type")) throw ConfigError("model: missing required key 'type'");
  const std::string type = lower_string(m, "type", "", "model");
  ModelSpec spec;
  spec.rho = get_or<double>(m, "rho", 0.0, "model");
  spec.spot = get_or<double>(m, "spot", 1.0, "model");
  auto curve = [&]() -> ForwardVarianceCurve {
    if (!m.contains("xi0")) return ForwardVarianceCurve(0.04);
    const json& x = m.at("xi0");
    if (x.is_number()) return ForwardVarianceCurve(x.get<double>());
    if (!x.is_array()) throw ConfigError("model.xi0: expected a number or [[t, v], ...]");
    std::vector<std::pair<double, double>> knots;
    for (const auto& p : x) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        throw ConfigError("model.xi0: each knot must be [t, v]");
      }
      knots.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    return ForwardVarianceCurve(std::move(knots));
  };
  if (type == "rbergomi") {
    reject_unknown_keys(m, {"type", "hurst", "nu", "xi0", "rho", "spot"}, "model");
    spec.variant = RoughBergomi{curve(), get_required<double>(m, "nu", "model"),
                                get_required<double>(m, "hurst", "model")};
  } else if (type == "gbergomi") {
    reject_unknown_keys(m, {"type", "hurst", "nu", "xi0", "beta", "rho", "spot"}, "model");
    spec.variant = GammaBergomi{curve(), get_required<double>(m, "nu", "model"),
                                get_required<double>(m, "hurst", "model"),
                                get_required<double>(m, "beta", "model")};
  } else if (type == "rheston_gjrs") {
    reject_unknown_keys(m, {"type", "hurst", "eta", "kappa", "theta", "xi", "y0", "rho", "spot"},
                        "model");
    RoughHestonGJRS r;
    r.hurst = get_required<double>(m, "hurst", "model");
    r.eta = get_required<double>(m, "eta", "model");
    r.kappa = get_required<double>(m, "kappa", "model");
    r.theta = get_required<double>(m, "theta", "model");
    r.vol_of_vol = get_required<double>(m, "xi", "model");
    r.y0 = get_or<double>(m, "y0", r.theta, "model");
    spec.variant = r;
  } else {
    throw ConfigError("model.type: unknown model '" + type + "' (rbergomi, gbergomi, rheston_gjrs)");
  }
  validate(spec);
  return spec;
}

double parse_horizon(const json& cfg) {
  const double t = get_or<double>(cfg, "horizon", 1.0, "config");
  detail::require(t > 0.0, "horizon: must be positive");
  return t;
}

MCConfig parse_mc(const json& cfg, const ModelSpec& model) {
  const NoiseConfig noise = parse_noise(cfg, model.rho);
  detail::require(noise.distribution == Distribution::gaussian,
                  "noise.distribution: Monte-Carlo pricing uses Gaussian shocks");
  MCConfig mc;
  mc.num_paths = noise.num_paths;
  mc.grid = Grid(noise.num_steps, parse_horizon(cfg));
  mc.seed = noise.seed;
  mc.antithetic = noise.antithetic;
  const std::string scheme = get_or<std::string>(cfg, "scheme", "rdonsker_matched", "config");
  if (scheme == "rdonsker_left") {
    mc.scheme = Scheme::rdonsker_left;
  } else if (scheme == "rdonsker_matched") {
    mc.scheme = Scheme::rdonsker_matched;
  } else if (scheme == "hybrid") {
    mc.scheme = Scheme::hybrid;
  } else {
    throw ConfigError("scheme: expected rdonsker_left, rdonsker_matched or hybrid");
  }
  const std::string method = get_or<std::string>(cfg, "method", "fft", "config");
  if (method == "fft") {
    mc.method = ConvolutionMethod::fft;
  } else if (method == "naive") {
    mc.method = ConvolutionMethod::naive;
  } else {
    throw ConfigError("method: expected fft or naive");
  }
  const std::string vr = get_or<std::string>(cfg, "variance_reduction", "conditional_bs", "config");
  if (vr == "none") {
    mc.variance_reduction = VarianceReduction::none;
  } else if (vr == "conditional_bs") {
    mc.variance_reduction = VarianceReduction::conditional_bs;
  } else {
    throw ConfigError("variance_reduction: expected none or conditional_bs");
  }
  return mc;
}

TreeConfig parse_tree(const json& cfg, const ModelSpec& model) {
  const json& t = section(cfg, "tree", false);
  reject_unknown_keys(t, {"depth", "rate", "dividend", "eval_mode", "branching", "node_cap"}, "tree");
  TreeConfig tc;
  tc.model = model;
  const auto depth = get_or<std::int64_t>(t, "depth", 10, "tree");
  detail::require(depth >= 1, "tree.depth: must be >= 1");
  tc.depth = static_cast<std::size_t>(depth);
  tc.rate = get_or<double>(t, "rate", 0.0, "tree");
  tc.dividend = get_or<double>(t, "dividend", 0.0, "tree");
  tc.horizon = parse_horizon(cfg);
  const std::string mode = get_or<std::string>(t, "eval_mode", "left_point", "tree");
  if (mode == "left_point") {
    tc.eval_mode = EvalMode::left_point;
  } else if (mode == "moment_matched") {
    tc.eval_mode = EvalMode::moment_matched;
  } else {
    throw ConfigError("tree.eval_mode: expected left_point or moment_matched");
  }
  if (t.contains("branching")) {
    tc.branching = static_cast<std::size_t>(get_or<std::int64_t>(t, "branching", 4, "tree"));
  }
  if (t.contains("node_cap")) {
    const auto cap = get_or<std::int64_t>(t, "node_cap", 1, "tree");
    detail::require(cap >= 1, "tree.node_cap: must be >= 1");
    tc.node_cap = static_cast<std::size_t>(cap);
  }
  validate(tc);
  return tc;
}

std::vector<double> parse_strikes(const json& cfg) {
  if (!cfg.contains("strikes")) {
    std::vector<double> k;
    for (int i = 0; i <= 8; ++i) k.push_back(0.8 + 0.05 * i);
    return k;
  }
  const json& s = cfg.at("strikes");
  std::vector<double> out;
  if (s.is_array()) {
    for (const auto& v : s) {
      if (!v.is_number()) throw ConfigError("strikes: entries must be numbers");
      out.push_back(v.get<double>());
    }
  } else if (s.is_object()) {
    reject_unknown_keys(s, {"from", "to", "count"}, "strikes");
    const double from = get_required<double>(s, "from", "strikes");
    const double to = get_required<double>(s, "to", "strikes");
    const auto count = get_required<std::int64_t>(s, "count", "strikes");
    detail::require(count >= 1, "strikes.count: must be >= 1");
    for (std::int64_t i = 0; i < count; ++i) {
      out.push_back(count == 1 ? from : from + (to - from) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
  } else {
    throw ConfigError("strikes: expected an array or {from, to, count}");
  }
  detail::require(!out.empty(), "strikes: at least one strike required");
  return out;
}

Payoff parse_payoff(const json& cfg, OptionType default_type) {
  Payoff p;
  p.strike = get_or<double>(cfg, "strike", 1.0, "config");
  detail::require(p.strike > 0.0, "strike: must be positive");
  const std::string type =
      get_or<std::string>(cfg, "option", default_type == OptionType::call ? "call" : "put", "config");
  if (type == "call") {
    p.type = OptionType::call;
  } else if (type == "put") {
    p.type = OptionType::put;
  } else {
    throw ConfigError("option: expected call or put");
  }
  return p;
}

std::string config_hash(const json& cfg) {
  const std::string text = cfg.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace roughsim::cli
