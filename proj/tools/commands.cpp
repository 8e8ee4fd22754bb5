#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli.hpp"
#include "cli_config.hpp"

#ifndef ROUGHSIM_GIT_REVISION
#define ROUGHSIM_GIT_REVISION "unknown"
#endif

namespace roughsim::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Flag values that override the config file. Each entry knows its JSON path.
struct Overrides {
  std::vector<std::function<void(json&)>> apply;

  template <class T>
  void add(CLI::App* app, const std::string& flag, std::vector<std::string> path,
           const std::string& help) {
    auto value = std::make_shared<std::optional<T>>();
    app->add_option(flag, *value, help);
    apply.push_back([value, path](json& cfg) {
      if (!value->has_value()) return;
      json* node = &cfg;
      for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        if (!node->contains(path[i]) || !(*node)[path[i]].is_object()) (*node)[path[i]] = json::object();
        node = &(*node)[path[i]];
      }
      (*node)[path.back()] = **value;
    });
  }

  void flag(CLI::App* app, const std::string& name, std::vector<std::string> path,
            const std::string& help) {
    auto value = std::make_shared<bool>(false);
    app->add_flag(name, *value, help);
    apply.push_back([value, path](json& cfg) {
      if (!*value) return;
      json* node = &cfg;
      for (std::size_t i = 0; i + 1 < path.size(); ++i) node = &(*node)[path[i]];
      (*node)[path.back()] = true;
    });
  }

  void list(CLI::App* app, const std::string& name, std::vector<std::string> path,
            const std::string& help) {
    auto value = std::make_shared<std::vector<double>>();
    app->add_option(name, *value, help)->delimiter(',');
    apply.push_back([value, path](json& cfg) {
      if (value->empty()) return;
      json* node = &cfg;
      for (std::size_t i = 0; i + 1 < path.size(); ++i) node = &(*node)[path[i]];
      (*node)[path.back()] = *value;
    });
  }
};

struct Common {
  std::string config_path;
  std::string output;
  std::size_t threads = 0;
  Overrides overrides;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config_path, "JSON run configuration");
  app->add_option("--threads", c.threads, "Worker threads (default: ROUGHSIM_THREADS or all cores)");
}

void add_noise_flags(CLI::App* app, Common& c) {
  c.overrides.add<std::int64_t>(app, "--paths", {"noise", "paths"}, "Number of paths M");
  c.overrides.add<std::int64_t>(app, "--steps", {"noise", "steps"}, "Number of time steps n");
  c.overrides.add<std::uint64_t>(app, "--seed", {"noise", "seed"}, "Random seed");
  c.overrides.add<std::string>(app, "--distribution", {"noise", "distribution"},
                               "gaussian or rademacher");
  c.overrides.flag(app, "--antithetic", {"noise", "antithetic"}, "Use antithetic variates");
  c.overrides.add<double>(app, "--horizon", {"horizon"}, "Maturity T");
  c.overrides.add<std::string>(app, "--method", {"method"}, "Convolution method: fft or naive");
}

void add_model_flags(CLI::App* app, Common& c) {
  c.overrides.add<std::string>(app, "--model", {"model", "type"},
                               "rbergomi, gbergomi or rheston_gjrs");
  c.overrides.add<double>(app, "--hurst", {"model", "hurst"}, "Hurst exponent H");
  c.overrides.add<double>(app, "--nu", {"model", "nu"}, "Bergomi vol-of-vol nu");
  c.overrides.add<double>(app, "--xi0", {"model", "xi0"}, "Flat forward variance");
  c.overrides.add<double>(app, "--beta", {"model", "beta"}, "Gamma kernel decay (gbergomi)");
  c.overrides.add<double>(app, "--eta", {"model", "eta"}, "Rough Heston level eta");
  c.overrides.add<double>(app, "--kappa", {"model", "kappa"}, "CIR mean reversion");
  c.overrides.add<double>(app, "--theta", {"model", "theta"}, "CIR long-run mean");
  c.overrides.add<double>(app, "--xi", {"model", "xi"}, "CIR vol-of-vol");
  c.overrides.add<double>(app, "--y0", {"model", "y0"}, "CIR initial value");
  c.overrides.add<double>(app, "--rho", {"model", "rho"}, "Spot-vol correlation");
  c.overrides.add<double>(app, "--spot", {"model", "spot"}, "Initial spot");
}

json resolve_config(const Common& c) {
  json cfg = c.config_path.empty() ? json::object() : load_config_file(c.config_path);
  for (const auto& f : c.overrides.apply) f(cfg);
  check_top_level(cfg);
  if (c.threads > 0) set_thread_count(c.threads);
  return cfg;
}

json metadata(const json& cfg, double runtime) {
  json m;
  m["tool"] = "roughsim";
  m["version"] = kVersion;
  m["git_revision"] = ROUGHSIM_GIT_REVISION;
  m["config_hash"] = config_hash(cfg);
  m["config"] = cfg;
  m["threads"] = thread_count();
  m["c_h_convention"] = "sqrt(2H)";
  m["runtime_seconds"] = runtime;
  return m;
}

std::string meta_line(const json& cfg) {
  return std::string("config_hash=") + config_hash(cfg) + " git_revision=" + ROUGHSIM_GIT_REVISION;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os << text;
  if (!os) throw IoError("write to '" + path + "' failed");
}

json estimate_json(const Estimate& e) { return {{"mean", e.mean}, {"stderr", e.std_error}}; }

// ---------------------------------------------------------------- simulate

int cmd_simulate(const Common& c, std::ostream& out) {
  const auto start = Clock::now();
  json cfg = resolve_config(c);
  const std::string process = cfg.value("process", std::string("volterra"));
  const std::string format = cfg.value("format", std::string("csv"));
  detail::require(format == "csv" || format == "binary", "format: expected csv or binary");
  const bool binary = format == "binary";
  std::optional<PathSet> paths;
  json schemes;
  if (process == "volterra") {
    if (cfg.contains("model")) throw ConfigError("simulate: 'model' is only used with process variance or log_stock");
    const KernelSpec kernel = parse_kernel(cfg);
    const NoiseConfig noise = parse_noise(cfg, std::nullopt);
    validate(noise);
    const Grid grid(noise.num_steps, parse_horizon(cfg));
    const std::string scheme = cfg.value("scheme", std::string("rdonsker_matched"));
    const std::string method_name = cfg.value("method", std::string("fft"));
    detail::require(method_name == "fft" || method_name == "naive", "method: expected fft or naive");
    const ConvolutionMethod method = method_name == "fft" ? ConvolutionMethod::fft : ConvolutionMethod::naive;
    Driver driver = Brownian{};
    if (cfg.contains("driver")) {
      const json& d = cfg.at("driver");
      reject_unknown_keys(d, {"type", "kappa", "theta", "xi", "y0"}, "driver");
      const std::string type = d.value("type", std::string("brownian"));
      if (type == "cir") {
        const double kappa = d.at("kappa").get<double>(), theta = d.at("theta").get<double>();
        const double xi = d.at("xi").get<double>();
        driver = cir_diffusion(kappa, theta, xi, d.value("y0", theta));
      } else if (type != "brownian") {
        throw ConfigError("driver.type: expected brownian or cir");
      }
    }
    if (scheme == "rdonsker_left" || scheme == "rdonsker_matched") {
      validate_kernel(kernel, std::holds_alternative<Brownian>(driver));
      const ShockMatrices shocks = draw_shocks(noise);
      paths = rdonsker_volterra(kernel, driver, shocks.zeta, grid,
                                scheme == "rdonsker_left" ? EvalMode::left_point : EvalMode::moment_matched,
                                method);
    } else if (scheme == "hybrid") {
      detail::require(is_riemann_liouville(kernel), "simulate: hybrid needs the rl kernel");
      detail::require(std::holds_alternative<Brownian>(driver), "simulate: hybrid needs a Brownian driver");
      const ShockMatrices shocks = draw_shocks(noise);
      paths = hybrid_scheme_rl(kernel_alpha(kernel) + 0.5, shocks.zeta, grid, noise.seed);
    } else if (scheme == "cholesky") {
      detail::require(!noise.antithetic, "simulate: cholesky sampling does not use antithetics");
      paths = cholesky_exact_rl(kernel, grid, noise.num_paths, noise.seed);
    } else {
      throw ConfigError("scheme: expected rdonsker_left, rdonsker_matched, hybrid or cholesky");
    }
    paths->seed = noise.seed;
    schemes = {{"scheme", to_string(paths->scheme)}, {"method", to_string(paths->method)},
               {"kernel", kernel_name(kernel)}};
  } else if (process == "variance" || process == "log_stock") {
    const ModelSpec model = parse_model(cfg);
    MCConfig mc = parse_mc(cfg, model);
    paths = process == "variance" ? simulate_variance(model, mc) : simulate_logstock(model, mc);
    schemes = {{"scheme", to_string(mc.scheme)}, {"method", to_string(mc.method)},
               {"model", model_name(model)}};
  } else {
    throw ConfigError("process: expected volterra, variance or log_stock");
  }
  const std::string target = c.output.empty() ? (binary ? "paths.bin" : "paths.csv") : c.output;
  save_pathset(target, *paths, binary, meta_line(cfg));
  json meta = metadata(cfg, seconds_since(start));
  meta["schemes"] = schemes;
  meta["process"] = process;
  meta["output"] = target;
  meta["shape"] = {paths->paths(), paths->grid.steps() + 1};
  meta["diagnostics"] = {{"truncations", paths->diagnostics.truncations},
                         {"clamps", paths->diagnostics.clamps},
                         {"failed_paths", paths->diagnostics.failed_paths}};
  write_text(target + ".json", meta.dump(2) + "\n");
  out << target << "\n";
  return kOk;
}

// ---------------------------------------------------------------- smile / price

int cmd_smile(const Common& c, std::ostream& out) {
  const auto start = Clock::now();
  json cfg = resolve_config(c);
  const ModelSpec model = parse_model(cfg);
  const MCConfig mc = parse_mc(cfg, model);
  const std::vector<double> strikes = parse_strikes(cfg);
  const SmileResult r = smile(model, mc, strikes);
  std::ostringstream csv;
  csv << "strike,price,stderr,implied_vol\n";
  for (std::size_t i = 0; i < r.strikes.size(); ++i) {
    csv << detail::format_double(r.strikes[i]) << ',' << detail::format_double(r.prices[i].mean)
        << ',' << detail::format_double(r.prices[i].std_error) << ',';
    if (r.implied_vols[i]) csv << detail::format_double(*r.implied_vols[i]);
    csv << '\n';
  }
  const std::string target = c.output.empty() ? "smile.csv" : c.output;
  write_text(target, csv.str());
  json meta = metadata(cfg, seconds_since(start));
  meta["schemes"] = {{"scheme", r.metadata.scheme},
                     {"variance_reduction", r.metadata.variance_reduction},
                     {"method", to_string(mc.method)},
                     {"model", r.metadata.model}};
  meta["diagnostics"] = {{"clamps", r.metadata.clamps}, {"truncations", r.metadata.truncations}};
  write_text(target + ".json", meta.dump(2) + "\n");
  out << csv.str();
  return kOk;
}

int cmd_price(const Common& c, std::ostream& out) {
  const auto start = Clock::now();
  json cfg = resolve_config(c);
  const ModelSpec model = parse_model(cfg);
  const MCConfig mc = parse_mc(cfg, model);
  const Payoff payoff = parse_payoff(cfg, OptionType::call);
  const PathSummary s = simulate_summaries(model, mc);
  const Estimate e = price_from_summary(s, payoff, model.spot, mc.variance_reduction);
  json rec;
  rec["model"] = model_name(model);
  rec["option"] = to_string(payoff.type);
  rec["strike"] = payoff.strike;
  rec["price"] = e.mean;
  rec["stderr"] = e.std_error;
  rec["martingale"] = estimate_json(martingale_estimate(s));
  try {
    const double call = payoff.type == OptionType::call
                            ? e.mean
                            : e.mean + model.spot - payoff.strike;  // put-call parity
    rec["implied_vol"] = implied_vol(call, model.spot, payoff.strike, mc.grid.horizon());
  } catch (const std::domain_error&) {
    rec["implied_vol"] = nullptr;
  }
  json meta = metadata(cfg, seconds_since(start));
  meta["schemes"] = {{"scheme", to_string(mc.scheme)},
                     {"variance_reduction", to_string(mc.variance_reduction)},
                     {"method", to_string(mc.method)}};
  meta["diagnostics"] = {{"clamps", s.diagnostics.clamps}, {"truncations", s.diagnostics.truncations}};
  rec["metadata"] = meta;
  const std::string text = rec.dump(2) + "\n";
  if (!c.output.empty()) write_text(c.output, text);
  out << text;
  return kOk;
}

// ---------------------------------------------------------------- american

int cmd_american(const Common& c, const std::string& dump_path, std::ostream& out) {
  const auto start = Clock::now();
  json cfg = resolve_config(c);
  const ModelSpec model = parse_model(cfg);
  TreeConfig tc = parse_tree(cfg, model);
  const Payoff payoff = parse_payoff(cfg, OptionType::put);
  if (!dump_path.empty()) {
    detail::require(tc.depth <= 6, "american: --dump-tree supports depth <= 6");
    tc.node_cap = std::max<std::size_t>(tc.node_cap, std::size_t{1} << 12);
  }
  const BushyTree tree = build_tree(tc);
  const AmericanResult r = tree_price_american(tree, payoff);
  if (!dump_path.empty()) {
    std::ofstream os(dump_path);
    if (!os) throw IoError("cannot open '" + dump_path + "' for writing");
    write_tree_csv(os, tree);
  }
  json rec;
  rec["price"] = r.price;
  rec["european_price"] = r.european_price;
  rec["early_exercise_premium"] = r.early_exercise_premium;
  rec["depth"] = r.depth;
  rec["branching"] = r.branching;
  rec["option"] = to_string(payoff.type);
  rec["strike"] = payoff.strike;
  rec["exercise_mass"] = r.exercise_mass;
  json meta = metadata(cfg, seconds_since(start));
  meta["schemes"] = {{"tree", "bushy"}, {"eval_mode", to_string(tc.eval_mode)},
                     {"discount", "exp(-r dt)"}};
  rec["metadata"] = meta;
  const std::string text = rec.dump(2) + "\n";
  if (!c.output.empty()) write_text(c.output, text);
  out << text;
  return kOk;
}

// ---------------------------------------------------------------- validate

struct Check {
  std::string name;
  std::string detail;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

json check_json(const Check& ch) {
  return {{"name", ch.name}, {"detail", ch.detail}, {"value", ch.value},
          {"tolerance", ch.tolerance}, {"passed", ch.passed}};
}

std::vector<Check> run_validation(const std::vector<double>& hursts, const std::string& fault) {
  std::vector<Check> checks;
  auto hstr = [](double h) { return "H=" + detail::format_double(h); };

  // Moment-matching identity.
  for (double h : hursts) {
    const Grid grid(500, 1.0);
    std::vector<double> w = optimal_eval_weights(rl_from_hurst(h), grid);
    if (fault == "weight_table") w[w.size() / 2] *= 1.001;
    double sum = 0.0, worst = 0.0;
    for (std::size_t i = 1; i <= grid.steps(); ++i) {
      sum += grid.dt() * w[i - 1] * w[i - 1];
      const double exact = std::pow(grid.time(i), 2.0 * h) / (2.0 * h);
      worst = std::max(worst, std::abs(sum - exact) / exact);
    }
    checks.push_back({"moment_matching_identity", hstr(h), worst, 1e-10, worst < 1e-10});
  }

  // FFT against the direct sum.
  {
    double worst = 0.0;
    std::uint64_t counter = 0;
    auto fill = [&](std::vector<double>& v) {
      for (auto& x : v) x = 2.0 * uniform53(random_block(99, Stream::shocks, counter++, 0)[0], 0) - 1.0;
    };
    for (std::size_t n : {1, 2, 3, 7, 16, 33, 64, 1024}) {
      std::vector<double> w(n), d(n), a(n + 1), b(n + 1);
      fill(w);
      fill(d);
      Convolver(w, ConvolutionMethod::fft).apply(d, a);
      convolve_naive(w, d, b);
      for (std::size_t i = 0; i <= n; ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    checks.push_back({"fft_naive_equivalence", "n in {1..1024}", worst, 1e-9, worst < 1e-9});
  }

  // Deterministic covariance of the moment-matched scheme against the exact
  // diagonal, and of the Cholesky factor against the quadrature matrix.
  for (double h : hursts) {
    const Grid grid(16, 1.0);
    const KernelSpec k = rl_from_hurst(h);
    const Matrix exact = volterra_covariance(k, grid);
    const Matrix scheme = convolution_covariance(optimal_eval_weights(k, grid), grid);
    double worst_diag = 0.0;
    for (std::size_t i = 0; i < grid.steps(); ++i) {
      worst_diag = std::max(worst_diag, std::abs(scheme(i, i) - exact(i, i)) / exact(i, i));
    }
    checks.push_back({"matched_variance_vs_exact", hstr(h), worst_diag, 1e-9, worst_diag < 1e-9});
    const Matrix l = cholesky_factor(exact);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.steps(); ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double s = 0.0;
        for (std::size_t q = 0; q <= j; ++q) s += l(i, q) * l(j, q);
        worst = std::max(worst, std::abs(s - exact(i, j)));
      }
    }
    checks.push_back({"cholesky_reconstruction", hstr(h), worst, 1e-10, worst < 1e-10});
  }

  // Exact sampler: variance at T within 3 standard errors.
  for (double h : hursts) {
    const Grid grid(16, 1.0);
    const std::size_t m = 20000;
    const PathSet p = cholesky_exact_rl(rl_from_hurst(h), grid, m, 11);
    std::vector<double> sq(m);
    for (std::size_t j = 0; j < m; ++j) sq[j] = p.values(j, grid.steps()) * p.values(j, grid.steps());
    const Estimate e = estimate_mean(sq);
    const double z = std::abs(e.mean - 1.0 / (2.0 * h)) / e.std_error;
    checks.push_back({"cholesky_terminal_variance", hstr(h), z, 3.0, z < 3.0});
  }

  // Martingale property of the simulated stock.
  for (double h : hursts) {
    ModelSpec model{RoughBergomi{ForwardVarianceCurve(0.04), 1.0, h}, -0.7, 1.0};
    MCConfig mc;
    mc.num_paths = 20000;
    mc.grid = Grid(64, 1.0);
    mc.antithetic = true;
    mc.seed = 5;
    const Estimate e = martingale_estimate(simulate_summaries(model, mc));
    const double z = std::abs(e.mean - 1.0) / e.std_error;
    checks.push_back({"martingale", hstr(h), z, 3.0, z < 3.0});
  }
  return checks;
}

int cmd_validate(const Common& c, const std::string& fault, std::ostream& out) {
  const auto start = Clock::now();
  json cfg = resolve_config(c);
  detail::require(fault.empty() || fault == "weight_table", "validate: unknown fault '" + fault + "'");
  const std::vector<Check> checks = run_validation({0.05, 0.1, 0.3, 0.75}, fault);
  json report;
  report["checks"] = json::array();
  json failed = json::array();
  bool passed = true;
  for (const auto& ch : checks) {
    report["checks"].push_back(check_json(ch));
    if (!ch.passed) {
      passed = false;
      bool seen = false;
      for (const auto& f : failed) seen = seen || f == ch.name;
      if (!seen) failed.push_back(ch.name);
    }
  }
  report["passed"] = passed;
  report["failed"] = failed;
  report["metadata"] = metadata(cfg, seconds_since(start));
  const std::string text = report.dump(2) + "\n";
  if (!c.output.empty()) write_text(c.output, text);
  out << text;
  return passed ? kOk : kRuntimeError;
}

// ---------------------------------------------------------------- bench

int cmd_bench(const Common& c, std::ostream& out) {
  const auto start = Clock::now();
  json cfg = resolve_config(c);
  const json b = cfg.value("bench", json::object());
  reject_unknown_keys(b, {"trials", "paths", "steps", "schemes", "pipeline_paths", "pipeline_steps",
                          "pipeline_trials"},
                      "bench");
  const auto trials = b.value("trials", std::size_t{10});
  detail::require(trials >= 10, "bench.trials: the protocol needs at least 10 trials");
  const auto paths = b.value("paths", std::size_t{32});
  const auto steps = b.value("steps", std::vector<std::size_t>{256, 1024, 4096, 8192});
  const auto scheme_names = b.value(
      "schemes", std::vector<std::string>{"rdonsker-fft", "rdonsker-naive", "hybrid", "markovian-euler"});
  std::vector<BenchScheme> schemes;
  for (const auto& s : scheme_names) {
    if (s == "rdonsker-fft") schemes.push_back(BenchScheme::rdonsker_fft);
    else if (s == "rdonsker-naive") schemes.push_back(BenchScheme::rdonsker_naive);
    else if (s == "hybrid") schemes.push_back(BenchScheme::hybrid);
    else if (s == "markovian-euler") schemes.push_back(BenchScheme::markovian_euler);
    else throw ConfigError("bench.schemes: unknown scheme '" + s + "'");
  }
  auto row_json = [](const BenchRow& r) {
    return json{{"scheme", r.scheme}, {"steps", r.steps}, {"paths", r.paths},
                {"median_seconds", r.median_seconds}, {"trial_seconds", r.trial_seconds}};
  };
  json report;
  report["protocol"] = "median of " + std::to_string(trials) + " trials";
  report["rows"] = json::array();
  for (const auto& r : bench_path_generation(schemes, steps, paths, trials)) report["rows"].push_back(row_json(r));
  const auto pipeline_paths = b.value("pipeline_paths", std::size_t{10000});
  if (pipeline_paths > 0) {
    const auto pn = b.value("pipeline_steps", std::size_t{1024});
    const auto pt = b.value("pipeline_trials", trials);
    report["pipeline"] = json::array();
    const auto rows = bench_pipeline(pn, pipeline_paths, pt);
    for (const auto& r : rows) report["pipeline"].push_back(row_json(r));
    report["pipeline_ratio"] = rows[0].median_seconds / rows[1].median_seconds;
  }
  report["metadata"] = metadata(cfg, seconds_since(start));
  const std::string text = report.dump(2) + "\n";
  if (!c.output.empty()) write_text(c.output, text);
  out << text;
  return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"roughsim: rough volatility simulation and pricing"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Common sim, smi, pri, ame, val, ben;
  std::string dump_tree, fault;

  CLI::App* simulate = app.add_subcommand("simulate", "Simulate Volterra, variance or log-stock paths");
  add_common(simulate, sim);
  simulate->add_option("-o,--output", sim.output, "Path file (default paths.csv / paths.bin)");
  add_noise_flags(simulate, sim);
  sim.overrides.add<double>(simulate, "--rho", {"noise", "rho"}, "Shock correlation");
  sim.overrides.add<std::string>(simulate, "--kernel", {"kernel", "type"}, "rl, gamma or powerlaw");
  sim.overrides.add<double>(simulate, "--hurst", {"kernel", "hurst"}, "Hurst exponent (rl kernel)");
  sim.overrides.add<double>(simulate, "--alpha", {"kernel", "alpha"}, "Kernel exponent alpha");
  sim.overrides.add<double>(simulate, "--beta", {"kernel", "beta"}, "Kernel decay beta");
  sim.overrides.add<std::string>(simulate, "--scheme", {"scheme"},
                                 "rdonsker_left, rdonsker_matched, hybrid or cholesky");
  sim.overrides.add<std::string>(simulate, "--process", {"process"}, "volterra, variance or log_stock");
  sim.overrides.add<std::string>(simulate, "--format", {"format"}, "csv or binary");

  CLI::App* smile_cmd = app.add_subcommand("smile", "Monte-Carlo implied volatility smile");
  add_common(smile_cmd, smi);
  smile_cmd->add_option("-o,--output", smi.output, "Smile CSV (default smile.csv)");
  add_noise_flags(smile_cmd, smi);
  add_model_flags(smile_cmd, smi);
  smi.overrides.add<std::string>(smile_cmd, "--scheme", {"scheme"}, "rdonsker_left, rdonsker_matched or hybrid");
  smi.overrides.add<std::string>(smile_cmd, "--variance-reduction", {"variance_reduction"},
                                 "none or conditional_bs");
  smi.overrides.list(smile_cmd, "--strikes", {"strikes"}, "Comma-separated strikes");

  CLI::App* price_cmd = app.add_subcommand("price", "Monte-Carlo price of one European option");
  add_common(price_cmd, pri);
  price_cmd->add_option("-o,--output", pri.output, "Also write the JSON record here");
  add_noise_flags(price_cmd, pri);
  add_model_flags(price_cmd, pri);
  pri.overrides.add<std::string>(price_cmd, "--scheme", {"scheme"}, "rdonsker_left, rdonsker_matched or hybrid");
  pri.overrides.add<std::string>(price_cmd, "--variance-reduction", {"variance_reduction"},
                                 "none or conditional_bs");
  pri.overrides.add<double>(price_cmd, "--strike", {"strike"}, "Strike");
  pri.overrides.add<std::string>(price_cmd, "--option", {"option"}, "call or put");

  CLI::App* american = app.add_subcommand("american", "American and European prices on a bushy tree");
  add_common(american, ame);
  american->add_option("-o,--output", ame.output, "Also write the JSON record here");
  add_model_flags(american, ame);
  ame.overrides.add<double>(american, "--horizon", {"horizon"}, "Maturity T");
  ame.overrides.add<double>(american, "--strike", {"strike"}, "Strike");
  ame.overrides.add<std::string>(american, "--option", {"option"}, "call or put (default put)");
  ame.overrides.add<std::int64_t>(american, "--depth", {"tree", "depth"}, "Tree depth n");
  ame.overrides.add<double>(american, "--rate", {"tree", "rate"}, "Interest rate r");
  ame.overrides.add<double>(american, "--dividend", {"tree", "dividend"}, "Dividend yield d");
  ame.overrides.add<std::string>(american, "--eval-mode", {"tree", "eval_mode"},
                                 "left_point or moment_matched");
  ame.overrides.add<std::int64_t>(american, "--branching", {"tree", "branching"}, "2 or 4");
  american->add_option("--dump-tree", dump_tree, "Write all nodes as CSV (depth <= 6)");

  CLI::App* validate_cmd = app.add_subcommand("validate", "Run the built-in oracle checks");
  add_common(validate_cmd, val);
  validate_cmd->add_option("-o,--output", val.output, "Also write the JSON report here");
  validate_cmd->add_option("--inject-fault", fault, "Testing hook: corrupt 'weight_table'");

  CLI::App* bench = app.add_subcommand("bench", "Time path generation and the full pipeline");
  add_common(bench, ben);
  bench->add_option("-o,--output", ben.output, "Also write the JSON report here");
  ben.overrides.add<std::int64_t>(bench, "--trials", {"bench", "trials"}, "Trials per cell (>= 10)");
  ben.overrides.add<std::int64_t>(bench, "--paths", {"bench", "paths"}, "Paths per trial");
  ben.overrides.add<std::int64_t>(bench, "--pipeline-paths", {"bench", "pipeline_paths"},
                                  "Paths for the pipeline comparison (0 skips it)");

  try {
    app.parse(argc, argv);
    if (simulate->parsed()) return cmd_simulate(sim, out);
    if (smile_cmd->parsed()) return cmd_smile(smi, out);
    if (price_cmd->parsed()) return cmd_price(pri, out);
    if (american->parsed()) return cmd_american(ame, dump_tree, out);
    if (validate_cmd->parsed()) return cmd_validate(val, fault, out);
    if (bench->parsed()) return cmd_bench(ben, out);
    return kConfigError;
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kIoError;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return kRuntimeError;
  }
}

}  // namespace roughsim::cli
