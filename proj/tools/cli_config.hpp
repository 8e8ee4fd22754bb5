#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "roughsim/roughsim.hpp"

namespace roughsim::cli {

using json = nlohmann::json;

/// Loads a JSON config file; throws IoError or ConfigError.
json load_config_file(const std::string& path);

/// Throws ConfigError naming the first key of obj not in allowed.
void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& where);

/// Checks the top-level layout of a run configuration.
void check_top_level(const json& cfg);

KernelSpec parse_kernel(const json& cfg);
NoiseConfig parse_noise(const json& cfg, std::optional<double> model_rho);
ModelSpec parse_model(const json& cfg);
MCConfig parse_mc(const json& cfg, const ModelSpec& model);
TreeConfig parse_tree(const json& cfg, const ModelSpec& model);
std::vector<double> parse_strikes(const json& cfg);
Payoff parse_payoff(const json& cfg, OptionType default_type);
double parse_horizon(const json& cfg);

/// FNV-1a hash of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const json& cfg);

}  // namespace roughsim::cli
