#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "hkreg/scenario.hpp"

namespace hkreg {

using Json = nlohmann::ordered_json;

/// Malformed configuration: unknown key, bad type, invalid value.
/// Maps to exit 64 in the CLI; the message names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Fully parsed and validated experiment configuration. Defaults are merged
/// in before any computation starts; unknown keys are rejected.
struct ExperimentConfig {
  Json doc;
  bool has_user_scenario = false;
  std::uint64_t base_seed = 1;
  std::string output_dir = "out";
  int jobs = 1;

  /// Scenario JSON for a purpose ("default", "bias", "rates"); the user's
  /// scenario, when present, wins for every purpose.
  Json scenario_json(const std::string& purpose) const;

  /// Config subtree echoed into reports: everything that identifies the
  /// experiment (seed, quadrature, scenario, command parameters), but not
  /// execution machinery like jobs or output paths.
  Json snapshot(const std::string& command, const Json& scenario_used) const;
};

Json default_config();
Json default_scenario(const std::string& purpose);

/// Parse (optionally from a file), validate every key and value, merge over
/// the defaults. Throws ConfigError naming the first offending key.
ExperimentConfig load_config(const std::optional<std::string>& path);

/// CLI flag overrides; flags are the single source of truth for these.
void apply_overrides(ExperimentConfig& cfg, std::optional<std::uint64_t> seed,
                     std::optional<std::string> out_dir, std::optional<int> jobs);

Scenario build_scenario(const Json& scenario_json);
KernelSpec kernel_from_json(const Json& j);
Json kernel_to_json(const KernelSpec& spec);

}  // namespace hkreg
