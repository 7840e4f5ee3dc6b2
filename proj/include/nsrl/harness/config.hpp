#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "nsrl/env/env.hpp"
#include "nsrl/guidance.hpp"
#include "nsrl/ppo.hpp"

namespace nsrl::harness {

using ordered_json = nlohmann::ordered_json;

// One experiment: environment, hyperparameters, guidance, seed list and
// output location. Serialized as a single JSON file; CLI flags override
// individual keys.
struct ExperimentConfig {
  std::string name;
  env::EnvConfig environment;
  ppo::Hyperparams hp;
  guidance::GuidanceConfig guide;
  std::string rules_path;
  std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};
  long long eval_interval = 4096;  // step grid used by aggregation
  std::string output_dir = "runs";

  void validate() const;
};

// Strict schema: unknown keys are rejected, types checked, ranges
// validated. Throws ConfigError with the offending key path.
ExperimentConfig config_from_json(const ordered_json& j);
ordered_json config_to_json(const ExperimentConfig& config);

ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const ExperimentConfig& config,
                 const std::filesystem::path& path);

// Bundled task identifiers mirroring the benchmark suite.
std::vector<std::string> known_tasks();

// Full-scale defaults for a bundled task.
ExperimentConfig default_config(const std::string& task_id);

// Desk-scale preset: heavily reduced total_timesteps and 3 seeds, used by
// the acceptance suite and for local iteration.
void apply_desk_preset(ExperimentConfig& config);

// Resolves the rule file path relative to the config file location when it
// is not found relative to the working directory.
std::string resolve_rules_path(const std::filesystem::path& config_path,
                               const std::string& rules_path);

}  // namespace nsrl::harness
