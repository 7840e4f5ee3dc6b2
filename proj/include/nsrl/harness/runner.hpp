#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "nsrl/harness/config.hpp"

namespace nsrl::harness {

// Curve label used in manifests, aggregation and plots.
std::string method_label(guidance::Mode mode);

struct RunInfo {
  std::filesystem::path dir;
  uint64_t seed = 0;
  long long global_steps = 0;
  long long episodes = 0;
  double mean_return_recent = 0.0;  // over the last 100 episodes
};

// Trains one seed and writes manifest + metrics into
//   <output_dir>/<name>/<method>/seed<seed>
// (or an ablation-tagged directory). Crash-safe: metrics lines are flushed
// as they are produced.
RunInfo run_single_seed(const ExperimentConfig& config, uint64_t seed,
                        std::ostream& log,
                        const std::string& ablation_param = "",
                        const std::string& ablation_value = "");

// One training run per configured seed; prints an exit summary.
std::vector<RunInfo> run(const ExperimentConfig& config, std::ostream& log);

// Sweeps theta (4 constants + the decaying schedule) or epsilon_f
// (3 constant terminal values) around the base config.
std::vector<RunInfo> ablation_grid(const ExperimentConfig& base,
                                   const std::string& param,
                                   std::ostream& log);

}  // namespace nsrl::harness
