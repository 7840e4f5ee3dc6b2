#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nsrl/ppo.hpp"

namespace nsrl::harness {

// Shortest round-trip decimal rendering; used everywhere numbers reach
// disk so reruns are byte-identical.
std::string format_double(double v);

// Append-only JSONL stream plus a final CSV. Every JSONL line is flushed
// immediately so an interrupted run leaves a readable prefix. The CSV
// contains no wall-clock columns and is the reproducibility artifact.
class MetricsWriter {
 public:
  explicit MetricsWriter(const std::filesystem::path& run_dir);

  void write_episode(long long global_step, double reported_return,
                     int length);
  void write_update(long long global_step, double lr,
                    const ppo::UpdateStats& stats, double eps_t,
                    double theta_t);

  // Writes metrics.csv from the accumulated records.
  void finalize();

  static const char* csv_header();

 private:
  struct Row {
    bool is_episode;
    long long step;
    double ret = 0.0;
    int length = 0;
    double lr = 0.0;
    ppo::UpdateStats stats;
    double eps_t = 0.0;
    double theta_t = 0.0;
  };

  long long wall_ms() const;

  std::filesystem::path dir_;
  std::ofstream jsonl_;
  std::vector<Row> rows_;
  std::chrono::steady_clock::time_point start_;
};

// Self-describing run directory: config snapshot, build id, seed, method
// label, timestamps. Written atomically at run start and finalized at end.
struct RunManifest {
  std::string name;
  std::string method;
  uint64_t seed = 0;
  nlohmann::ordered_json config;
  std::string ablation_param;  // optional
  std::string ablation_value;

  void write_started(const std::filesystem::path& run_dir) const;
  void write_finished(const std::filesystem::path& run_dir,
                      long long global_steps, long long episodes,
                      double mean_return_recent) const;
};

nlohmann::ordered_json load_manifest(const std::filesystem::path& run_dir);

}  // namespace nsrl::harness
