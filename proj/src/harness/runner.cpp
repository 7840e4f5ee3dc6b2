#include "nsrl/harness/runner.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "nsrl/errors.hpp"
#include "nsrl/harness/metrics.hpp"
#include "nsrl/logic/rules.hpp"

namespace nsrl::harness {

namespace fs = std::filesystem;

std::string method_label(guidance::Mode mode) {
  switch (mode) {
    case guidance::Mode::kNone: return "ppo";
    case guidance::Mode::kProduct: return "product";
    case guidance::Mode::kSymLoss: return "symloss";
    case guidance::Mode::kRewardMachine: return "ppo_rm";
  }
  return "ppo";
}

namespace {

logic::SymbolicPolicy load_policy(const ExperimentConfig& config) {
  if (config.guide.mode == guidance::Mode::kNone || config.rules_path.empty()) {
    return {};
  }
  return logic::parse_rules_file(config.rules_path);
}

fs::path run_dir_for(const ExperimentConfig& config, uint64_t seed,
                     const std::string& ablation_param,
                     const std::string& ablation_value) {
  fs::path dir = fs::path(config.output_dir) / config.name;
  if (!ablation_param.empty()) {
    dir /= "ablation_" + ablation_param;
    dir /= ablation_value;
  } else {
    dir /= method_label(config.guide.mode);
  }
  dir /= "seed" + std::to_string(seed);
  return dir;
}

}  // namespace

RunInfo run_single_seed(const ExperimentConfig& config, uint64_t seed,
                        std::ostream& log, const std::string& ablation_param,
                        const std::string& ablation_value) {
  config.validate();
  const fs::path dir =
      run_dir_for(config, seed, ablation_param, ablation_value);

  RunManifest manifest;
  manifest.name = config.name;
  manifest.method = method_label(config.guide.mode);
  manifest.seed = seed;
  manifest.config = config_to_json(config);
  manifest.ablation_param = ablation_param;
  manifest.ablation_value = ablation_value;
  manifest.write_started(dir);

  MetricsWriter metrics(dir);
  ppo::Learner learner(config.environment, config.hp, config.guide,
                       load_policy(config), seed);

  std::vector<double> recent_returns;
  long long episodes = 0;
  const long long iterations = learner.num_iterations();
  for (long long it = 0; it < iterations; ++it) {
    const ppo::IterationOutput out = learner.run_iteration();
    for (const ppo::EpisodeRecord& ep : out.episodes) {
      metrics.write_episode(ep.global_step, ep.reported_return, ep.length);
      recent_returns.push_back(ep.reported_return);
      if (recent_returns.size() > 100) {
        recent_returns.erase(recent_returns.begin());
      }
      ++episodes;
    }
    metrics.write_update(out.global_step, out.lr, out.stats, out.eps_t,
                         out.theta_t);
    if ((it + 1) % 64 == 0 || it + 1 == iterations) {
      double mean = 0.0;
      for (double r : recent_returns) mean += r;
      if (!recent_returns.empty()) mean /= recent_returns.size();
      log << "  [" << config.name << "/" << manifest.method << "/seed" << seed
          << "] step " << out.global_step << "/" << config.hp.total_timesteps
          << "  episodes " << episodes << "  return(100) " << mean << "\n";
      log.flush();
    }
  }
  metrics.finalize();

  double mean = 0.0;
  for (double r : recent_returns) mean += r;
  if (!recent_returns.empty()) mean /= recent_returns.size();
  manifest.write_finished(dir, learner.global_step(), episodes, mean);

  RunInfo info;
  info.dir = dir;
  info.seed = seed;
  info.global_steps = learner.global_step();
  info.episodes = episodes;
  info.mean_return_recent = mean;
  return info;
}

std::vector<RunInfo> run(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  std::vector<RunInfo> results;
  for (uint64_t seed : config.seeds) {
    results.push_back(run_single_seed(config, seed, log));
  }
  log << "== " << config.name << " (" << method_label(config.guide.mode)
      << "): " << results.size() << " run(s) complete\n";
  for (const RunInfo& r : results) {
    log << "   seed " << r.seed << ": " << r.episodes
        << " episodes, return(100) " << r.mean_return_recent << " -> "
        << r.dir.string() << "\n";
  }
  return results;
}

std::vector<RunInfo> ablation_grid(const ExperimentConfig& base,
                                   const std::string& param,
                                   std::ostream& log) {
  std::vector<RunInfo> results;
  const auto run_point = [&](const ExperimentConfig& cfg,
                             const std::string& value) {
    for (uint64_t seed : cfg.seeds) {
      results.push_back(run_single_seed(cfg, seed, log, param, value));
    }
  };

  if (param == "theta") {
    for (double theta : {0.25, 0.5, 0.75, 1.0}) {
      ExperimentConfig cfg = base;
      cfg.guide.mode = guidance::Mode::kSymLoss;
      cfg.guide.symloss.schedule = false;
      cfg.guide.symloss.theta = theta;
      std::ostringstream tag;
      tag << "const_" << theta;
      run_point(cfg, tag.str());
    }
    ExperimentConfig cfg = base;
    cfg.guide.mode = guidance::Mode::kSymLoss;
    cfg.guide.symloss.schedule = true;
    run_point(cfg, "decay");
  } else if (param == "epsilon_f") {
    for (double eps_f : {0.0, 0.2, 0.4}) {
      ExperimentConfig cfg = base;
      cfg.guide.mode = guidance::Mode::kProduct;
      cfg.guide.product.eps_final = eps_f;
      std::ostringstream tag;
      tag << eps_f;
      run_point(cfg, tag.str());
    }
  } else {
    throw ConfigError("ablation parameter must be theta or epsilon_f, got '" +
                      param + "'");
  }
  log << "== ablation " << param << ": " << results.size()
      << " runs complete\n";
  return results;
}

}  // namespace nsrl::harness
