#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "nsrl/adam.hpp"
#include "nsrl/distribution.hpp"
#include "nsrl/env/env.hpp"
#include "nsrl/guidance.hpp"
#include "nsrl/logic/indicator.hpp"
#include "nsrl/logic/reward_machine.hpp"
#include "nsrl/logic/rules.hpp"
#include "nsrl/mlp.hpp"
#include "nsrl/rng.hpp"

namespace nsrl::ppo {

struct Hyperparams {
  double learning_rate = 3e-4;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_coef = 0.2;
  double ent_coef = 0.01;
  double vf_coef = 0.5;
  double max_grad_norm = 0.5;
  int num_steps = 128;
  int num_envs = 4;
  int num_minibatches = 4;
  int update_epochs = 4;
  long long total_timesteps = 5'000'000;
  bool anneal_lr = true;
  bool norm_adv = true;
  bool clip_vloss = true;

  int batch_size() const { return num_envs * num_steps; }
  int minibatch_size() const { return batch_size() / num_minibatches; }
  void validate() const;
};

// Per (env, step) storage for one collection; fully written before any
// update reads it. Rewards are training rewards (shaped under the RM
// baseline); next_values carry the bootstrap convention: V(s_{t+1}) for
// ongoing steps, V(final obs) at truncations, 0 at true terminals.
struct RolloutBuffer {
  int num_steps = 0;
  int num_envs = 0;
  int obs_dim = 0;
  int num_actions = 0;

  std::vector<double> obs;
  std::vector<int> actions;
  std::vector<double> logprobs;
  std::vector<double> rewards;
  std::vector<double> values;
  std::vector<double> next_values;
  std::vector<uint8_t> dones;  // episode ended during step t
  std::vector<uint8_t> masks;  // entailment mask per slot, num_actions wide

  void resize(int steps, int envs, int obs_dim_, int num_actions_);
  int slot(int t, int n) const { return t * num_envs + n; }
  int size() const { return num_steps * num_envs; }
};

struct Advantage {
  std::vector<double> adv;
  std::vector<double> returns;
};

// Backward-recursive GAE. delta_t = r_t + gamma * next_values_t - values_t;
// accumulation resets across episode boundaries (dones).
Advantage compute_gae(const std::vector<double>& rewards,
                      const std::vector<double>& values,
                      const std::vector<uint8_t>& dones,
                      const std::vector<double>& next_values, int num_steps,
                      int num_envs, double gamma, double gae_lambda);

// Batch mean of min(rho * adv, clip(rho) * adv); this is the maximized
// surrogate (it enters the total loss negated).
double clipped_policy_loss(const std::vector<double>& logp_new,
                           const std::vector<double>& logp_old,
                           const std::vector<double>& adv, double clip_coef);

// 0.5 * mean squared error, optionally with the clipped-value variant.
double value_loss(const std::vector<double>& values_new,
                  const std::vector<double>& values_old,
                  const std::vector<double>& returns, double clip_coef,
                  bool clip_vloss);

// -policy_term + c1 * value_term - c2 * entropy.
double total_ppo_loss(double policy_term, double value_term, double entropy,
                      double vf_coef, double ent_coef);

// Linear decay to zero over training.
double lr_schedule(long long global_step, long long total_timesteps,
                   double lr0);

// In-place standardization to mean 0 / std 1 (+1e-8), as applied per
// minibatch when norm_adv is on.
void normalize_advantages(std::vector<double>& adv);

struct UpdateStats {
  double policy_loss = 0.0;  // mean clipped surrogate (maximized term)
  double value_loss = 0.0;
  double entropy = 0.0;
  double sym_loss = 0.0;
  double approx_kl = 0.0;
  double clip_frac = 0.0;
};

struct EpisodeRecord {
  long long global_step = 0;  // env step at which the episode ended
  double reported_return = 0.0;
  double train_return = 0.0;  // includes shaping; never reported
  int length = 0;
};

struct IterationOutput {
  long long global_step = 0;  // after the iteration
  double lr = 0.0;
  double eps_t = 0.0;    // product schedule value at iteration start
  double theta_t = 0.0;  // symloss weight used by this update
  UpdateStats stats;
  std::vector<EpisodeRecord> episodes;
};

// One training context: vectorized envs, policy/value networks, the
// guidance mode, and all run-local random streams. Single-threaded;
// separate runs are independent.
class Learner {
 public:
  Learner(const env::EnvConfig& env_config, const Hyperparams& hp,
          const guidance::GuidanceConfig& guide,
          logic::SymbolicPolicy sym_policy, uint64_t seed);

  IterationOutput run_iteration();
  long long num_iterations() const;
  long long global_step() const { return global_step_; }

  void collect_rollouts();
  UpdateStats train_update(double lr, double theta_t);

  Mlp& policy() { return policy_; }
  Mlp& value() { return value_; }
  RolloutBuffer& buffer() { return buffer_; }
  const Hyperparams& hyperparams() const { return hp_; }
  env::Environment& environment(int i) { return *envs_[i]; }

 private:
  double progress() const;

  env::EnvConfig env_config_;
  Hyperparams hp_;
  guidance::GuidanceConfig guide_;
  logic::SymbolicPolicy sym_policy_;
  bool needs_mask_ = false;

  std::vector<std::unique_ptr<env::Environment>> envs_;
  std::vector<env::Observation> current_obs_;
  std::vector<long long> episode_index_;
  std::vector<double> episode_return_;
  std::vector<double> episode_train_return_;
  std::vector<int> episode_length_;

  std::optional<logic::RewardMachine> rm_;
  std::vector<int> rm_state_;

  Mlp policy_;
  Mlp value_;
  AdamState policy_adam_;
  AdamState value_adam_;

  RolloutBuffer buffer_;
  Rng rng_;
  uint64_t seed_;
  long long global_step_ = 0;
  long long iteration_ = 0;
  std::vector<EpisodeRecord> pending_episodes_;
};

}  // namespace nsrl::ppo
