#include "nsrl/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nsrl/autodiff.hpp"
#include "nsrl/errors.hpp"

namespace nsrl::ppo {

void Hyperparams::validate() const {
  if (gamma < 0.0 || gamma > 1.0) throw ConfigError("gamma must be in [0,1]");
  if (gae_lambda < 0.0 || gae_lambda > 1.0) {
    throw ConfigError("gae_lambda must be in [0,1]");
  }
  if (clip_coef <= 0.0) throw ConfigError("clip_coef must be > 0");
  if (learning_rate <= 0.0) throw ConfigError("learning_rate must be > 0");
  if (num_steps <= 0 || num_envs <= 0) {
    throw ConfigError("num_steps and num_envs must be positive");
  }
  if (num_minibatches <= 0 || update_epochs <= 0) {
    throw ConfigError("num_minibatches and update_epochs must be positive");
  }
  if (batch_size() % num_minibatches != 0) {
    throw ConfigError("batch_size " + std::to_string(batch_size()) +
                      " is not divisible by num_minibatches " +
                      std::to_string(num_minibatches));
  }
  if (total_timesteps < batch_size()) {
    throw ConfigError("total_timesteps smaller than one batch");
  }
}

void RolloutBuffer::resize(int steps, int envs, int obs_dim_,
                           int num_actions_) {
  num_steps = steps;
  num_envs = envs;
  obs_dim = obs_dim_;
  num_actions = num_actions_;
  const size_t n = static_cast<size_t>(steps) * envs;
  obs.assign(n * obs_dim, 0.0);
  actions.assign(n, 0);
  logprobs.assign(n, 0.0);
  rewards.assign(n, 0.0);
  values.assign(n, 0.0);
  next_values.assign(n, 0.0);
  dones.assign(n, 0);
  masks.assign(n * num_actions, 0);
}

Advantage compute_gae(const std::vector<double>& rewards,
                      const std::vector<double>& values,
                      const std::vector<uint8_t>& dones,
                      const std::vector<double>& next_values, int num_steps,
                      int num_envs, double gamma, double gae_lambda) {
  const size_t n = static_cast<size_t>(num_steps) * num_envs;
  if (rewards.size() != n || values.size() != n || dones.size() != n ||
      next_values.size() != n) {
    throw UsageError("compute_gae: shape mismatch");
  }
  Advantage out;
  out.adv.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  for (int e = 0; e < num_envs; ++e) {
    double acc = 0.0;
    for (int t = num_steps - 1; t >= 0; --t) {
      const size_t i = static_cast<size_t>(t) * num_envs + e;
      const double delta =
          rewards[i] + gamma * next_values[i] - values[i];
      acc = delta + gamma * gae_lambda * (dones[i] ? 0.0 : acc);
      out.adv[i] = acc;
      out.returns[i] = acc + values[i];
    }
  }
  return out;
}

double clipped_policy_loss(const std::vector<double>& logp_new,
                           const std::vector<double>& logp_old,
                           const std::vector<double>& adv, double clip_coef) {
  if (logp_new.size() != logp_old.size() || logp_new.size() != adv.size()) {
    throw UsageError("clipped_policy_loss: size mismatch");
  }
  double acc = 0.0;
  for (size_t i = 0; i < logp_new.size(); ++i) {
    const double rho = std::exp(logp_new[i] - logp_old[i]);
    const double clipped = std::clamp(rho, 1.0 - clip_coef, 1.0 + clip_coef);
    acc += std::min(rho * adv[i], clipped * adv[i]);
  }
  return acc / static_cast<double>(logp_new.size());
}

double value_loss(const std::vector<double>& values_new,
                  const std::vector<double>& values_old,
                  const std::vector<double>& returns, double clip_coef,
                  bool clip_vloss) {
  if (values_new.size() != values_old.size() ||
      values_new.size() != returns.size()) {
    throw UsageError("value_loss: size mismatch");
  }
  double acc = 0.0;
  for (size_t i = 0; i < values_new.size(); ++i) {
    const double err = values_new[i] - returns[i];
    if (clip_vloss) {
      const double clipped =
          values_old[i] + std::clamp(values_new[i] - values_old[i],
                                     -clip_coef, clip_coef);
      const double cerr = clipped - returns[i];
      acc += std::max(err * err, cerr * cerr);
    } else {
      acc += err * err;
    }
  }
  return 0.5 * acc / static_cast<double>(values_new.size());
}

double total_ppo_loss(double policy_term, double value_term, double entropy,
                      double vf_coef, double ent_coef) {
  return -policy_term + vf_coef * value_term - ent_coef * entropy;
}

double lr_schedule(long long global_step, long long total_timesteps,
                   double lr0) {
  return lr0 * (1.0 - static_cast<double>(global_step) /
                          static_cast<double>(total_timesteps));
}

void normalize_advantages(std::vector<double>& adv) {
  const double n = static_cast<double>(adv.size());
  double mean = 0.0;
  for (double a : adv) mean += a;
  mean /= n;
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  const double std = std::sqrt(var / n);
  for (double& a : adv) a = (a - mean) / (std + 1e-8);
}

Learner::Learner(const env::EnvConfig& env_config, const Hyperparams& hp,
                 const guidance::GuidanceConfig& guide,
                 logic::SymbolicPolicy sym_policy, uint64_t seed)
    : env_config_(env_config),
      hp_(hp),
      guide_(guide),
      sym_policy_(std::move(sym_policy)),
      rng_(derive_seed(seed, 2)),
      seed_(seed) {
  hp_.validate();
  guide_.validate();
  env_config_.validate();

  needs_mask_ = guide_.mode != guidance::Mode::kNone;
  if (needs_mask_ && sym_policy_.rules.empty()) {
    throw ConfigError("guidance mode " + guidance::to_string(guide_.mode) +
                      " requires a symbolic policy (rule file)");
  }

  for (int n = 0; n < hp_.num_envs; ++n) {
    envs_.push_back(env::make_env(env_config_));
    episode_index_.push_back(0);
    current_obs_.push_back(envs_[n]->reset(derive_seed(seed_, 3, n, 0)));
  }
  episode_return_.assign(hp_.num_envs, 0.0);
  episode_train_return_.assign(hp_.num_envs, 0.0);
  episode_length_.assign(hp_.num_envs, 0);

  if (guide_.mode == guidance::Mode::kRewardMachine) {
    rm_ = env::build_reward_machine(env_config_, guide_.rm.plant_sink);
    rm_state_.assign(hp_.num_envs, rm_->initial);
  }

  const int obs_dim = envs_[0]->observation_size();
  const int num_actions = envs_[0]->num_actions();
  Rng init_rng(derive_seed(seed_, 1));
  policy_ = make_mlp({obs_dim, 64, 64, num_actions},
                     {std::sqrt(2.0), std::sqrt(2.0), 0.01}, init_rng);
  value_ = make_mlp({obs_dim, 64, 64, 1},
                    {std::sqrt(2.0), std::sqrt(2.0), 1.0}, init_rng);
  policy_adam_ = make_adam_state(policy_.params);
  value_adam_ = make_adam_state(value_.params);

  buffer_.resize(hp_.num_steps, hp_.num_envs, obs_dim, num_actions);
}

long long Learner::num_iterations() const {
  return hp_.total_timesteps / hp_.batch_size();
}

double Learner::progress() const {
  return static_cast<double>(global_step_) /
         static_cast<double>(hp_.total_timesteps);
}

void Learner::collect_rollouts() {
  const int num_actions = buffer_.num_actions;
  for (int t = 0; t < hp_.num_steps; ++t) {
    const double eps_t = guidance::epsilon_at(progress(), guide_.product);
    for (int n = 0; n < hp_.num_envs; ++n) {
      env::Environment& e = *envs_[n];
      const env::Observation& obs = current_obs_[n];
      const int i = buffer_.slot(t, n);

      std::copy(obs.begin(), obs.end(),
                buffer_.obs.begin() + static_cast<size_t>(i) * buffer_.obs_dim);

      const CategoricalDistribution dist =
          distribution_from_logits(policy_.forward(obs));

      logic::IndicatorMask mask(num_actions, 0);
      if (needs_mask_) {
        mask = logic::indicator_mask(sym_policy_, e.ground_state(), e);
      }
      std::copy(mask.begin(), mask.end(),
                buffer_.masks.begin() +
                    static_cast<size_t>(i) * buffer_.num_actions);

      int action;
      double logp;
      if (guide_.mode == guidance::Mode::kProduct) {
        const CategoricalDistribution guided = guidance::reweighted_distribution(
            dist, mask, guide_.product.confidence, eps_t);
        action = sample(guided, rng_);
        logp = guided.log_probs[action];
      } else {
        action = sample(dist, rng_);
        logp = dist.log_probs[action];
      }

      const double v = value_.forward(obs)[0];
      env::StepResult sr = e.step(action);

      double train_reward = sr.reward;
      if (guide_.mode == guidance::Mode::kRewardMachine) {
        const auto rm_step = rm_->step(rm_state_[n], sr.events);
        rm_state_[n] = rm_step.state;
        const auto shaped = guidance::rm_shaped_reward(
            sr.reward, mask[action] != 0, rm_step.delta, guide_.rm);
        train_reward = shaped.train;
      }

      buffer_.actions[i] = action;
      buffer_.logprobs[i] = logp;
      buffer_.rewards[i] = train_reward;
      buffer_.values[i] = v;
      buffer_.dones[i] = sr.done ? 1 : 0;

      episode_return_[n] += sr.reward;
      episode_train_return_[n] += train_reward;
      episode_length_[n] += 1;

      if (sr.done) {
        buffer_.next_values[i] =
            sr.truncated ? value_.forward(sr.obs)[0] : 0.0;
        EpisodeRecord rec;
        rec.global_step = global_step_ + static_cast<long long>(t) *
                                             hp_.num_envs + n + 1;
        rec.reported_return = episode_return_[n];
        rec.train_return = episode_train_return_[n];
        rec.length = episode_length_[n];
        pending_episodes_.push_back(rec);

        episode_return_[n] = 0.0;
        episode_train_return_[n] = 0.0;
        episode_length_[n] = 0;
        episode_index_[n] += 1;
        current_obs_[n] =
            e.reset(derive_seed(seed_, 3, n, episode_index_[n]));
        if (rm_) rm_state_[n] = rm_->initial;
      } else {
        current_obs_[n] = std::move(sr.obs);
      }
    }
    global_step_ += hp_.num_envs;
  }

  // V(s_{t+1}) for non-terminal slots: the next row's stored value, or the
  // bootstrap value of the live observation for the final row.
  for (int n = 0; n < hp_.num_envs; ++n) {
    for (int t = 0; t < hp_.num_steps; ++t) {
      const int i = buffer_.slot(t, n);
      if (buffer_.dones[i]) continue;
      if (t + 1 < hp_.num_steps) {
        buffer_.next_values[i] = buffer_.values[buffer_.slot(t + 1, n)];
      } else {
        buffer_.next_values[i] = value_.forward(current_obs_[n])[0];
      }
    }
  }
}

UpdateStats Learner::train_update(double lr, double theta_t) {
  const int batch = hp_.batch_size();
  const int mb_size = hp_.minibatch_size();
  const double clip = hp_.clip_coef;

  const Advantage gae =
      compute_gae(buffer_.rewards, buffer_.values, buffer_.dones,
                  buffer_.next_values, hp_.num_steps, hp_.num_envs, hp_.gamma,
                  hp_.gae_lambda);

  std::vector<int> inds(batch);
  std::iota(inds.begin(), inds.end(), 0);

  UpdateStats stats;
  int num_updates = 0;

  for (int epoch = 0; epoch < hp_.update_epochs; ++epoch) {
    rng_.shuffle(inds);
    for (int start = 0; start < batch; start += mb_size) {
      Tensor mb_obs(mb_size, buffer_.obs_dim);
      std::vector<int> mb_actions(mb_size);
      Tensor mb_logp_old(mb_size, 1);
      Tensor mb_adv(mb_size, 1);
      Tensor mb_returns(mb_size, 1);
      Tensor mb_values_old(mb_size, 1);
      Tensor mb_logp_ref(mb_size, 1);
      const bool use_sym =
          guide_.mode == guidance::Mode::kSymLoss && theta_t != 0.0;

      for (int k = 0; k < mb_size; ++k) {
        const int i = inds[start + k];
        std::copy(buffer_.obs.begin() + static_cast<size_t>(i) * buffer_.obs_dim,
                  buffer_.obs.begin() +
                      static_cast<size_t>(i + 1) * buffer_.obs_dim,
                  mb_obs.row(k));
        mb_actions[k] = buffer_.actions[i];
        mb_logp_old.data[k] = buffer_.logprobs[i];
        mb_adv.data[k] = gae.adv[i];
        mb_returns.data[k] = gae.returns[i];
        mb_values_old.data[k] = buffer_.values[i];
        if (use_sym) {
          logic::IndicatorMask mask(
              buffer_.masks.begin() +
                  static_cast<size_t>(i) * buffer_.num_actions,
              buffer_.masks.begin() +
                  static_cast<size_t>(i + 1) * buffer_.num_actions);
          const CategoricalDistribution ref =
              guidance::reference_distribution(mask, guide_.symloss.confidence);
          mb_logp_ref.data[k] = ref.log_probs[buffer_.actions[i]];
        }
      }

      if (hp_.norm_adv) normalize_advantages(mb_adv.data);

      Tape tape;
      const Tape::Var x = tape.constant(std::move(mb_obs));
      const Tape::Var logits = policy_.forward_on_tape(tape, x);
      const Tape::Var logp_all = tape.log_softmax_rows(logits);
      const Tape::Var logp_new = tape.gather_cols(logp_all, mb_actions);
      const Tape::Var entropy =
          tape.mean_all(tape.entropy_from_log_probs(logp_all));
      const Tape::Var adv = tape.constant(mb_adv);
      const Tape::Var ratio =
          tape.exp_elem(tape.sub(logp_new, tape.constant(mb_logp_old)));
      const Tape::Var surrogate = tape.mean_all(tape.minimum(
          tape.mul(ratio, adv),
          tape.mul(tape.clamp(ratio, 1.0 - clip, 1.0 + clip), adv)));

      const Tape::Var v = value_.forward_on_tape(tape, x);
      const Tape::Var returns_c = tape.constant(mb_returns);
      Tape::Var vloss;
      if (hp_.clip_vloss) {
        const Tape::Var values_old_c = tape.constant(mb_values_old);
        const Tape::Var v_err = tape.square(tape.sub(v, returns_c));
        const Tape::Var v_clipped = tape.add(
            values_old_c,
            tape.clamp(tape.sub(v, values_old_c), -clip, clip));
        const Tape::Var v_cerr = tape.square(tape.sub(v_clipped, returns_c));
        vloss = tape.scale(tape.mean_all(tape.maximum(v_err, v_cerr)), 0.5);
      } else {
        vloss = tape.scale(tape.mean_all(tape.square(tape.sub(v, returns_c))),
                           0.5);
      }

      Tape::Var total = tape.add(
          tape.add(tape.scale(surrogate, -1.0), tape.scale(vloss, hp_.vf_coef)),
          tape.scale(entropy, -hp_.ent_coef));

      double sym_value = 0.0;
      if (use_sym) {
        const Tape::Var ratio_sym =
            tape.exp_elem(tape.sub(logp_new, tape.constant(mb_logp_ref)));
        const Tape::Var lsym = tape.mean_all(tape.minimum(
            tape.mul(ratio_sym, adv),
            tape.mul(tape.clamp(ratio_sym, 1.0 - clip, 1.0 + clip), adv)));
        sym_value = tape.scalar(lsym);
        total = tape.add(total, tape.scale(lsym, -theta_t));
      }

      const double total_value = tape.scalar(total);
      if (!std::isfinite(total_value)) {
        throw NumericError(
            "train_update: non-finite loss (surrogate=" +
            std::to_string(tape.scalar(surrogate)) +
            ", value=" + std::to_string(tape.scalar(vloss)) +
            ", entropy=" + std::to_string(tape.scalar(entropy)) +
            ") at global step " + std::to_string(global_step_));
      }

      tape.backward(total);
      adam_update(policy_.params, policy_adam_, lr, hp_.max_grad_norm);
      adam_update(value_.params, value_adam_, lr, hp_.max_grad_norm);

      // diagnostics from this minibatch
      const Tensor& ratio_v = tape.value(ratio);
      double kl = 0.0;
      int clipped_count = 0;
      for (double r : ratio_v.data) {
        kl += (r - 1.0) - std::log(r);
        if (std::abs(r - 1.0) > clip) ++clipped_count;
      }
      stats.policy_loss += tape.scalar(surrogate);
      stats.value_loss += tape.scalar(vloss);
      stats.entropy += tape.scalar(entropy);
      stats.sym_loss += sym_value;
      stats.approx_kl += kl / mb_size;
      stats.clip_frac += static_cast<double>(clipped_count) / mb_size;
      ++num_updates;
    }
  }

  stats.policy_loss /= num_updates;
  stats.value_loss /= num_updates;
  stats.entropy /= num_updates;
  stats.sym_loss /= num_updates;
  stats.approx_kl /= num_updates;
  stats.clip_frac /= num_updates;
  return stats;
}

IterationOutput Learner::run_iteration() {
  IterationOutput out;
  out.lr = hp_.anneal_lr
               ? lr_schedule(global_step_, hp_.total_timesteps,
                             hp_.learning_rate)
               : hp_.learning_rate;
  out.eps_t = guide_.mode == guidance::Mode::kProduct
                  ? guidance::epsilon_at(progress(), guide_.product)
                  : 0.0;
  out.theta_t = guide_.mode == guidance::Mode::kSymLoss
                    ? guidance::theta_at(progress(), guide_.symloss)
                    : 0.0;

  collect_rollouts();
  out.stats = train_update(out.lr, out.theta_t);
  out.global_step = global_step_;
  out.episodes = std::move(pending_episodes_);
  pending_episodes_.clear();
  iteration_ += 1;
  return out;
}

}  // namespace nsrl::ppo
