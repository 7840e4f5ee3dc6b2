#pragma once

#include <string>
#include <vector>

#include "nsrl/distribution.hpp"
#include "nsrl/logic/indicator.hpp"

namespace nsrl::guidance {

enum class Mode { kNone, kProduct, kSymLoss, kRewardMachine };

Mode mode_from_string(const std::string& s);
std::string to_string(Mode m);

// Sampling-time reweighting (H-PPO-Product).
struct ProductConfig {
  double confidence = 1.0;  // lambda in (0, 1]
  double eps_initial = 1.0;
  double eps_rate = 0.4;
  double eps_final = 0.0;
  // Progress is global_step / total_timesteps; the schedule argument is
  // progress * time_scale so that (1, 0.4, 0) reaches the floor exactly at
  // the end of training.
  double time_scale = 2.5;

  void validate() const;
};

// Symbolic auxiliary loss (H-PPO-SymLoss).
struct SymLossConfig {
  double confidence = 0.9;  // eta, strictly inside (0, 1)
  bool schedule = true;     // decaying theta_t; otherwise constant theta
  double theta = 0.5;
  double theta_initial = 1.0;
  double theta_rate = 0.4;
  double theta_final = 0.0;
  double time_scale = 2.5;

  void validate() const;
};

// Reward-machine baseline shaping. Shaping alters the training reward
// only; reported returns always use the base reward.
struct RMShapingConfig {
  double action_bonus = 0.01;    // +- per step on (non-)entailed actions
  double progress_bonus = 0.1;   // * automaton delta
  bool plant_sink = false;

  void validate() const;
};

struct GuidanceConfig {
  Mode mode = Mode::kNone;
  ProductConfig product;
  SymLossConfig symloss;
  RMShapingConfig rm;

  void validate() const;
};

// eps_t = max(eps_i - t * eps_r, eps_f) with t = progress * time_scale.
double epsilon_at(double progress, const ProductConfig& cfg);

// Same schedule for theta, or the constant when scheduling is off.
double theta_at(double progress, const SymLossConfig& cfg);

// pi~(a|s) proportional to pi(a|s) * m(a), m(a) = 1 + lambda * eps_t for
// entailed actions and 1 otherwise. Returns the input distribution
// unchanged (bit-exact) when the reweighting is a no-op: eps*lambda = 0 or
// a uniform mask.
CategoricalDistribution reweighted_distribution(
    const CategoricalDistribution& dist, const logic::IndicatorMask& mask,
    double confidence, double eps_t);

// pi_ref with weights eta / (1 - eta); strictly positive everywhere.
CategoricalDistribution reference_distribution(
    const logic::IndicatorMask& mask, double eta);

// Clipped surrogate against the reference policy: mean over the batch of
// min(rho_sym * adv, clip(rho_sym) * adv), rho_sym = exp(logp - logp_ref).
double symbolic_loss(const std::vector<double>& logp_new,
                     const std::vector<double>& logp_ref,
                     const std::vector<double>& adv, double clip_coef);

// L_total = L_ppo - theta_t * L_sym.
double combined_loss(double ppo_loss, double sym_loss, double theta_t);

struct ShapedReward {
  double train;
  double report;
};

ShapedReward rm_shaped_reward(double base_reward, bool action_entailed,
                              int rm_delta, const RMShapingConfig& cfg);

}  // namespace nsrl::guidance
