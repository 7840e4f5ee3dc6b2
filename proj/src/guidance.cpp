#include "nsrl/guidance.hpp"

#include <algorithm>
#include <cmath>

#include "nsrl/errors.hpp"

namespace nsrl::guidance {

Mode mode_from_string(const std::string& s) {
  if (s == "none") return Mode::kNone;
  if (s == "product") return Mode::kProduct;
  if (s == "symloss") return Mode::kSymLoss;
  if (s == "rm") return Mode::kRewardMachine;
  throw ConfigError("unknown guidance mode '" + s +
                    "' (expected none|product|symloss|rm)");
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::kNone: return "none";
    case Mode::kProduct: return "product";
    case Mode::kSymLoss: return "symloss";
    case Mode::kRewardMachine: return "rm";
  }
  return "none";
}

void ProductConfig::validate() const {
  if (!(confidence > 0.0) || confidence > 1.0) {
    throw ConfigError("product: confidence must be in (0, 1]");
  }
  if (eps_final < 0.0 || eps_initial < eps_final) {
    throw ConfigError("product: need eps_initial >= eps_final >= 0");
  }
  if (time_scale <= 0.0) throw ConfigError("product: time_scale must be > 0");
}

void SymLossConfig::validate() const {
  if (!(confidence > 0.0) || !(confidence < 1.0)) {
    throw ConfigError(
        "symloss: confidence must be strictly inside (0, 1); 1 would shield");
  }
  if (theta < 0.0) throw ConfigError("symloss: theta must be >= 0");
  if (theta_final < 0.0 || theta_initial < theta_final) {
    throw ConfigError("symloss: need theta_initial >= theta_final >= 0");
  }
  if (time_scale <= 0.0) throw ConfigError("symloss: time_scale must be > 0");
}

void RMShapingConfig::validate() const {
  if (action_bonus < 0.0 || progress_bonus < 0.0) {
    throw ConfigError("rm: shaping magnitudes must be >= 0");
  }
}

void GuidanceConfig::validate() const {
  product.validate();
  symloss.validate();
  rm.validate();
}

double epsilon_at(double progress, const ProductConfig& cfg) {
  const double t = progress * cfg.time_scale;
  return std::max(cfg.eps_initial - t * cfg.eps_rate, cfg.eps_final);
}

double theta_at(double progress, const SymLossConfig& cfg) {
  if (!cfg.schedule) return cfg.theta;
  const double t = progress * cfg.time_scale;
  return std::max(cfg.theta_initial - t * cfg.theta_rate, cfg.theta_final);
}

CategoricalDistribution reweighted_distribution(
    const CategoricalDistribution& dist, const logic::IndicatorMask& mask,
    double confidence, double eps_t) {
  const int n = dist.num_actions();
  if (static_cast<int>(mask.size()) != n) {
    throw UsageError("reweighted_distribution: mask length != action count");
  }
  const double boost = confidence * eps_t;
  if (boost == 0.0) return dist;
  const bool any = std::any_of(mask.begin(), mask.end(),
                               [](uint8_t m) { return m != 0; });
  const bool all = std::all_of(mask.begin(), mask.end(),
                               [](uint8_t m) { return m != 0; });
  if (!any || all) return dist;  // uniform multiplier cancels

  std::vector<double> probs(n);
  double z = 0.0;
  for (int a = 0; a < n; ++a) {
    probs[a] = dist.probs[a] * (mask[a] ? 1.0 + boost : 1.0);
    z += probs[a];
  }
  for (double& p : probs) p /= z;
  return distribution_from_probs(std::move(probs));
}

CategoricalDistribution reference_distribution(
    const logic::IndicatorMask& mask, double eta) {
  if (!(eta > 0.0) || !(eta < 1.0)) {
    throw ConfigError("reference_distribution: eta must be in (0, 1)");
  }
  const int n = static_cast<int>(mask.size());
  std::vector<double> probs(n);
  double z = 0.0;
  for (int a = 0; a < n; ++a) {
    probs[a] = mask[a] ? eta : 1.0 - eta;
    z += probs[a];
  }
  for (double& p : probs) p /= z;
  return distribution_from_probs(std::move(probs));
}

double symbolic_loss(const std::vector<double>& logp_new,
                     const std::vector<double>& logp_ref,
                     const std::vector<double>& adv, double clip_coef) {
  if (logp_new.size() != logp_ref.size() || logp_new.size() != adv.size()) {
    throw UsageError("symbolic_loss: size mismatch");
  }
  double acc = 0.0;
  for (size_t i = 0; i < logp_new.size(); ++i) {
    const double rho = std::exp(logp_new[i] - logp_ref[i]);
    const double clipped = std::clamp(rho, 1.0 - clip_coef, 1.0 + clip_coef);
    acc += std::min(rho * adv[i], clipped * adv[i]);
  }
  return acc / static_cast<double>(logp_new.size());
}

double combined_loss(double ppo_loss, double sym_loss, double theta_t) {
  return ppo_loss - theta_t * sym_loss;
}

ShapedReward rm_shaped_reward(double base_reward, bool action_entailed,
                              int rm_delta, const RMShapingConfig& cfg) {
  const double action_term =
      action_entailed ? cfg.action_bonus : -cfg.action_bonus;
  return {base_reward + action_term + cfg.progress_bonus * rm_delta,
          base_reward};
}

}  // namespace nsrl::guidance
