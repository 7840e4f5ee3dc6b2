#include "nsrl/env/waterworld.hpp"

#include <algorithm>
#include <cmath>

#include "nsrl/errors.hpp"

namespace nsrl::env {

namespace {

const logic::Vocabulary& water_vocabulary() {
  static const logic::Vocabulary v = [] {
    logic::Vocabulary vocab;
    vocab.fact_preds = {{"touched_red", 0},     {"touched_green", 0},
                        {"touched_blue", 0},    {"touched_cyan", 0},
                        {"touched_magenta", 0}, {"touched_yellow", 0}};
    vocab.action_preds = {{"touch", 1}};
    vocab.directive_preds = {"touch"};
    return vocab;
  }();
  return v;
}

// y grows upward; up adds +vy.
constexpr double kAx[5] = {0, 0, -1, 1, 0};
constexpr double kAy[5] = {1, -1, 0, 0, 0};

void bounce(double& pos, double& vel, double lo, double hi) {
  if (pos < lo) {
    pos = 2.0 * lo - pos;
    vel = -vel;
  } else if (pos > hi) {
    pos = 2.0 * hi - pos;
    vel = -vel;
  }
}

}  // namespace

const char* WaterWorldEnv::color_name(int c) {
  static const char* names[kNumColors] = {"red",  "green",   "blue",
                                          "cyan", "magenta", "yellow"};
  return names[c];
}

std::vector<std::pair<int, int>> water_task_pairs(WaterTask task) {
  switch (task) {
    case WaterTask::kRedGreen:
      return {{0, 1}};
    case WaterTask::kRedGreenBlueCyan:
      return {{0, 1}, {2, 3}};
    case WaterTask::kRedGreenBlueCyanMagentaYellow:
      return {{0, 1}, {2, 3}, {4, 5}};
  }
  throw ConfigError("waterworld: unknown task");
}

WaterWorldEnv::WaterWorldEnv(const EnvConfig& config) : config_(config) {
  size_ = config_.water_size;
  max_steps_ = config_.resolved_max_steps();
  pairs_ = water_task_pairs(config_.water_task);
  reset(config_.seed);
}

int WaterWorldEnv::observation_size() const {
  const int num_balls =
      static_cast<int>(pairs_.size()) * 2 * kBallsPerColor;
  return 4 + 4 * num_balls + 2 * static_cast<int>(pairs_.size());
}

Observation WaterWorldEnv::reset(uint64_t episode_seed) {
  Rng rng(mix64(episode_seed));
  state_ = State{};
  state_.agent_x = size_ / 2.0;
  state_.agent_y = size_ / 2.0;
  state_.pair_state.assign(pairs_.size(), 0);

  for (const auto& [c1, c2] : pairs_) {
    for (int color : {c1, c2}) {
      for (int i = 0; i < kBallsPerColor; ++i) {
        Ball b;
        b.color = color;
        bool placed = false;
        for (int attempt = 0; attempt < 256; ++attempt) {
          b.x = rng.uniform(kRadius, size_ - kRadius);
          b.y = rng.uniform(kRadius, size_ - kRadius);
          const double dx = b.x - state_.agent_x, dy = b.y - state_.agent_y;
          if (dx * dx + dy * dy > (4.0 * kRadius) * (4.0 * kRadius)) {
            placed = true;
            break;
          }
        }
        if (!placed) {
          throw GenerationError("waterworld: box too small to place balls");
        }
        const double angle = rng.uniform(0.0, 2.0 * M_PI);
        b.vx = kBallSpeed * std::cos(angle);
        b.vy = kBallSpeed * std::sin(angle);
        state_.balls.push_back(b);
      }
    }
  }
  state_.overlapping.assign(state_.balls.size(), 0);
  return observe();
}

StepResult WaterWorldEnv::step(int action) {
  if (state_.done) throw UsageError("waterworld: step after episode end");
  if (action < 0 || action >= num_actions()) {
    throw UsageError("waterworld: invalid action " + std::to_string(action));
  }
  state_.step_count += 1;
  StepResult result;

  state_.agent_vx = std::clamp(state_.agent_vx + kImpulse * kAx[action],
                               -kMaxAxisSpeed, kMaxAxisSpeed);
  state_.agent_vy = std::clamp(state_.agent_vy + kImpulse * kAy[action],
                               -kMaxAxisSpeed, kMaxAxisSpeed);
  state_.agent_x += state_.agent_vx;
  state_.agent_y += state_.agent_vy;
  bounce(state_.agent_x, state_.agent_vx, kRadius, size_ - kRadius);
  bounce(state_.agent_y, state_.agent_vy, kRadius, size_ - kRadius);

  for (Ball& b : state_.balls) {
    b.x += b.vx;
    b.y += b.vy;
    bounce(b.x, b.vx, kRadius, size_ - kRadius);
    bounce(b.y, b.vy, kRadius, size_ - kRadius);
  }

  // Contact onsets, deduplicated per color.
  std::set<int> onset_colors;
  for (size_t i = 0; i < state_.balls.size(); ++i) {
    const Ball& b = state_.balls[i];
    const double dx = b.x - state_.agent_x, dy = b.y - state_.agent_y;
    const bool touching = dx * dx + dy * dy <= (2.0 * kRadius) * (2.0 * kRadius);
    if (touching && !state_.overlapping[i]) onset_colors.insert(b.color);
    state_.overlapping[i] = touching ? 1 : 0;
  }
  for (int c : onset_colors) {
    result.events.insert(std::string("touched_") + color_name(c));
  }

  for (int c : onset_colors) {
    for (size_t p = 0; p < pairs_.size(); ++p) {
      int& st = state_.pair_state[p];
      if (c == pairs_[p].first) {
        if (st == 0) {
          st = 1;
        } else if (st == 1) {
          st = 0;  // out-of-sequence re-touch resets the pair
        }
      } else if (c == pairs_[p].second) {
        if (st == 1) st = 2;
      }
    }
  }

  const bool all_done = std::all_of(state_.pair_state.begin(),
                                    state_.pair_state.end(),
                                    [](int s) { return s == 2; });
  if (all_done) {
    state_.done = true;
    state_.succeeded = true;
    result.reward = sparse_reward(state_.step_count, max_steps_, true);
  }

  if (!state_.done && state_.step_count >= max_steps_) {
    state_.done = true;
    result.truncated = true;
  }
  result.done = state_.done;
  result.obs = observe();
  return result;
}

Observation WaterWorldEnv::observe() const {
  Observation obs;
  obs.reserve(observation_size());
  obs.push_back(state_.agent_x / size_);
  obs.push_back(state_.agent_y / size_);
  obs.push_back(state_.agent_vx / kMaxAxisSpeed);
  obs.push_back(state_.agent_vy / kMaxAxisSpeed);
  for (const Ball& b : state_.balls) {
    obs.push_back((b.x - state_.agent_x) / size_);
    obs.push_back((b.y - state_.agent_y) / size_);
    obs.push_back(b.vx / kBallSpeed);
    obs.push_back(b.vy / kBallSpeed);
  }
  for (int st : state_.pair_state) {
    obs.push_back(st >= 1 ? 1.0 : 0.0);
    obs.push_back(st == 2 ? 1.0 : 0.0);
  }
  return obs;
}

logic::FactBase WaterWorldEnv::ground_state() const {
  logic::FactBase facts;
  for (size_t p = 0; p < pairs_.size(); ++p) {
    if (state_.pair_state[p] >= 1) {
      facts.insert(
          {std::string("touched_") + color_name(pairs_[p].first), {}});
    }
    if (state_.pair_state[p] == 2) {
      facts.insert(
          {std::string("touched_") + color_name(pairs_[p].second), {}});
    }
  }
  return facts;
}

ActionGrounding WaterWorldEnv::action_atom(int action) const {
  static const char* names[4] = {"up", "down", "left", "right"};
  if (action < 0 || action >= 4) return ActionGrounding::none();
  return ActionGrounding::goto_candidate(names[action]);
}

bool WaterWorldEnv::has_goto_target(const std::string& target) const {
  for (const Ball& b : state_.balls) {
    if (target == color_name(b.color)) return true;
  }
  return false;
}

std::vector<int> WaterWorldEnv::goto_actions(const std::string& target) const {
  const Ball* nearest = nullptr;
  double best = 0.0;
  for (const Ball& b : state_.balls) {
    if (target != color_name(b.color)) continue;
    const double dx = b.x - state_.agent_x, dy = b.y - state_.agent_y;
    const double d2 = dx * dx + dy * dy;
    if (!nearest || d2 < best) {
      nearest = &b;
      best = d2;
    }
  }
  if (!nearest) {
    throw ConfigError("waterworld: unknown goto target " + target);
  }
  const double dx = nearest->x - state_.agent_x;
  const double dy = nearest->y - state_.agent_y;
  int best_action = -1;
  double best_dot = 0.0;
  for (int a = 0; a < 4; ++a) {
    const double dot = kAx[a] * dx + kAy[a] * dy;
    if (dot > best_dot) {
      best_dot = dot;
      best_action = a;
    }
  }
  if (best_action < 0) return {};
  return {best_action};
}

const logic::Vocabulary& WaterWorldEnv::vocabulary() const {
  return water_vocabulary();
}

std::set<std::string> WaterWorldEnv::event_alphabet() const {
  std::set<std::string> ev;
  for (const auto& [c1, c2] : pairs_) {
    ev.insert(std::string("touched_") + color_name(c1));
    ev.insert(std::string("touched_") + color_name(c2));
  }
  return ev;
}

}  // namespace nsrl::env
