#pragma once

#include "nsrl/env/env.hpp"
#include "nsrl/rng.hpp"

namespace nsrl::env {

// Continuous 2D box with colored balls moving at constant speed that
// bounce off the walls. The agent is a velocity-controlled ball; the task
// is to touch color pairs in order (first color, then second). Touching a
// pair's first color again mid-sequence resets that pair.
class WaterWorldEnv final : public Environment {
 public:
  enum Action { kUp = 0, kDown = 1, kLeft = 2, kRight = 3, kNone = 4 };

  static constexpr int kNumColors = 6;
  static constexpr int kBallsPerColor = 2;
  static constexpr double kRadius = 15.0;
  static constexpr double kBallSpeed = 3.0;
  static constexpr double kImpulse = 1.0;
  static constexpr double kMaxAxisSpeed = 6.0;

  static const char* color_name(int c);

  struct Ball {
    int color = 0;
    double x = 0, y = 0;
    double vx = 0, vy = 0;
  };

  struct State {
    double agent_x = 0, agent_y = 0;
    double agent_vx = 0, agent_vy = 0;
    std::vector<Ball> balls;
    std::vector<uint8_t> overlapping;  // per ball, for contact onsets
    std::vector<int> pair_state;       // 0 untouched, 1 first done, 2 complete
    int step_count = 0;
    bool done = false;
    bool succeeded = false;
  };

  explicit WaterWorldEnv(const EnvConfig& config);

  const EnvConfig& config() const override { return config_; }
  int num_actions() const override { return 5; }
  int observation_size() const override;
  int max_steps() const override { return max_steps_; }
  int step_count() const override { return state_.step_count; }
  bool is_done() const override { return state_.done; }

  Observation reset(uint64_t episode_seed) override;
  StepResult step(int action) override;
  Observation observe() const override;
  logic::FactBase ground_state() const override;
  ActionGrounding action_atom(int action) const override;
  std::vector<int> goto_actions(const std::string& target) const override;
  bool has_goto_target(const std::string& target) const override;
  const logic::Vocabulary& vocabulary() const override;
  std::set<std::string> event_alphabet() const override;

  State& state() { return state_; }
  const State& state() const { return state_; }

  // Color pairs for the configured task, e.g. {(red,green),(blue,cyan)}.
  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }

 private:
  EnvConfig config_;
  double size_;
  int max_steps_;
  std::vector<std::pair<int, int>> pairs_;
  State state_;
};

std::vector<std::pair<int, int>> water_task_pairs(WaterTask task);

}  // namespace nsrl::env
