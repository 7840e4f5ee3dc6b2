#pragma once

#include <map>

#include "nsrl/env/env.hpp"

namespace nsrl::env {

// Deterministic 12x9 grid of 3x3 rooms with labeled cells (coffee, mail,
// office, rooms A-D) and plants that end the episode with zero reward.
// Four actions: up, down, left, right.
class OfficeWorldEnv final : public Environment {
 public:
  enum Action { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };

  enum class Label {
    kNone,
    kRoomA,
    kRoomB,
    kRoomC,
    kRoomD,
    kCoffee,
    kMail,
    kOffice,
    kPlant,
  };

  struct State {
    int x = 0, y = 0;
    bool has_coffee = false;
    bool has_mail = false;
    bool visited_a = false, visited_b = false, visited_c = false;
    int step_count = 0;
    bool done = false;
    bool succeeded = false;
  };

  explicit OfficeWorldEnv(const EnvConfig& config);

  const EnvConfig& config() const override { return config_; }
  int num_actions() const override { return 4; }
  int observation_size() const override { return 7; }
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
  std::string render_ascii() const override;

  State& state() { return state_; }
  const State& state() const { return state_; }

  Label label_at(int x, int y) const;
  // True when a wall segment blocks moving from (x, y) in direction d.
  bool wall_blocks(int x, int y, int action) const;
  int width() const { return width_; }
  int height() const { return height_; }

  // Labeled locations by constant name (cof1, cof2, mail1, off1, ra1, ...).
  const std::map<std::string, std::pair<int, int>>& locations() const {
    return locations_;
  }

 private:
  bool passable(int x, int y) const;  // in bounds and not a plant

  EnvConfig config_;
  int width_, height_, max_steps_;
  std::map<std::string, std::pair<int, int>> locations_;
  std::set<std::pair<int, int>> plants_;
  // Wall segments as blocked directed moves (x, y, action).
  std::set<std::tuple<int, int, int>> blocked_;
  State state_;
};

}  // namespace nsrl::env
