#pragma once

#include <array>

#include "nsrl/env/env.hpp"
#include "nsrl/rng.hpp"

namespace nsrl::env {

// Partially observable grid navigation: retrieve the key matching the door
// color, unlock the door, reach the goal. Five actions: turn left, turn
// right, move forward, pick up, toggle.
class DoorKeyEnv final : public Environment {
 public:
  enum Action { kLeft = 0, kRight = 1, kForward = 2, kPickup = 3, kToggle = 4 };

  enum class CellType : uint8_t { kEmpty, kWall, kDoor, kKey, kGoal };
  enum class DoorState : uint8_t { kOpen, kClosed, kLocked };

  // MiniGrid-style palette
  static constexpr int kNumColors = 6;
  static const char* color_name(int c);

  struct Cell {
    CellType type = CellType::kEmpty;
    int8_t color = -1;
    DoorState door_state = DoorState::kOpen;
    int8_t object_id = -1;  // key index (0-based) for keys
  };

  static constexpr int kViewSize = 7;

  struct State {
    int width = 0, height = 0;
    std::vector<Cell> grid;
    int agent_x = 0, agent_y = 0;
    int agent_dir = 0;  // 0 east, 1 south, 2 west, 3 north
    int carrying = -1;  // key index, or -1
    int carrying_color = -1;
    int door_color = -1;
    int door_x = 0, door_y = 0;
    int goal_x = 0, goal_y = 0;
    int step_count = 0;
    bool done = false;
    bool succeeded = false;

    Cell& cell(int x, int y) { return grid[y * width + x]; }
    const Cell& cell(int x, int y) const { return grid[y * width + x]; }
    bool in_bounds(int x, int y) const {
      return x >= 0 && x < width && y >= 0 && y < height;
    }
  };

  explicit DoorKeyEnv(const EnvConfig& config);

  const EnvConfig& config() const override { return config_; }
  int num_actions() const override { return 5; }
  int observation_size() const override {
    return kViewSize * kViewSize * 3 + 4;
  }
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

  // Exposed for tests and debug tooling.
  State& state() { return state_; }
  const State& state() const { return state_; }

  // World coordinates of every cell inside the egocentric view window.
  std::vector<std::pair<int, int>> visible_cells() const;

 private:
  void generate_layout(Rng& rng);
  std::pair<int, int> front_cell() const;
  bool walkable(const Cell& c) const;
  bool planning_walkable(const Cell& c) const;
  std::string object_name(const Cell& c) const;

  EnvConfig config_;
  int max_steps_;
  State state_;
};

}  // namespace nsrl::env
