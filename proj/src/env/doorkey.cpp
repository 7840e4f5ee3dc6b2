#include "nsrl/env/doorkey.hpp"

#include <algorithm>

#include "nsrl/errors.hpp"
#include "nsrl/logic/pathing.hpp"

namespace nsrl::env {

namespace {

// dir 0 east, 1 south, 2 west, 3 north (screen coordinates, y down)
constexpr int kDx[4] = {1, 0, -1, 0};
constexpr int kDy[4] = {0, 1, 0, -1};

const logic::Vocabulary& doorkey_vocabulary() {
  static const logic::Vocabulary v = [] {
    logic::Vocabulary vocab;
    vocab.fact_preds = {{"key", 1},      {"door", 1},        {"goal", 1},
                        {"sameColor", 2}, {"locked", 1},      {"unlocked", 0},
                        {"carryingKey", 1}, {"notCarrying", 0}};
    vocab.action_preds = {{"pickup", 1}, {"toggle", 1}, {"goto", 1}};
    vocab.directive_preds = {"goto"};
    return vocab;
  }();
  return v;
}

int angular_distance(int a, int b) {
  const int d = ((a - b) % 4 + 4) % 4;
  return std::min(d, 4 - d);
}

}  // namespace

const char* DoorKeyEnv::color_name(int c) {
  static const char* names[kNumColors] = {"red",    "green",  "blue",
                                          "purple", "yellow", "grey"};
  return (c >= 0 && c < kNumColors) ? names[c] : "none";
}

DoorKeyEnv::DoorKeyEnv(const EnvConfig& config) : config_(config) {
  max_steps_ = config_.resolved_max_steps();
  reset(config_.seed);
}

void DoorKeyEnv::generate_layout(Rng& rng) {
  const int w = config_.size, h = config_.size;
  state_ = State{};
  state_.width = w;
  state_.height = h;
  state_.grid.assign(static_cast<size_t>(w) * h, Cell{});

  for (int x = 0; x < w; ++x) {
    state_.cell(x, 0).type = CellType::kWall;
    state_.cell(x, h - 1).type = CellType::kWall;
  }
  for (int y = 0; y < h; ++y) {
    state_.cell(0, y).type = CellType::kWall;
    state_.cell(w - 1, y).type = CellType::kWall;
  }

  const int num_keys = config_.keys;
  for (int attempt = 0; attempt < 256; ++attempt) {
    // Vertical wall splitting the grid; agent and keys on the left side.
    const int split = rng.range(2, w - 3);
    const int left_cells = (split - 1) * (h - 2);
    if (left_cells < num_keys + 1) continue;

    for (int y = 1; y < h - 1; ++y) {
      Cell& c = state_.cell(split, y);
      c = Cell{};
      c.type = CellType::kWall;
    }
    const int door_y = rng.range(1, h - 2);
    state_.door_color = rng.range(0, kNumColors - 1);
    Cell& door = state_.cell(split, door_y);
    door.type = CellType::kDoor;
    door.color = static_cast<int8_t>(state_.door_color);
    door.door_state = DoorState::kLocked;
    state_.door_x = split;
    state_.door_y = door_y;

    state_.goal_x = w - 2;
    state_.goal_y = h - 2;
    Cell& goal = state_.cell(state_.goal_x, state_.goal_y);
    goal = Cell{};
    goal.type = CellType::kGoal;

    // Distractor colors: distinct from the door color unless the config
    // allows duplicates, and distinct from each other.
    std::vector<int> key_colors = {state_.door_color};
    std::vector<int> pool;
    for (int c = 0; c < kNumColors; ++c) {
      if (c != state_.door_color || config_.allow_duplicate_distractor_colors)
        pool.push_back(c);
    }
    rng.shuffle(pool);
    for (int k = 1; k < num_keys; ++k) key_colors.push_back(pool[k - 1]);

    // Sample distinct key cells and the agent cell on the left side.
    std::vector<std::pair<int, int>> spots;
    for (int x = 1; x < split; ++x) {
      for (int y = 1; y < h - 1; ++y) spots.push_back({x, y});
    }
    rng.shuffle(spots);
    for (int k = 0; k < num_keys; ++k) {
      Cell& c = state_.cell(spots[k].first, spots[k].second);
      c.type = CellType::kKey;
      c.color = static_cast<int8_t>(key_colors[k]);
      c.object_id = static_cast<int8_t>(k);
    }
    state_.agent_x = spots[num_keys].first;
    state_.agent_y = spots[num_keys].second;
    state_.agent_dir = rng.range(0, 3);
    return;
  }
  throw GenerationError("doorkey: could not place " +
                        std::to_string(num_keys) + " keys on a size-" +
                        std::to_string(w) + " grid");
}

Observation DoorKeyEnv::reset(uint64_t episode_seed) {
  Rng rng(mix64(episode_seed));
  generate_layout(rng);
  return observe();
}

std::pair<int, int> DoorKeyEnv::front_cell() const {
  return {state_.agent_x + kDx[state_.agent_dir],
          state_.agent_y + kDy[state_.agent_dir]};
}

bool DoorKeyEnv::walkable(const Cell& c) const {
  if (c.type == CellType::kEmpty || c.type == CellType::kGoal) return true;
  return c.type == CellType::kDoor && c.door_state == DoorState::kOpen;
}

bool DoorKeyEnv::planning_walkable(const Cell& c) const {
  if (walkable(c)) return true;
  if (c.type != CellType::kDoor) return false;
  if (c.door_state == DoorState::kClosed) return true;
  // A locked door counts for planning only when the matching key is held.
  return c.door_state == DoorState::kLocked && state_.carrying >= 0 &&
         state_.carrying_color == c.color;
}

StepResult DoorKeyEnv::step(int action) {
  if (state_.done) throw UsageError("doorkey: step after episode end");
  if (action < 0 || action >= num_actions()) {
    throw UsageError("doorkey: invalid action " + std::to_string(action));
  }
  state_.step_count += 1;
  StepResult result;

  switch (action) {
    case kLeft:
      state_.agent_dir = (state_.agent_dir + 3) % 4;
      break;
    case kRight:
      state_.agent_dir = (state_.agent_dir + 1) % 4;
      break;
    case kForward: {
      auto [fx, fy] = front_cell();
      if (state_.in_bounds(fx, fy) && walkable(state_.cell(fx, fy))) {
        state_.agent_x = fx;
        state_.agent_y = fy;
        if (state_.cell(fx, fy).type == CellType::kGoal) {
          state_.done = true;
          state_.succeeded = true;
          result.reward = sparse_reward(state_.step_count, max_steps_, true);
          result.events.insert("reached_goal");
        }
      }
      break;
    }
    case kPickup: {
      auto [fx, fy] = front_cell();
      if (state_.in_bounds(fx, fy) && state_.carrying < 0) {
        Cell& c = state_.cell(fx, fy);
        if (c.type == CellType::kKey) {
          state_.carrying = c.object_id;
          state_.carrying_color = c.color;
          result.events.insert(c.color == state_.door_color
                                   ? "picked_matching_key"
                                   : "picked_distractor_key");
          c = Cell{};
        }
      }
      break;
    }
    case kToggle: {
      auto [fx, fy] = front_cell();
      if (state_.in_bounds(fx, fy)) {
        Cell& c = state_.cell(fx, fy);
        if (c.type == CellType::kDoor) {
          if (c.door_state == DoorState::kLocked) {
            if (state_.carrying >= 0 && state_.carrying_color == c.color) {
              c.door_state = DoorState::kOpen;
              result.events.insert("door_unlocked");
            }
          } else if (c.door_state == DoorState::kClosed) {
            c.door_state = DoorState::kOpen;
          } else {
            c.door_state = DoorState::kClosed;
            result.events.insert("door_closed");
          }
        }
      }
      break;
    }
    default:
      break;
  }

  if (!state_.done && state_.step_count >= max_steps_) {
    state_.done = true;
    result.truncated = true;
  }
  result.done = state_.done;
  result.obs = observe();
  return result;
}

std::vector<std::pair<int, int>> DoorKeyEnv::visible_cells() const {
  std::vector<std::pair<int, int>> cells;
  const int fwd = state_.agent_dir;
  const int right = (state_.agent_dir + 1) % 4;
  for (int vr = 0; vr < kViewSize; ++vr) {
    for (int vc = 0; vc < kViewSize; ++vc) {
      const int f = (kViewSize - 1) - vr;
      const int r = vc - kViewSize / 2;
      cells.push_back({state_.agent_x + f * kDx[fwd] + r * kDx[right],
                       state_.agent_y + f * kDy[fwd] + r * kDy[right]});
    }
  }
  return cells;
}

Observation DoorKeyEnv::observe() const {
  Observation obs;
  obs.reserve(observation_size());
  const auto cells = visible_cells();
  const int agent_view_index = (kViewSize - 1) * kViewSize + kViewSize / 2;
  for (size_t i = 0; i < cells.size(); ++i) {
    Cell c;
    const auto [x, y] = cells[i];
    if (state_.in_bounds(x, y)) {
      c = state_.cell(x, y);
    } else {
      c.type = CellType::kWall;
    }
    if (static_cast<int>(i) == agent_view_index && state_.carrying >= 0) {
      // The agent's own cell shows the carried object.
      c = Cell{};
      c.type = CellType::kKey;
      c.color = static_cast<int8_t>(state_.carrying_color);
    }
    obs.push_back(static_cast<double>(c.type) / 4.0);
    obs.push_back(static_cast<double>(c.color + 1) / kNumColors);
    obs.push_back(c.type == CellType::kDoor
                      ? static_cast<double>(c.door_state) / 2.0
                      : 0.0);
  }
  for (int d = 0; d < 4; ++d) {
    obs.push_back(d == state_.agent_dir ? 1.0 : 0.0);
  }
  return obs;
}

std::string DoorKeyEnv::object_name(const Cell& c) const {
  switch (c.type) {
    case CellType::kKey:
      return "k" + std::to_string(c.object_id + 1);
    case CellType::kDoor:
      return "d1";
    case CellType::kGoal:
      return "g1";
    default:
      return {};
  }
}

logic::FactBase DoorKeyEnv::ground_state() const {
  logic::FactBase facts;
  struct Colored {
    std::string name;
    int color;
    bool is_key;
  };
  std::vector<Colored> objects;

  std::set<std::pair<int, int>> seen;
  for (const auto& [x, y] : visible_cells()) {
    if (!state_.in_bounds(x, y) || !seen.insert({x, y}).second) continue;
    const Cell& c = state_.cell(x, y);
    switch (c.type) {
      case CellType::kKey:
        facts.insert({"key", {object_name(c)}});
        objects.push_back({object_name(c), c.color, true});
        break;
      case CellType::kDoor:
        facts.insert({"door", {object_name(c)}});
        if (c.door_state == DoorState::kLocked) {
          facts.insert({"locked", {object_name(c)}});
        }
        objects.push_back({object_name(c), c.color, false});
        break;
      case CellType::kGoal:
        facts.insert({"goal", {object_name(c)}});
        break;
      default:
        break;
    }
  }

  if (state_.carrying >= 0) {
    const std::string name = "k" + std::to_string(state_.carrying + 1);
    facts.insert({"carryingKey", {name}});
    objects.push_back({name, state_.carrying_color, true});
  } else {
    facts.insert({"notCarrying", {}});
  }

  const Cell& door = state_.cell(state_.door_x, state_.door_y);
  if (door.type == CellType::kDoor && door.door_state != DoorState::kLocked) {
    facts.insert({"unlocked", {}});
  }

  for (const Colored& a : objects) {
    for (const Colored& b : objects) {
      if (a.name != b.name && a.color == b.color) {
        facts.insert({"sameColor", {a.name, b.name}});
      }
    }
  }
  return facts;
}

ActionGrounding DoorKeyEnv::action_atom(int action) const {
  switch (action) {
    case kLeft:
      return ActionGrounding::goto_candidate("left");
    case kRight:
      return ActionGrounding::goto_candidate("right");
    case kForward:
      return ActionGrounding::goto_candidate("forward");
    case kPickup: {
      auto [fx, fy] = front_cell();
      if (state_.in_bounds(fx, fy)) {
        const Cell& c = state_.cell(fx, fy);
        if (c.type == CellType::kKey) {
          return ActionGrounding::of_atom({"pickup", {object_name(c)}});
        }
      }
      return ActionGrounding::none();
    }
    case kToggle: {
      auto [fx, fy] = front_cell();
      if (state_.in_bounds(fx, fy)) {
        const Cell& c = state_.cell(fx, fy);
        if (c.type == CellType::kDoor) {
          return ActionGrounding::of_atom({"toggle", {object_name(c)}});
        }
      }
      return ActionGrounding::none();
    }
    default:
      return ActionGrounding::none();
  }
}

bool DoorKeyEnv::has_goto_target(const std::string& target) const {
  if (target == "g1" || target == "d1") return true;
  for (const Cell& c : state_.grid) {
    if (c.type == CellType::kKey && object_name(c) == target) return true;
  }
  return false;
}

std::vector<int> DoorKeyEnv::goto_actions(const std::string& target) const {
  int tx = -1, ty = -1;
  if (target == "g1") {
    tx = state_.goal_x;
    ty = state_.goal_y;
  } else if (target == "d1") {
    tx = state_.door_x;
    ty = state_.door_y;
  } else {
    for (int y = 0; y < state_.height && tx < 0; ++y) {
      for (int x = 0; x < state_.width; ++x) {
        const Cell& c = state_.cell(x, y);
        if (c.type == CellType::kKey && object_name(c) == target) {
          tx = x;
          ty = y;
          break;
        }
      }
    }
    if (tx < 0) throw ConfigError("doorkey: unknown goto target " + target);
  }

  const int w = state_.width, h = state_.height;
  const auto neighbors = [&](int cell, std::vector<int>& out) {
    const int x = cell % w, y = cell / w;
    for (int d = 0; d < 4; ++d) {
      const int nx = x + kDx[d], ny = y + kDy[d];
      if (!state_.in_bounds(nx, ny)) continue;
      if (planning_walkable(state_.cell(nx, ny))) out.push_back(ny * w + nx);
    }
  };
  const std::vector<int> dist =
      logic::bfs_distances(w * h, ty * w + tx, neighbors);

  const int here = state_.agent_y * w + state_.agent_x;
  if (dist[here] == logic::kUnreachable || dist[here] == 0) return {};

  std::vector<int> decreasing_dirs;
  for (int d = 0; d < 4; ++d) {
    const int nx = state_.agent_x + kDx[d], ny = state_.agent_y + kDy[d];
    if (!state_.in_bounds(nx, ny)) continue;
    const int nb = ny * w + nx;
    const bool enterable =
        planning_walkable(state_.cell(nx, ny)) || nb == ty * w + tx;
    if (enterable && dist[nb] != logic::kUnreachable &&
        dist[nb] == dist[here] - 1) {
      decreasing_dirs.push_back(d);
    }
  }
  if (decreasing_dirs.empty()) return {};

  const auto min_ang = [&](int from_dir) {
    int best = 4;
    for (int d : decreasing_dirs) best = std::min(best, angular_distance(from_dir, d));
    return best;
  };
  const int cur = min_ang(state_.agent_dir);
  if (cur == 0) {
    // Facing a decreasing neighbor; forward only counts if it is walkable
    // right now (a planning-only door still blocks physically).
    auto [fx, fy] = front_cell();
    if (walkable(state_.cell(fx, fy))) return {kForward};
    return {};
  }
  std::vector<int> actions;
  if (min_ang((state_.agent_dir + 3) % 4) < cur) actions.push_back(kLeft);
  if (min_ang((state_.agent_dir + 1) % 4) < cur) actions.push_back(kRight);
  return actions;
}

const logic::Vocabulary& DoorKeyEnv::vocabulary() const {
  return doorkey_vocabulary();
}

std::set<std::string> DoorKeyEnv::event_alphabet() const {
  return {"picked_matching_key", "picked_distractor_key", "door_unlocked",
          "door_closed", "reached_goal"};
}

std::string DoorKeyEnv::render_ascii() const {
  std::string out;
  for (int y = 0; y < state_.height; ++y) {
    for (int x = 0; x < state_.width; ++x) {
      if (x == state_.agent_x && y == state_.agent_y) {
        out += ">v<^"[state_.agent_dir];
        continue;
      }
      const Cell& c = state_.cell(x, y);
      switch (c.type) {
        case CellType::kEmpty: out += '.'; break;
        case CellType::kWall: out += '#'; break;
        case CellType::kKey: out += 'k'; break;
        case CellType::kGoal: out += 'G'; break;
        case CellType::kDoor:
          out += c.door_state == DoorState::kLocked
                     ? 'L'
                     : (c.door_state == DoorState::kClosed ? 'D' : '/');
          break;
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace nsrl::env
