#include "nsrl/env/officeworld.hpp"

#include "nsrl/errors.hpp"
#include "nsrl/logic/pathing.hpp"

namespace nsrl::env {

namespace {

constexpr int kDx[4] = {0, 0, -1, 1};  // up, down, left, right
constexpr int kDy[4] = {1, -1, 0, 0};

const logic::Vocabulary& office_vocabulary() {
  static const logic::Vocabulary v = [] {
    logic::Vocabulary vocab;
    vocab.fact_preds = {
        {"coffee", 1},    {"mail", 1},      {"office", 1},
        {"room_a", 1},    {"room_b", 1},    {"room_c", 1},
        {"room_d", 1},    {"HasCoffee", 0}, {"HasMail", 0},
        {"visited_a", 0}, {"visited_b", 0}, {"visited_c", 0},
        {"notHittingPlants", 0}};
    vocab.action_preds = {{"goto", 1}};
    vocab.directive_preds = {"goto"};
    return vocab;
  }();
  return v;
}

}  // namespace

OfficeWorldEnv::OfficeWorldEnv(const EnvConfig& config) : config_(config) {
  width_ = config_.office_width;
  height_ = config_.office_height;
  max_steps_ = config_.resolved_max_steps();

  // Fixed layout: 4x3 rooms of 3x3 cells. Vertical walls after columns
  // 2, 5, 8 with doorways at rows 1 and 7; horizontal walls after rows 2
  // and 5 with doorways at columns 1, 4, 7, 10.
  const auto block_h = [&](int x, int y) {  // wall between (x,y) and (x+1,y)
    blocked_.insert({x, y, kRight});
    blocked_.insert({x + 1, y, kLeft});
  };
  const auto block_v = [&](int x, int y) {  // wall between (x,y) and (x,y+1)
    blocked_.insert({x, y, kUp});
    blocked_.insert({x, y + 1, kDown});
  };
  for (int x : {2, 5, 8}) {
    for (int y = 0; y < height_; ++y) {
      if (y == 1 || y == 7) continue;
      block_h(x, y);
    }
  }
  for (int y : {2, 5}) {
    for (int x = 0; x < width_; ++x) {
      if (x == 1 || x == 4 || x == 7 || x == 10) continue;
      block_v(x, y);
    }
  }

  locations_ = {
      {"ra1", {1, 1}},   {"rb1", {1, 7}},   {"rc1", {10, 7}},
      {"rd1", {10, 1}},  {"mail1", {7, 4}}, {"off1", {4, 4}},
      {"cof1", {8, 2}},  {"cof2", {3, 6}},
  };
  plants_ = {{4, 1}, {7, 1}, {4, 7}, {7, 7}, {1, 4}, {10, 4}};

  reset(config_.seed);
}

Observation OfficeWorldEnv::reset(uint64_t /*episode_seed*/) {
  // Layout and start cell are fixed; episodes differ only through actions.
  state_ = State{};
  state_.x = 2;
  state_.y = 1;
  return observe();
}

OfficeWorldEnv::Label OfficeWorldEnv::label_at(int x, int y) const {
  if (plants_.count({x, y})) return Label::kPlant;
  for (const auto& [name, pos] : locations_) {
    if (pos != std::make_pair(x, y)) continue;
    if (name == "ra1") return Label::kRoomA;
    if (name == "rb1") return Label::kRoomB;
    if (name == "rc1") return Label::kRoomC;
    if (name == "rd1") return Label::kRoomD;
    if (name == "mail1") return Label::kMail;
    if (name == "off1") return Label::kOffice;
    return Label::kCoffee;
  }
  return Label::kNone;
}

bool OfficeWorldEnv::wall_blocks(int x, int y, int action) const {
  const int nx = x + kDx[action], ny = y + kDy[action];
  if (nx < 0 || nx >= width_ || ny < 0 || ny >= height_) return true;
  return blocked_.count({x, y, action}) > 0;
}

bool OfficeWorldEnv::passable(int x, int y) const {
  return x >= 0 && x < width_ && y >= 0 && y < height_ &&
         !plants_.count({x, y});
}

StepResult OfficeWorldEnv::step(int action) {
  if (state_.done) throw UsageError("officeworld: step after episode end");
  if (action < 0 || action >= num_actions()) {
    throw UsageError("officeworld: invalid action " + std::to_string(action));
  }
  state_.step_count += 1;
  StepResult result;

  const int old_x = state_.x, old_y = state_.y;
  if (!wall_blocks(state_.x, state_.y, action)) {
    state_.x += kDx[action];
    state_.y += kDy[action];
  }
  const bool moved = state_.x != old_x || state_.y != old_y;

  if (moved) {
    switch (label_at(state_.x, state_.y)) {
      case Label::kPlant:
        result.events.insert("hit_plant");
        state_.done = true;
        break;
      case Label::kCoffee:
        if (!state_.has_coffee) {
          state_.has_coffee = true;
          result.events.insert("got_coffee");
        }
        break;
      case Label::kMail:
        if (!state_.has_mail) {
          state_.has_mail = true;
          result.events.insert("got_mail");
        }
        break;
      case Label::kRoomA:
        result.events.insert("at_a");
        if (!state_.visited_a) state_.visited_a = true;
        break;
      case Label::kRoomB:
        result.events.insert("at_b");
        if (state_.visited_a && !state_.visited_b) state_.visited_b = true;
        break;
      case Label::kRoomC:
        result.events.insert("at_c");
        if (state_.visited_b && !state_.visited_c) state_.visited_c = true;
        break;
      case Label::kRoomD:
        result.events.insert("at_d");
        break;
      case Label::kOffice:
        result.events.insert("at_office");
        break;
      case Label::kNone:
        break;
    }

    if (!state_.done) {
      bool success = false;
      switch (config_.office_task) {
        case OfficeTask::kDeliverCoffee:
          success = label_at(state_.x, state_.y) == Label::kOffice &&
                    state_.has_coffee;
          break;
        case OfficeTask::kDeliverCoffeeAndMail:
          success = label_at(state_.x, state_.y) == Label::kOffice &&
                    state_.has_coffee && state_.has_mail;
          break;
        case OfficeTask::kPatrolAB:
          success = state_.visited_a && state_.visited_b;
          break;
        case OfficeTask::kPatrolABC:
          success = state_.visited_a && state_.visited_b && state_.visited_c;
          break;
      }
      if (success) {
        state_.done = true;
        state_.succeeded = true;
        result.reward = sparse_reward(state_.step_count, max_steps_, true);
      }
    }
  }

  if (!state_.done && state_.step_count >= max_steps_) {
    state_.done = true;
    result.truncated = true;
  }
  result.done = state_.done;
  result.obs = observe();
  return result;
}

Observation OfficeWorldEnv::observe() const {
  return {static_cast<double>(state_.x) / (width_ - 1),
          static_cast<double>(state_.y) / (height_ - 1),
          state_.has_coffee ? 1.0 : 0.0,
          state_.has_mail ? 1.0 : 0.0,
          state_.visited_a ? 1.0 : 0.0,
          state_.visited_b ? 1.0 : 0.0,
          state_.visited_c ? 1.0 : 0.0};
}

logic::FactBase OfficeWorldEnv::ground_state() const {
  logic::FactBase facts;
  facts.insert({"coffee", {"cof1"}});
  facts.insert({"coffee", {"cof2"}});
  facts.insert({"mail", {"mail1"}});
  facts.insert({"office", {"off1"}});
  facts.insert({"room_a", {"ra1"}});
  facts.insert({"room_b", {"rb1"}});
  facts.insert({"room_c", {"rc1"}});
  facts.insert({"room_d", {"rd1"}});
  if (state_.has_coffee) facts.insert({"HasCoffee", {}});
  if (state_.has_mail) facts.insert({"HasMail", {}});
  if (state_.visited_a) facts.insert({"visited_a", {}});
  if (state_.visited_b) facts.insert({"visited_b", {}});
  if (state_.visited_c) facts.insert({"visited_c", {}});
  if (!plants_.count({state_.x, state_.y})) {
    facts.insert({"notHittingPlants", {}});
  }
  return facts;
}

ActionGrounding OfficeWorldEnv::action_atom(int action) const {
  static const char* names[4] = {"up", "down", "left", "right"};
  if (action < 0 || action >= 4) return ActionGrounding::none();
  return ActionGrounding::goto_candidate(names[action]);
}

bool OfficeWorldEnv::has_goto_target(const std::string& target) const {
  return locations_.count(target) > 0;
}

std::vector<int> OfficeWorldEnv::goto_actions(const std::string& target) const {
  auto it = locations_.find(target);
  if (it == locations_.end()) {
    throw ConfigError("officeworld: unknown goto target " + target);
  }
  const auto [tx, ty] = it->second;
  const auto neighbors = [&](int cell, std::vector<int>& out) {
    const int x = cell % width_, y = cell / width_;
    for (int d = 0; d < 4; ++d) {
      if (wall_blocks(x, y, d)) continue;
      const int nx = x + kDx[d], ny = y + kDy[d];
      if (!passable(nx, ny)) continue;
      out.push_back(ny * width_ + nx);
    }
  };
  const std::vector<int> dist = logic::bfs_distances(
      width_ * height_, ty * width_ + tx, neighbors);

  const int here = state_.y * width_ + state_.x;
  if (dist[here] == logic::kUnreachable || dist[here] == 0) return {};

  std::vector<int> actions;
  for (int d = 0; d < 4; ++d) {
    if (wall_blocks(state_.x, state_.y, d)) continue;
    const int nx = state_.x + kDx[d], ny = state_.y + kDy[d];
    if (!passable(nx, ny)) continue;
    const int nb = ny * width_ + nx;
    if (dist[nb] != logic::kUnreachable && dist[nb] == dist[here] - 1) {
      actions.push_back(d);
    }
  }
  return actions;
}

const logic::Vocabulary& OfficeWorldEnv::vocabulary() const {
  return office_vocabulary();
}

std::set<std::string> OfficeWorldEnv::event_alphabet() const {
  return {"got_coffee", "got_mail", "at_a",      "at_b",
          "at_c",       "at_d",     "at_office", "hit_plant"};
}

std::string OfficeWorldEnv::render_ascii() const {
  std::string out;
  for (int y = height_ - 1; y >= 0; --y) {
    for (int x = 0; x < width_; ++x) {
      if (x == state_.x && y == state_.y) {
        out += '@';
        continue;
      }
      switch (label_at(x, y)) {
        case Label::kPlant: out += '*'; break;
        case Label::kCoffee: out += 'c'; break;
        case Label::kMail: out += 'm'; break;
        case Label::kOffice: out += 'o'; break;
        case Label::kRoomA: out += 'A'; break;
        case Label::kRoomB: out += 'B'; break;
        case Label::kRoomC: out += 'C'; break;
        case Label::kRoomD: out += 'D'; break;
        case Label::kNone: out += '.'; break;
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace nsrl::env
