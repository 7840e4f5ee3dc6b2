#include "nsrl/env/env.hpp"

#include <cmath>

#include "nsrl/env/doorkey.hpp"
#include "nsrl/env/officeworld.hpp"
#include "nsrl/env/waterworld.hpp"
#include "nsrl/errors.hpp"

namespace nsrl::env {

int EnvConfig::resolved_max_steps() const {
  if (max_steps > 0) return max_steps;
  switch (domain) {
    case Domain::kDoorKey:
      return size * size * 10;
    case Domain::kOfficeWorld:
      return office_width * office_height * 10;
    case Domain::kWaterWorld:
      return static_cast<int>(water_size / 2.0);
  }
  return 0;
}

void EnvConfig::validate() const {
  switch (domain) {
    case Domain::kDoorKey:
      if (size < 5) throw ConfigError("doorkey: grid size must be >= 5");
      if (keys != 1 && keys != 2 && keys != 4) {
        throw ConfigError("doorkey: key count must be 1, 2 or 4");
      }
      break;
    case Domain::kOfficeWorld:
      if (office_width != 12 || office_height != 9) {
        throw ConfigError("officeworld: only the 12x9 layout is defined");
      }
      break;
    case Domain::kWaterWorld:
      if (water_size < 8.0 * WaterWorldEnv::kRadius) {
        throw ConfigError("waterworld: box size too small");
      }
      break;
  }
  if (resolved_max_steps() <= 0) {
    throw ConfigError("max_steps must be positive");
  }
}

std::unique_ptr<Environment> make_env(const EnvConfig& config) {
  config.validate();
  switch (config.domain) {
    case Domain::kDoorKey:
      return std::make_unique<DoorKeyEnv>(config);
    case Domain::kOfficeWorld:
      return std::make_unique<OfficeWorldEnv>(config);
    case Domain::kWaterWorld:
      return std::make_unique<WaterWorldEnv>(config);
  }
  throw ConfigError("unknown domain");
}

double sparse_reward(int step_count, int max_steps, bool success) {
  if (!success) return 0.0;
  return 1.0 - 0.9 * static_cast<double>(step_count) /
                   static_cast<double>(max_steps);
}

std::vector<int> resolve_goto(const Environment& env,
                              const std::string& target) {
  if (!env.has_goto_target(target)) {
    throw ConfigError("resolve_goto: unknown target " + target);
  }
  return env.goto_actions(target);
}

namespace {

logic::RewardMachine chain_machine(const std::vector<std::string>& events) {
  logic::RewardMachine rm;
  rm.num_states = static_cast<int>(events.size()) + 1;
  rm.initial = 0;
  rm.accepting = rm.num_states - 1;
  for (size_t i = 0; i < events.size(); ++i) {
    rm.transitions.push_back(
        {static_cast<int>(i), events[i], static_cast<int>(i) + 1, +1});
    rm.alphabet.push_back(events[i]);
  }
  return rm;
}

void add_plant_edges(logic::RewardMachine& rm, bool plant_sink) {
  const int last_progress_state = rm.num_states - 1;  // accepting
  if (plant_sink) {
    const int sink = rm.num_states;
    rm.num_states += 1;
    for (int u = 0; u < last_progress_state; ++u) {
      rm.transitions.push_back({u, "hit_plant", sink, -1});
    }
  } else {
    for (int u = 0; u < last_progress_state; ++u) {
      rm.transitions.push_back({u, "hit_plant", u, -1});
    }
  }
  rm.alphabet.push_back("hit_plant");
}

logic::RewardMachine water_machine(WaterTask task) {
  const auto pairs = water_task_pairs(task);
  const int num_pairs = static_cast<int>(pairs.size());
  logic::RewardMachine rm;
  int total = 1;
  for (int p = 0; p < num_pairs; ++p) total *= 3;
  rm.num_states = total;
  rm.initial = 0;
  rm.accepting = total - 1;  // all pairs at stage 2

  const auto pair_stage = [&](int state, int p) {
    for (int i = 0; i < p; ++i) state /= 3;
    return state % 3;
  };
  int pow3 = 1;
  for (int p = 0; p < num_pairs; ++p) {
    const std::string first =
        std::string("touched_") + WaterWorldEnv::color_name(pairs[p].first);
    const std::string second =
        std::string("touched_") + WaterWorldEnv::color_name(pairs[p].second);
    rm.alphabet.push_back(first);
    rm.alphabet.push_back(second);
    for (int u = 0; u < total; ++u) {
      if (u == rm.accepting) continue;
      const int stage = pair_stage(u, p);
      if (stage == 0) {
        rm.transitions.push_back({u, first, u + pow3, +1});
      } else if (stage == 1) {
        rm.transitions.push_back({u, first, u - pow3, -1});
        rm.transitions.push_back({u, second, u + pow3, +1});
      }
    }
    pow3 *= 3;
  }
  return rm;
}

}  // namespace

logic::RewardMachine build_reward_machine(const EnvConfig& config,
                                          bool plant_sink) {
  switch (config.domain) {
    case Domain::kDoorKey: {
      logic::RewardMachine rm = chain_machine(
          {"picked_matching_key", "door_unlocked", "reached_goal"});
      rm.transitions.push_back({2, "door_closed", 1, -1});
      rm.alphabet.push_back("door_closed");
      return rm;
    }
    case Domain::kOfficeWorld: {
      logic::RewardMachine rm;
      switch (config.office_task) {
        case OfficeTask::kDeliverCoffee:
          rm = chain_machine({"got_coffee", "at_office"});
          break;
        case OfficeTask::kDeliverCoffeeAndMail: {
          // Diamond: coffee and mail commute, then the office.
          rm.num_states = 5;
          rm.initial = 0;
          rm.accepting = 4;
          rm.transitions = {{0, "got_coffee", 1, +1}, {0, "got_mail", 2, +1},
                            {1, "got_mail", 3, +1},   {2, "got_coffee", 3, +1},
                            {3, "at_office", 4, +1}};
          rm.alphabet = {"got_coffee", "got_mail", "at_office"};
          break;
        }
        case OfficeTask::kPatrolAB:
          rm = chain_machine({"at_a", "at_b"});
          break;
        case OfficeTask::kPatrolABC:
          rm = chain_machine({"at_a", "at_b", "at_c"});
          break;
      }
      add_plant_edges(rm, plant_sink);
      return rm;
    }
    case Domain::kWaterWorld:
      return water_machine(config.water_task);
  }
  throw ConfigError("build_reward_machine: unknown task");
}

}  // namespace nsrl::env
