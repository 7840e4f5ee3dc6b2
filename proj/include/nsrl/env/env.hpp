#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "nsrl/logic/atom.hpp"
#include "nsrl/logic/reward_machine.hpp"

namespace nsrl::env {

enum class Domain { kDoorKey, kOfficeWorld, kWaterWorld };

enum class OfficeTask {
  kDeliverCoffee,
  kDeliverCoffeeAndMail,
  kPatrolAB,
  kPatrolABC,
};

enum class WaterTask {
  kRedGreen,
  kRedGreenBlueCyan,
  kRedGreenBlueCyanMagentaYellow,
};

struct EnvConfig {
  Domain domain = Domain::kDoorKey;

  // DoorKey
  int size = 8;  // grid edge
  int keys = 1;  // 1, 2 or 4
  bool allow_duplicate_distractor_colors = false;

  // OfficeWorld
  OfficeTask office_task = OfficeTask::kDeliverCoffee;
  int office_width = 12;
  int office_height = 9;

  // WaterWorld
  WaterTask water_task = WaterTask::kRedGreen;
  double water_size = 400.0;

  // 0 selects the domain default:
  //   DoorKey     size * size * 10
  //   OfficeWorld width * height * 10
  //   WaterWorld  size / 2
  int max_steps = 0;

  uint64_t seed = 0;  // base seed; harnesses derive per-episode seeds

  int resolved_max_steps() const;
  void validate() const;
};

using Observation = std::vector<double>;

struct StepResult {
  Observation obs;
  double reward = 0.0;  // base sparse reward, in {0} U (0,1]
  bool done = false;
  bool truncated = false;
  std::set<std::string> events;  // labels emitted by this transition
};

// Image of one action under the action grounding G_A: a grounded action
// atom (pickup/toggle with a referent), a goto-directive candidate for
// movement actions, or nothing.
struct ActionGrounding {
  enum class Kind { kNone, kAtom, kGotoCandidate };
  Kind kind = Kind::kNone;
  logic::Atom atom;
  std::string candidate;

  static ActionGrounding none() { return {}; }
  static ActionGrounding of_atom(logic::Atom a) {
    ActionGrounding g;
    g.kind = Kind::kAtom;
    g.atom = std::move(a);
    return g;
  }
  static ActionGrounding goto_candidate(std::string name) {
    ActionGrounding g;
    g.kind = Kind::kGotoCandidate;
    g.candidate = std::move(name);
    return g;
  }
};

class Environment {
 public:
  virtual ~Environment() = default;

  virtual const EnvConfig& config() const = 0;
  virtual int num_actions() const = 0;
  virtual int observation_size() const = 0;
  virtual int max_steps() const = 0;
  virtual int step_count() const = 0;
  virtual bool is_done() const = 0;

  // Samples a fresh layout from the episode seed and returns the initial
  // observation. Throws GenerationError if no valid layout exists.
  virtual Observation reset(uint64_t episode_seed) = 0;

  // Deterministic transition. Throws UsageError after done.
  virtual StepResult step(int action) = 0;

  virtual Observation observe() const = 0;

  // G_F: grounded atoms describing the current state.
  virtual logic::FactBase ground_state() const = 0;

  // G_A for one action index.
  virtual ActionGrounding action_atom(int action) const = 0;

  // Movement actions that strictly decrease BFS distance to the target
  // (grid domains) or the best axis impulse toward it (WaterWorld). Empty
  // when the target is unreachable.
  virtual std::vector<int> goto_actions(const std::string& target) const = 0;
  virtual bool has_goto_target(const std::string& target) const = 0;

  virtual const logic::Vocabulary& vocabulary() const = 0;
  virtual std::set<std::string> event_alphabet() const = 0;

  virtual std::string render_ascii() const { return {}; }
};

std::unique_ptr<Environment> make_env(const EnvConfig& config);

// 1 - 0.9 * step_count / max_steps on success, 0 otherwise.
double sparse_reward(int step_count, int max_steps, bool success);

// Free-function form of the goto resolution; throws ConfigError when the
// target constant does not exist in the environment.
std::vector<int> resolve_goto(const Environment& env,
                              const std::string& target);

// Sub-goal automaton for the configured task, used by the reward-machine
// baseline. With plant_sink, OfficeWorld plant contact enters a dedicated
// absorbing failure state; otherwise it is a self-looping regress.
logic::RewardMachine build_reward_machine(const EnvConfig& config,
                                          bool plant_sink = false);

}  // namespace nsrl::env
