#include "nsrl/logic/reward_machine.hpp"

#include "nsrl/errors.hpp"

namespace nsrl::logic {

RewardMachine::Step RewardMachine::step(
    int state, const std::set<std::string>& events) const {
  if (state < 0 || state >= num_states) {
    throw UsageError("reward machine: invalid state " + std::to_string(state));
  }
  if (state == accepting) return {state, 0};  // absorbing
  for (const RmTransition& t : transitions) {
    if (t.from == state && events.count(t.event)) {
      return {t.to, t.delta};
    }
  }
  return {state, 0};  // self-loop
}

}  // namespace nsrl::logic
