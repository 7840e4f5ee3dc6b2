#pragma once

#include <set>
#include <string>
#include <vector>

namespace nsrl::logic {

// Finite automaton over event labels tracking sub-goal progress. At most
// one transition fires per event set (first match in declaration order);
// everything else self-loops. The accepting state is absorbing.
struct RmTransition {
  int from = 0;
  std::string event;
  int to = 0;
  int delta = 0;  // +1 progress, -1 regress, 0 neutral
};

struct RewardMachine {
  int num_states = 1;
  int initial = 0;
  int accepting = 0;
  std::vector<RmTransition> transitions;
  std::vector<std::string> alphabet;

  struct Step {
    int state;
    int delta;
  };

  // Deterministic: exactly one successor for every (state, event set).
  Step step(int state, const std::set<std::string>& events) const;
};

}  // namespace nsrl::logic
