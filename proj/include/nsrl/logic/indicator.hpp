#pragma once

#include <vector>

#include "nsrl/env/env.hpp"
#include "nsrl/logic/entail.hpp"

namespace nsrl::logic {

using IndicatorMask = std::vector<uint8_t>;

// Per-action indicator of the symbolic policy at the current state:
// mask[a] = 1 iff the grounding of action a matches an entailed head, or a
// is among the resolved movement actions of an entailed navigation
// directive (goto/touch). Pure in (policy, facts, env pose).
IndicatorMask indicator_mask(const SymbolicPolicy& policy,
                             const FactBase& facts,
                             const env::Environment& environment);

}  // namespace nsrl::logic
