#pragma once

#include "nsrl/logic/atom.hpp"
#include "nsrl/logic/rules.hpp"

namespace nsrl::logic {

// Grounded action atoms entailed by the policy under the fact base:
// for every rule and every substitution making all positive body literals
// members of `facts` and no negated literal a member, the grounded head is
// produced. Negation is negation-as-failure.
std::set<Atom> entailed_heads(const SymbolicPolicy& policy,
                              const FactBase& facts);

}  // namespace nsrl::logic
