#include "nsrl/logic/indicator.hpp"

namespace nsrl::logic {

IndicatorMask indicator_mask(const SymbolicPolicy& policy,
                             const FactBase& facts,
                             const env::Environment& environment) {
  const int num_actions = environment.num_actions();
  IndicatorMask mask(num_actions, 0);
  const std::set<Atom> heads = entailed_heads(policy, facts);
  if (heads.empty()) return mask;

  const Vocabulary& vocab = environment.vocabulary();
  for (int a = 0; a < num_actions; ++a) {
    const env::ActionGrounding g = environment.action_atom(a);
    if (g.kind == env::ActionGrounding::Kind::kAtom && heads.count(g.atom)) {
      mask[a] = 1;
    }
  }
  for (const Atom& head : heads) {
    if (!vocab.directive_preds.count(head.pred) || head.args.size() != 1) {
      continue;
    }
    if (!environment.has_goto_target(head.args[0])) continue;
    for (int a : environment.goto_actions(head.args[0])) {
      mask[a] = 1;
    }
  }
  return mask;
}

}  // namespace nsrl::logic
