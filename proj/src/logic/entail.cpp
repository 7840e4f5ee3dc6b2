#include "nsrl/logic/entail.hpp"

#include <map>

namespace nsrl::logic {

namespace {

using Binding = std::map<std::string, std::string>;

// Attempts to unify a rule atom with a grounded fact under the current
// binding; records new variable bindings on success.
bool match_atom(const RuleAtom& pattern, const Atom& fact, Binding& binding,
                std::vector<std::string>& newly_bound) {
  if (pattern.pred != fact.pred || pattern.args.size() != fact.args.size()) {
    return false;
  }
  for (size_t i = 0; i < pattern.args.size(); ++i) {
    const Term& t = pattern.args[i];
    if (t.is_var) {
      auto it = binding.find(t.text);
      if (it == binding.end()) {
        binding[t.text] = fact.args[i];
        newly_bound.push_back(t.text);
      } else if (it->second != fact.args[i]) {
        return false;
      }
    } else if (t.text != fact.args[i]) {
      return false;
    }
  }
  return true;
}

Atom ground(const RuleAtom& atom, const Binding& binding) {
  Atom g;
  g.pred = atom.pred;
  g.args.reserve(atom.args.size());
  for (const Term& t : atom.args) {
    g.args.push_back(t.is_var ? binding.at(t.text) : t.text);
  }
  return g;
}

void solve(const HornRule& rule, const std::vector<const Literal*>& positives,
           size_t i, const FactBase& facts, Binding& binding,
           std::set<Atom>& out) {
  if (i == positives.size()) {
    for (const Literal& lit : rule.body) {
      if (lit.negated && facts.count(ground(lit.atom, binding))) return;
    }
    out.insert(ground(rule.head, binding));
    return;
  }
  const RuleAtom& pattern = positives[i]->atom;
  for (const Atom& fact : facts) {
    std::vector<std::string> newly_bound;
    if (match_atom(pattern, fact, binding, newly_bound)) {
      solve(rule, positives, i + 1, facts, binding, out);
    }
    for (const std::string& v : newly_bound) binding.erase(v);
  }
}

}  // namespace

std::set<Atom> entailed_heads(const SymbolicPolicy& policy,
                              const FactBase& facts) {
  std::set<Atom> out;
  for (const HornRule& rule : policy.rules) {
    std::vector<const Literal*> positives;
    for (const Literal& lit : rule.body) {
      if (!lit.negated) positives.push_back(&lit);
    }
    Binding binding;
    solve(rule, positives, 0, facts, binding, out);
  }
  return out;
}

}  // namespace nsrl::logic
