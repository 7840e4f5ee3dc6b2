#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace nsrl::logic {

// Grounded atom: predicate applied to constant arguments.
struct Atom {
  std::string pred;
  std::vector<std::string> args;

  auto operator<=>(const Atom&) const = default;
};

// Set of grounded atoms describing the current state (the image of G_F).
using FactBase = std::set<Atom>;

std::string to_string(const Atom& a);

// Declared predicate vocabulary for one domain: fact predicates, action
// predicates, and the subset of action predicates that are high-level
// navigation directives (resolved to movement actions rather than matched
// against a single grounded action).
struct Vocabulary {
  std::map<std::string, int> fact_preds;    // name -> arity
  std::map<std::string, int> action_preds;  // name -> arity
  std::set<std::string> directive_preds;

  bool has_fact(const std::string& name, int arity) const {
    auto it = fact_preds.find(name);
    return it != fact_preds.end() && it->second == arity;
  }
  bool has_action(const std::string& name, int arity) const {
    auto it = action_preds.find(name);
    return it != action_preds.end() && it->second == arity;
  }
};

}  // namespace nsrl::logic
