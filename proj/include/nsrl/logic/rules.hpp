#pragma once

#include <string>
#include <vector>

#include "nsrl/logic/atom.hpp"

namespace nsrl::logic {

// Term in a rule: a variable (uppercase first letter in argument position)
// or a constant (lowercase).
struct Term {
  bool is_var = false;
  std::string text;

  auto operator<=>(const Term&) const = default;
};

struct RuleAtom {
  std::string pred;
  std::vector<Term> args;

  auto operator<=>(const RuleAtom&) const = default;
};

// Body literal: positive atom or negation-as-failure atom.
struct Literal {
  bool negated = false;
  RuleAtom atom;

  auto operator<=>(const Literal&) const = default;
};

// head :- lit1, ..., litN.  Head predicate is an action predicate; every
// head variable and every variable under negation must occur in some
// positive body literal.
struct HornRule {
  RuleAtom head;
  std::vector<Literal> body;

  auto operator<=>(const HornRule&) const = default;
};

struct SymbolicPolicy {
  std::string source_name;
  std::vector<HornRule> rules;
};

// Parses the rule DSL:
//   head :- lit1, lit2, not lit3.
//   % comment to end of line
// Constants are lowercase identifiers, variables uppercase (in argument
// position); a bare identifier outside parentheses is a 0-ary predicate
// regardless of case. Throws RuleParseError with line/column diagnostics.
// When a vocabulary is given, predicates are checked against it.
SymbolicPolicy parse_rules(const std::string& text,
                           const std::string& source_name = "",
                           const Vocabulary* vocab = nullptr);

SymbolicPolicy parse_rules_file(const std::string& path,
                                const Vocabulary* vocab = nullptr);

std::string to_string(const RuleAtom& a);
std::string to_string(const HornRule& r);
std::string to_string(const SymbolicPolicy& p);

}  // namespace nsrl::logic
