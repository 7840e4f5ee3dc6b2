#include <doctest.h>

#include <map>

#include "nsrl/errors.hpp"
#include "nsrl/logic/entail.hpp"
#include "nsrl/logic/pathing.hpp"
#include "nsrl/logic/reward_machine.hpp"
#include "nsrl/logic/rules.hpp"
#include "nsrl/rng.hpp"

using namespace nsrl;
using namespace nsrl::logic;

TEST_CASE("parser: doorkey toggle rule") {
  const auto p = parse_rules(
      "toggle(X) :- door(X), locked(X), carryingKey(Z), sameColor(X,Z).");
  REQUIRE(p.rules.size() == 1);
  const HornRule& r = p.rules[0];
  CHECK(r.head.pred == "toggle");
  CHECK(r.head.args.size() == 1);
  CHECK(r.head.args[0].is_var);
  CHECK(r.body.size() == 4);
  CHECK(r.body[3].atom.pred == "sameColor");
  CHECK(r.body[3].atom.args[1].text == "Z");
}

TEST_CASE("parser: negation-as-failure literals in the patrol rule") {
  const auto p = parse_rules(
      "goto(X) :- room_a(X), not visited_a, not visited_b, not visited_c, "
      "notHittingPlants.");
  REQUIRE(p.rules.size() == 1);
  const HornRule& r = p.rules[0];
  CHECK(r.body.size() == 5);
  CHECK_FALSE(r.body[0].negated);
  CHECK(r.body[1].negated);
  CHECK(r.body[1].atom.pred == "visited_a");
  CHECK(r.body[1].atom.args.empty());
  CHECK(r.body[2].negated);
  CHECK(r.body[3].negated);
  CHECK_FALSE(r.body[4].negated);
  CHECK(r.body[4].atom.pred == "notHittingPlants");
}

TEST_CASE("parser: uppercase 0-ary predicate is not a variable") {
  const auto p = parse_rules("goto(X) :- office(X), HasCoffee.");
  CHECK(p.rules[0].body[1].atom.pred == "HasCoffee");
  CHECK(p.rules[0].body[1].atom.args.empty());
}

TEST_CASE("parser: constant head argument") {
  const auto p = parse_rules("touch(red) :- not touched_red.");
  CHECK_FALSE(p.rules[0].head.args[0].is_var);
  CHECK(p.rules[0].head.args[0].text == "red");
}

TEST_CASE("parser: malformed input reports a position") {
  try {
    parse_rules("foo(X) :- bar(Y.");
    FAIL("expected a parse error");
  } catch (const RuleParseError& e) {
    CHECK(e.line == 1);
    CHECK(std::string(e.what()).find("')'") != std::string::npos);
  }
}

TEST_CASE("parser: unbound head variable is rejected") {
  CHECK_THROWS_AS(parse_rules("go(X) :- there."), RuleParseError);
}

TEST_CASE("parser: unsafe negated variable is rejected") {
  CHECK_THROWS_AS(parse_rules("go(X) :- here(X), not seen(Y)."),
                  RuleParseError);
}

TEST_CASE("parser: vocabulary check flags unknown predicates") {
  Vocabulary vocab;
  vocab.fact_preds = {{"door", 1}};
  vocab.action_preds = {{"toggle", 1}};
  CHECK_NOTHROW(parse_rules("toggle(X) :- door(X).", "", &vocab));
  CHECK_THROWS_AS(parse_rules("toggle(X) :- window(X).", "", &vocab),
                  RuleParseError);
  CHECK_THROWS_AS(parse_rules("open(X) :- door(X).", "", &vocab),
                  RuleParseError);
  // wrong arity is also unknown
  CHECK_THROWS_AS(parse_rules("toggle(X) :- door(X, X).", "", &vocab),
                  RuleParseError);
}

TEST_CASE("parser: comments and blank lines are skipped") {
  const auto p = parse_rules(
      "% a comment\n\n  toggle(X) :- door(X). % trailing\n% done\n");
  CHECK(p.rules.size() == 1);
}

TEST_CASE("parser round-trips its own printout") {
  const std::string text =
      "pickup(X) :- key(X), sameColor(X, Y), door(Y), notCarrying.\n"
      "toggle(X) :- door(X), locked(X), carryingKey(Z), sameColor(X, Z).\n"
      "goto(X) :- goal(X), unlocked.\n"
      "touch(red) :- not touched_red, not touched_green.\n";
  const auto p = parse_rules(text);
  const auto q = parse_rules(to_string(p));
  CHECK(p.rules == q.rules);
  CHECK(to_string(p) == to_string(q));
}

TEST_CASE("entailment: doorkey toggle example") {
  const auto p = parse_rules(
      "toggle(X) :- door(X), locked(X), carryingKey(Z), sameColor(X,Z).");
  FactBase facts = {{"door", {"d1"}},
                    {"locked", {"d1"}},
                    {"carryingKey", {"k1"}},
                    {"sameColor", {"d1", "k1"}}};
  const auto heads = entailed_heads(p, facts);
  CHECK(heads == std::set<Atom>{{"toggle", {"d1"}}});
}

TEST_CASE("entailment: empty fact base entails nothing with positive bodies") {
  const auto p = parse_rules("go(X) :- place(X).");
  CHECK(entailed_heads(p, {}).empty());
}

TEST_CASE("entailment: rule with only negated body fires on empty facts") {
  const auto p = parse_rules("touch(red) :- not touched_red.");
  CHECK(entailed_heads(p, {}) == std::set<Atom>{{"touch", {"red"}}});
  CHECK(entailed_heads(p, {{"touched_red", {}}}).empty());
}

namespace {

// Exhaustive substitution enumeration over every constant in the fact base
// and the rules. Independent of the implementation's join order.
std::set<Atom> entail_oracle(const SymbolicPolicy& policy,
                             const FactBase& facts) {
  std::set<std::string> constants;
  for (const Atom& f : facts) {
    for (const std::string& a : f.args) constants.insert(a);
  }
  for (const HornRule& r : policy.rules) {
    for (const Term& t : r.head.args) {
      if (!t.is_var) constants.insert(t.text);
    }
    for (const Literal& l : r.body) {
      for (const Term& t : l.atom.args) {
        if (!t.is_var) constants.insert(t.text);
      }
    }
  }
  const std::vector<std::string> consts(constants.begin(), constants.end());

  std::set<Atom> out;
  for (const HornRule& r : policy.rules) {
    std::set<std::string> var_set;
    for (const Literal& l : r.body) {
      for (const Term& t : l.atom.args) {
        if (t.is_var) var_set.insert(t.text);
      }
    }
    for (const Term& t : r.head.args) {
      if (t.is_var) var_set.insert(t.text);
    }
    const std::vector<std::string> vars(var_set.begin(), var_set.end());

    std::vector<size_t> assignment(vars.size(), 0);
    const size_t total = vars.empty() ? 1
                         : [&] {
                             size_t n = 1;
                             for (size_t i = 0; i < vars.size(); ++i) {
                               n *= consts.size();
                             }
                             return n;
                           }();
    if (!vars.empty() && consts.empty()) continue;
    for (size_t code = 0; code < total; ++code) {
      std::map<std::string, std::string> binding;
      size_t rest = code;
      for (size_t i = 0; i < vars.size(); ++i) {
        binding[vars[i]] = consts[rest % consts.size()];
        rest /= consts.size();
      }
      const auto ground = [&](const RuleAtom& a) {
        Atom g;
        g.pred = a.pred;
        for (const Term& t : a.args) {
          g.args.push_back(t.is_var ? binding.at(t.text) : t.text);
        }
        return g;
      };
      bool ok = true;
      for (const Literal& l : r.body) {
        const bool present = facts.count(ground(l.atom)) > 0;
        if (l.negated ? present : !present) {
          ok = false;
          break;
        }
      }
      if (ok) out.insert(ground(r.head));
    }
  }
  return out;
}

SymbolicPolicy random_policy(Rng& rng, const std::vector<std::string>& consts) {
  const std::vector<std::string> fact_preds = {"p0", "p1", "p2", "p3"};
  const std::vector<int> fact_arity = {0, 1, 2, 1};
  const std::vector<std::string> vars = {"X", "Y", "Z"};

  SymbolicPolicy policy;
  const int num_rules = rng.range(1, 4);
  for (int ri = 0; ri < num_rules; ++ri) {
    HornRule rule;
    const int num_pos = rng.range(1, 3);
    const int num_neg = rng.range(0, 2);
    std::set<std::string> bound;
    for (int i = 0; i < num_pos; ++i) {
      const int pi = rng.range(0, 3);
      Literal lit;
      lit.atom.pred = fact_preds[pi];
      for (int a = 0; a < fact_arity[pi]; ++a) {
        Term t;
        if (rng.uniform() < 0.6) {
          t.is_var = true;
          t.text = vars[rng.range(0, 2)];
          bound.insert(t.text);
        } else {
          t.text = consts[rng.below(consts.size())];
        }
        lit.atom.args.push_back(t);
      }
      rule.body.push_back(lit);
    }
    const std::vector<std::string> bound_list(bound.begin(), bound.end());
    for (int i = 0; i < num_neg; ++i) {
      const int pi = rng.range(0, 3);
      Literal lit;
      lit.negated = true;
      lit.atom.pred = fact_preds[pi];
      for (int a = 0; a < fact_arity[pi]; ++a) {
        Term t;
        if (!bound_list.empty() && rng.uniform() < 0.6) {
          t.is_var = true;
          t.text = bound_list[rng.below(bound_list.size())];
        } else {
          t.text = consts[rng.below(consts.size())];
        }
        lit.atom.args.push_back(t);
      }
      rule.body.push_back(lit);
    }
    rule.head.pred = "act" + std::to_string(rng.range(0, 1));
    const int head_arity = rng.range(0, 2);
    for (int a = 0; a < head_arity; ++a) {
      Term t;
      if (!bound_list.empty() && rng.uniform() < 0.7) {
        t.is_var = true;
        t.text = bound_list[rng.below(bound_list.size())];
      } else {
        t.text = consts[rng.below(consts.size())];
      }
      rule.head.args.push_back(t);
    }
    policy.rules.push_back(rule);
  }
  return policy;
}

FactBase random_facts(Rng& rng, const std::vector<std::string>& consts) {
  const std::vector<std::string> fact_preds = {"p0", "p1", "p2", "p3"};
  const std::vector<int> fact_arity = {0, 1, 2, 1};
  FactBase facts;
  const int n = rng.range(0, 12);
  for (int i = 0; i < n; ++i) {
    const int pi = rng.range(0, 3);
    Atom a;
    a.pred = fact_preds[pi];
    for (int k = 0; k < fact_arity[pi]; ++k) {
      a.args.push_back(consts[rng.below(consts.size())]);
    }
    facts.insert(a);
  }
  return facts;
}

}  // namespace

TEST_CASE("entailment equals the brute-force enumeration oracle") {
  Rng rng(31337);
  const std::vector<std::string> consts = {"a", "b", "c", "d", "e", "f"};
  for (int trial = 0; trial < 200; ++trial) {
    const SymbolicPolicy policy = random_policy(rng, consts);
    const FactBase facts = random_facts(rng, consts);
    const auto got = entailed_heads(policy, facts);
    const auto want = entail_oracle(policy, facts);
    REQUIRE_MESSAGE(got == want, "mismatch on trial ", trial, "\npolicy:\n",
                    to_string(policy));
  }
}

TEST_CASE("negation-as-failure: adding the blocked fact removes conclusions") {
  const auto p = parse_rules(
      "go(X) :- at(X), not blocked(X).\n"
      "stay(X) :- at(X).\n");
  FactBase facts = {{"at", {"a"}}, {"at", {"b"}}};
  auto before = entailed_heads(p, facts);
  CHECK(before.count({"go", {"a"}}) == 1);
  CHECK(before.count({"go", {"b"}}) == 1);

  facts.insert({"blocked", {"a"}});
  auto after = entailed_heads(p, facts);
  // exactly the conclusions depending on the negated literal disappear
  CHECK(after.count({"go", {"a"}}) == 0);
  CHECK(after.count({"go", {"b"}}) == 1);
  CHECK(after.count({"stay", {"a"}}) == 1);
  CHECK(after.count({"stay", {"b"}}) == 1);
}

TEST_CASE("reward machine: deterministic chain with absorbing accept") {
  RewardMachine rm;
  rm.num_states = 3;
  rm.initial = 0;
  rm.accepting = 2;
  rm.transitions = {{0, "got_coffee", 1, +1}, {1, "at_office", 2, +1}};
  rm.alphabet = {"got_coffee", "at_office"};

  auto s = rm.step(0, {"got_coffee"});
  CHECK(s.state == 1);
  CHECK(s.delta == 1);
  s = rm.step(1, {});
  CHECK(s.state == 1);
  CHECK(s.delta == 0);
  s = rm.step(2, {"got_coffee", "at_office"});
  CHECK(s.state == 2);
  CHECK(s.delta == 0);
  CHECK_THROWS_AS(rm.step(7, {}), UsageError);
}

TEST_CASE("reward machine: exactly one successor per event subset") {
  RewardMachine rm;
  rm.num_states = 3;
  rm.initial = 0;
  rm.accepting = 2;
  rm.transitions = {{0, "a", 1, +1}, {0, "b", 0, -1}, {1, "b", 2, +1},
                    {1, "a", 0, -1}};
  rm.alphabet = {"a", "b"};
  for (int state = 0; state < rm.num_states; ++state) {
    for (int subset = 0; subset < 4; ++subset) {
      std::set<std::string> events;
      if (subset & 1) events.insert("a");
      if (subset & 2) events.insert("b");
      const auto out = rm.step(state, events);  // must not throw, one result
      CHECK(out.state >= 0);
      CHECK(out.state < rm.num_states);
    }
  }
}

TEST_CASE("bfs distances against a reference on random mazes") {
  Rng rng(777);
  for (int trial = 0; trial < 50; ++trial) {
    const int w = 8, h = 8;
    std::vector<uint8_t> wall(w * h, 0);
    for (auto& c : wall) c = rng.uniform() < 0.25 ? 1 : 0;
    const int target = static_cast<int>(rng.below(w * h));
    wall[target] = 0;

    const auto neighbors = [&](int cell, std::vector<int>& out) {
      const int x = cell % w, y = cell / w;
      const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
      for (int d = 0; d < 4; ++d) {
        const int nx = x + dx[d], ny = y + dy[d];
        if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
        if (wall[ny * w + nx]) continue;
        out.push_back(ny * w + nx);
      }
    };
    const auto dist = bfs_distances(w * h, target, neighbors);

    // reference: Bellman-Ford style relaxation
    std::vector<int> ref(w * h, 1 << 20);
    ref[target] = 0;
    for (int pass = 0; pass < w * h; ++pass) {
      for (int cell = 0; cell < w * h; ++cell) {
        if (ref[cell] == (1 << 20)) continue;
        std::vector<int> adj;
        neighbors(cell, adj);
        for (int nb : adj) ref[nb] = std::min(ref[nb], ref[cell] + 1);
      }
    }
    for (int cell = 0; cell < w * h; ++cell) {
      if (wall[cell] && cell != target) continue;
      const int want = ref[cell] == (1 << 20) ? kUnreachable : ref[cell];
      CHECK(dist[cell] == want);
    }
  }
}
