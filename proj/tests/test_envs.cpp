#include <doctest.h>

#include <cmath>

#include "nsrl/env/doorkey.hpp"
#include "nsrl/env/env.hpp"
#include "nsrl/env/officeworld.hpp"
#include "nsrl/env/waterworld.hpp"
#include "nsrl/errors.hpp"
#include "nsrl/rng.hpp"

using namespace nsrl;
using namespace nsrl::env;

namespace {

EnvConfig doorkey_config(int size = 8, int keys = 1) {
  EnvConfig c;
  c.domain = Domain::kDoorKey;
  c.size = size;
  c.keys = keys;
  return c;
}

EnvConfig office_config(OfficeTask task = OfficeTask::kDeliverCoffee) {
  EnvConfig c;
  c.domain = Domain::kOfficeWorld;
  c.office_task = task;
  return c;
}

EnvConfig water_config(WaterTask task = WaterTask::kRedGreen) {
  EnvConfig c;
  c.domain = Domain::kWaterWorld;
  c.water_task = task;
  return c;
}

}  // namespace

TEST_CASE("sparse reward closed form") {
  CHECK(sparse_reward(64, 640, true) == doctest::Approx(0.91).epsilon(1e-12));
  CHECK(sparse_reward(123, 999, false) == 0.0);
  CHECK(sparse_reward(640, 640, true) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("sparse reward matches a long-double oracle on exhaustive grids") {
  for (int max : {10, 640, 1080, 10000}) {
    const int stride = std::max(1, max / 500);
    for (int s = 0; s <= max; s += stride) {
      const double want =
          static_cast<double>(1.0L - 0.9L * static_cast<long double>(s) / max);
      CHECK(std::abs(sparse_reward(s, max, true) - want) <= 1e-12);
    }
  }
}

TEST_CASE("max_steps defaults per domain") {
  CHECK(doorkey_config(8).resolved_max_steps() == 640);
  CHECK(doorkey_config(16).resolved_max_steps() == 2560);
  CHECK(office_config().resolved_max_steps() == 1080);
  CHECK(water_config().resolved_max_steps() == 200);
  EnvConfig c = doorkey_config();
  c.max_steps = 99;
  CHECK(c.resolved_max_steps() == 99);
}

TEST_CASE("reset determinism: same config and seed give the same episode") {
  for (const EnvConfig& cfg :
       {doorkey_config(), office_config(), water_config()}) {
    auto a = make_env(cfg);
    auto b = make_env(cfg);
    CHECK(a->reset(12345) == b->reset(12345));
    Rng rng(5);
    for (int i = 0; i < 50; ++i) {
      const int action = static_cast<int>(rng.below(a->num_actions()));
      const StepResult ra = a->step(action);
      const StepResult rb = b->step(action);
      CHECK(ra.obs == rb.obs);
      CHECK(ra.reward == rb.reward);
      CHECK(ra.done == rb.done);
      CHECK(ra.events == rb.events);
      if (ra.done) {
        a->reset(777);
        b->reset(777);
      }
    }
  }
}

TEST_CASE("doorkey: one key, one door, one goal on the 1-key layout") {
  auto e = make_env(doorkey_config(8, 1));
  for (uint64_t seed = 0; seed < 30; ++seed) {
    e->reset(seed);
    auto& dk = dynamic_cast<DoorKeyEnv&>(*e);
    int keys = 0, doors = 0, goals = 0;
    for (const auto& cell : dk.state().grid) {
      if (cell.type == DoorKeyEnv::CellType::kKey) ++keys;
      if (cell.type == DoorKeyEnv::CellType::kDoor) ++doors;
      if (cell.type == DoorKeyEnv::CellType::kGoal) ++goals;
    }
    CHECK(keys == 1);
    CHECK(doors == 1);
    CHECK(goals == 1);
    // the single key always matches the door color
    for (const auto& cell : dk.state().grid) {
      if (cell.type == DoorKeyEnv::CellType::kKey) {
        CHECK(cell.color == dk.state().door_color);
      }
    }
    CHECK(dk.state().cell(dk.state().door_x, dk.state().door_y).door_state ==
          DoorKeyEnv::DoorState::kLocked);
  }
}

TEST_CASE("doorkey: multi-key layouts have exactly one matching key") {
  for (int keys : {2, 4}) {
    auto e = make_env(doorkey_config(8, keys));
    for (uint64_t seed = 0; seed < 20; ++seed) {
      e->reset(seed);
      auto& dk = dynamic_cast<DoorKeyEnv&>(*e);
      int total = 0, matching = 0;
      std::set<int> colors;
      for (const auto& cell : dk.state().grid) {
        if (cell.type == DoorKeyEnv::CellType::kKey) {
          ++total;
          colors.insert(cell.color);
          if (cell.color == dk.state().door_color) ++matching;
        }
      }
      CHECK(total == keys);
      CHECK(matching == 1);
      CHECK(static_cast<int>(colors.size()) == keys);  // distinct colors
    }
  }
}

TEST_CASE("doorkey: unsatisfiable layout raises a generation error") {
  EnvConfig c = doorkey_config(5, 4);
  CHECK_THROWS_AS(make_env(c), GenerationError);
}

TEST_CASE("doorkey: toggle facing a locked door with the matching key") {
  auto e = make_env(doorkey_config(8, 1));
  e->reset(3);
  auto& dk = dynamic_cast<DoorKeyEnv&>(*e);
  auto& st = dk.state();
  // force a canonical pose: carrying the key, standing left of the door
  st.carrying = 0;
  st.carrying_color = st.door_color;
  st.cell(st.agent_x, st.agent_y);  // agent cell stays empty
  for (auto& cell : st.grid) {
    if (cell.type == DoorKeyEnv::CellType::kKey) cell = DoorKeyEnv::Cell{};
  }
  st.agent_x = st.door_x - 1;
  st.agent_y = st.door_y;
  st.agent_dir = 0;  // east, facing the door

  const StepResult r = e->step(DoorKeyEnv::kToggle);
  CHECK(r.events.count("door_unlocked") == 1);
  CHECK(st.cell(st.door_x, st.door_y).door_state ==
        DoorKeyEnv::DoorState::kOpen);
  CHECK(r.reward == 0.0);
}

TEST_CASE("doorkey: toggle with a mismatched key does not unlock") {
  auto e = make_env(doorkey_config(8, 1));
  e->reset(3);
  auto& dk = dynamic_cast<DoorKeyEnv&>(*e);
  auto& st = dk.state();
  st.carrying = 0;
  st.carrying_color = (st.door_color + 1) % DoorKeyEnv::kNumColors;
  st.agent_x = st.door_x - 1;
  st.agent_y = st.door_y;
  st.agent_dir = 0;
  e->step(DoorKeyEnv::kToggle);
  CHECK(st.cell(st.door_x, st.door_y).door_state ==
        DoorKeyEnv::DoorState::kLocked);
}

TEST_CASE("doorkey: pickup produces the grounded action atom and event") {
  auto e = make_env(doorkey_config(8, 1));
  e->reset(11);
  auto& dk = dynamic_cast<DoorKeyEnv&>(*e);
  auto& st = dk.state();
  // place the agent facing the key
  int kx = -1, ky = -1;
  for (int y = 0; y < st.height; ++y) {
    for (int x = 0; x < st.width; ++x) {
      if (st.cell(x, y).type == DoorKeyEnv::CellType::kKey) {
        kx = x;
        ky = y;
      }
    }
  }
  REQUIRE(kx >= 0);
  st.agent_x = kx;
  st.agent_y = ky + 1 < st.height - 1 ? ky + 1 : ky - 1;
  st.agent_dir = st.agent_y > ky ? 3 : 1;  // face the key

  const ActionGrounding g = e->action_atom(DoorKeyEnv::kPickup);
  REQUIRE(g.kind == ActionGrounding::Kind::kAtom);
  CHECK(g.atom == logic::Atom{"pickup", {"k1"}});
  // facing an empty cell, toggle grounds to nothing
  CHECK(e->action_atom(DoorKeyEnv::kToggle).kind ==
        ActionGrounding::Kind::kNone);
  CHECK(e->action_atom(DoorKeyEnv::kForward).kind ==
        ActionGrounding::Kind::kGotoCandidate);

  const StepResult r = e->step(DoorKeyEnv::kPickup);
  CHECK(r.events.count("picked_matching_key") == 1);
  CHECK(st.carrying == 0);
  const logic::FactBase facts = e->ground_state();
  CHECK(facts.count({"carryingKey", {"k1"}}) == 1);
  CHECK(facts.count({"notCarrying", {}}) == 0);
}

TEST_CASE("doorkey: sameColor facts for key and door in view") {
  auto e = make_env(doorkey_config(8, 1));
  e->reset(2);
  auto& dk = dynamic_cast<DoorKeyEnv&>(*e);
  auto& st = dk.state();
  // stand next to the door facing a key placed in front, so key and door
  // are both inside the 7x7 view
  for (auto& cell : st.grid) {
    if (cell.type == DoorKeyEnv::CellType::kKey) cell = DoorKeyEnv::Cell{};
  }
  st.agent_x = st.door_x - 1;
  st.agent_y = st.door_y;
  const int key_y = st.door_y >= 2 ? st.door_y - 1 : st.door_y + 1;
  st.agent_dir = key_y < st.door_y ? 3 : 1;  // face the key
  auto& key_cell = st.cell(st.agent_x, key_y);
  key_cell.type = DoorKeyEnv::CellType::kKey;
  key_cell.color = static_cast<int8_t>(st.door_color);
  key_cell.object_id = 0;

  const logic::FactBase facts = e->ground_state();
  CHECK(facts.count({"key", {"k1"}}) == 1);
  CHECK(facts.count({"door", {"d1"}}) == 1);
  CHECK(facts.count({"locked", {"d1"}}) == 1);
  CHECK(facts.count({"sameColor", {"k1", "d1"}}) == 1);
  CHECK(facts.count({"sameColor", {"d1", "k1"}}) == 1);
  CHECK(facts.count({"unlocked", {}}) == 0);
}

TEST_CASE("doorkey: observations ignore cells outside the 7x7 window") {
  auto e = make_env(doorkey_config(16, 1));
  e->reset(9);
  auto& dk = dynamic_cast<DoorKeyEnv&>(*e);
  auto& st = dk.state();
  st.agent_x = 2;
  st.agent_y = 2;
  st.agent_dir = 0;

  const Observation before = e->observe();
  // mutate a far-away interior cell (outside any 7x7 window around (2,2))
  st.cell(13, 13).type = DoorKeyEnv::CellType::kKey;
  st.cell(13, 13).color = 0;
  st.cell(13, 13).object_id = 1;
  const Observation after = e->observe();
  CHECK(before == after);
  // mutating a cell in front of the agent does change the observation
  st.cell(4, 2).type = DoorKeyEnv::CellType::kKey;
  st.cell(4, 2).color = 0;
  CHECK(e->observe() != before);
}

TEST_CASE("doorkey: reaching the goal pays the sparse reward") {
  auto e = make_env(doorkey_config(8, 1));
  e->reset(4);
  auto& dk = dynamic_cast<DoorKeyEnv&>(*e);
  auto& st = dk.state();
  st.agent_x = st.goal_x - 1;
  st.agent_y = st.goal_y;
  st.agent_dir = 0;
  const StepResult r = e->step(DoorKeyEnv::kForward);
  CHECK(r.done);
  CHECK_FALSE(r.truncated);
  CHECK(r.reward == doctest::Approx(1.0 - 0.9 * 1.0 / 640.0).epsilon(1e-12));
  CHECK(r.events.count("reached_goal") == 1);
  CHECK_THROWS_AS(e->step(0), UsageError);
}

TEST_CASE("officeworld: blocked moves keep the position") {
  auto e = make_env(office_config());
  e->reset(0);
  auto& ow = dynamic_cast<OfficeWorldEnv&>(*e);
  // start is (2,1); the wall after column 2 blocks moving right except at
  // doorway rows 1 and 7 -- so go to (2,0) first, then right is blocked
  e->step(OfficeWorldEnv::kDown);
  CHECK(ow.state().x == 2);
  CHECK(ow.state().y == 0);
  const StepResult r = e->step(OfficeWorldEnv::kRight);
  CHECK(ow.state().x == 2);
  CHECK(ow.state().y == 0);
  CHECK(r.reward == 0.0);
  CHECK_FALSE(r.done);
  // the doorway at row 1 is open
  e->step(OfficeWorldEnv::kUp);
  e->step(OfficeWorldEnv::kRight);
  CHECK(ow.state().x == 3);
  CHECK(ow.state().y == 1);
}

TEST_CASE("officeworld: border is impassable") {
  auto e = make_env(office_config());
  e->reset(0);
  auto& ow = dynamic_cast<OfficeWorldEnv&>(*e);
  e->step(OfficeWorldEnv::kDown);
  e->step(OfficeWorldEnv::kDown);
  CHECK(ow.state().y == 0);
}

TEST_CASE("officeworld: collecting coffee flips exactly the flag bit") {
  auto e = make_env(office_config());
  e->reset(0);
  auto& ow = dynamic_cast<OfficeWorldEnv&>(*e);
  ow.state().x = 8;
  ow.state().y = 1;
  const Observation before = e->observe();
  const StepResult r = e->step(OfficeWorldEnv::kUp);  // onto coffee (8,2)
  CHECK(r.events.count("got_coffee") == 1);
  CHECK(ow.state().has_coffee);
  const Observation after = r.obs;
  CHECK(after[2] == 1.0);
  CHECK(before[2] == 0.0);
  const logic::FactBase facts = e->ground_state();
  CHECK(facts.count({"HasCoffee", {}}) == 1);
  CHECK(facts.count({"notHittingPlants", {}}) == 1);
  CHECK(facts.count({"coffee", {"cof1"}}) == 1);
  CHECK(facts.count({"coffee", {"cof2"}}) == 1);
}

TEST_CASE("officeworld: plants end the episode with zero reward") {
  auto e = make_env(office_config());
  e->reset(0);
  auto& ow = dynamic_cast<OfficeWorldEnv&>(*e);
  ow.state().x = 4;
  ow.state().y = 0;
  const StepResult r = e->step(OfficeWorldEnv::kUp);  // plant at (4,1)
  CHECK(r.done);
  CHECK(r.reward == 0.0);
  CHECK(r.events.count("hit_plant") == 1);
}

TEST_CASE("officeworld: delivering coffee to the office succeeds") {
  auto e = make_env(office_config());
  e->reset(0);
  auto& ow = dynamic_cast<OfficeWorldEnv&>(*e);
  ow.state().has_coffee = true;
  ow.state().x = 4;
  ow.state().y = 3;
  const StepResult r = e->step(OfficeWorldEnv::kUp);  // office at (4,4)
  CHECK(r.done);
  CHECK(r.reward > 0.0);
  CHECK(r.events.count("at_office") == 1);
}

TEST_CASE("officeworld: patrol visitation flags progress in order") {
  auto e = make_env(office_config(OfficeTask::kPatrolABC));
  e->reset(0);
  auto& ow = dynamic_cast<OfficeWorldEnv&>(*e);
  // enter B first: no progress
  ow.state().x = 1;
  ow.state().y = 6;
  e->step(OfficeWorldEnv::kUp);  // B at (1,7)
  CHECK_FALSE(ow.state().visited_b);
  // now A
  ow.state().x = 1;
  ow.state().y = 2;
  e->step(OfficeWorldEnv::kDown);  // A at (1,1)
  CHECK(ow.state().visited_a);
  // B again: progress
  ow.state().x = 1;
  ow.state().y = 6;
  e->step(OfficeWorldEnv::kUp);
  CHECK(ow.state().visited_b);
}

TEST_CASE("officeworld: goto candidates for movement actions") {
  auto e = make_env(office_config());
  const ActionGrounding g = e->action_atom(OfficeWorldEnv::kUp);
  CHECK(g.kind == ActionGrounding::Kind::kGotoCandidate);
  CHECK(g.candidate == "up");
}

TEST_CASE("waterworld: task variants have the right ball colors") {
  auto e = make_env(water_config(WaterTask::kRedGreenBlueCyan));
  e->reset(5);
  auto& ww = dynamic_cast<WaterWorldEnv&>(*e);
  std::set<int> colors;
  for (const auto& b : ww.state().balls) colors.insert(b.color);
  CHECK(colors == std::set<int>{0, 1, 2, 3});
  CHECK(ww.state().balls.size() == 8);  // two per color

  auto rg = make_env(water_config(WaterTask::kRedGreen));
  rg->reset(5);
  CHECK(dynamic_cast<WaterWorldEnv&>(*rg).state().balls.size() == 4);
}

TEST_CASE("waterworld: overlapping a red ball emits touched_red") {
  auto e = make_env(water_config());
  e->reset(8);
  auto& ww = dynamic_cast<WaterWorldEnv&>(*e);
  auto& st = ww.state();
  // drop a red ball directly in the agent's path
  for (auto& b : st.balls) {
    if (b.color == 0) {
      b.x = st.agent_x + 1.0;
      b.y = st.agent_y;
      b.vx = 0.0;
      b.vy = 0.0;
      break;
    }
  }
  const StepResult r = e->step(WaterWorldEnv::kNone);
  CHECK(r.events.count("touched_red") == 1);
  const logic::FactBase facts = e->ground_state();
  CHECK(facts == logic::FactBase{{"touched_red", {}}});
}

TEST_CASE("waterworld: out-of-sequence re-touch resets the pair") {
  auto e = make_env(water_config());
  e->reset(8);
  auto& ww = dynamic_cast<WaterWorldEnv&>(*e);
  ww.state().pair_state[0] = 1;
  // touching red again resets to 0
  for (auto& b : ww.state().balls) {
    b.vx = 0.0;
    b.vy = 0.0;
    b.x = ww.state().agent_x + (b.color == 0 ? 1.0 : 150.0);
    b.y = ww.state().agent_y + (b.color == 0 ? 0.0 : 150.0);
  }
  e->step(WaterWorldEnv::kNone);
  CHECK(ww.state().pair_state[0] == 0);
  CHECK(e->ground_state().empty());
}

TEST_CASE("waterworld: completing the sequence pays the sparse reward") {
  auto e = make_env(water_config());
  e->reset(8);
  auto& ww = dynamic_cast<WaterWorldEnv&>(*e);
  ww.state().pair_state[0] = 1;
  for (auto& b : ww.state().balls) {
    b.vx = 0.0;
    b.vy = 0.0;
    b.x = ww.state().agent_x + (b.color == 1 ? 1.0 : 150.0);
    b.y = ww.state().agent_y + (b.color == 1 ? 0.0 : 150.0);
  }
  const StepResult r = e->step(WaterWorldEnv::kNone);
  CHECK(r.done);
  CHECK(r.reward == doctest::Approx(1.0 - 0.9 / 200.0).epsilon(1e-12));
}

TEST_CASE("waterworld: ball speeds are conserved across bounces") {
  auto e = make_env(water_config());
  auto& ww = dynamic_cast<WaterWorldEnv&>(*e);
  Rng rng(21);
  int steps = 0;
  uint64_t episode = 0;
  e->reset(episode);
  std::vector<double> speeds;
  for (const auto& b : ww.state().balls) {
    speeds.push_back(std::hypot(b.vx, b.vy));
  }
  while (steps < 10000) {
    const StepResult r = e->step(static_cast<int>(rng.below(5)));
    ++steps;
    for (size_t i = 0; i < ww.state().balls.size(); ++i) {
      const auto& b = ww.state().balls[i];
      CHECK(std::abs(std::hypot(b.vx, b.vy) - speeds[i]) <= 1e-9);
    }
    if (r.done) {
      e->reset(++episode);
      speeds.clear();
      for (const auto& b : ww.state().balls) {
        speeds.push_back(std::hypot(b.vx, b.vy));
      }
    }
  }
}

TEST_CASE("fuzz: observation shape, fact vocabulary and episode bounds") {
  for (const EnvConfig& cfg :
       {doorkey_config(), office_config(OfficeTask::kPatrolABC),
        water_config(WaterTask::kRedGreenBlueCyan)}) {
    auto e = make_env(cfg);
    Rng rng(99);
    uint64_t episode = 0;
    e->reset(episode);
    const size_t obs_len = e->observe().size();
    CHECK(static_cast<int>(obs_len) == e->observation_size());
    int last_count = 0;
    for (int i = 0; i < 1000; ++i) {
      const StepResult r = e->step(static_cast<int>(rng.below(e->num_actions())));
      CHECK(r.obs.size() == obs_len);
      for (double v : r.obs) CHECK(std::isfinite(v));
      CHECK(r.reward >= 0.0);
      CHECK(r.reward <= 1.0);
      CHECK((r.reward == 0.0 || r.reward > 0.0));
      // every emitted fact belongs to the declared vocabulary
      for (const logic::Atom& a : e->ground_state()) {
        CHECK(e->vocabulary().has_fact(a.pred,
                                       static_cast<int>(a.args.size())));
      }
      for (const std::string& ev : r.events) {
        CHECK(e->event_alphabet().count(ev) == 1);
      }
      last_count = e->step_count();
      CHECK(last_count <= e->max_steps());
      if (r.done) {
        e->reset(++episode);
      }
    }
  }
}

TEST_CASE("episodes truncate exactly at max_steps") {
  EnvConfig cfg = office_config();
  cfg.max_steps = 25;
  auto e = make_env(cfg);
  e->reset(1);
  for (int i = 0; i < 24; ++i) {
    // bounce between two free cells, never finishing
    const StepResult r = e->step(i % 2 == 0 ? OfficeWorldEnv::kUp
                                            : OfficeWorldEnv::kDown);
    REQUIRE_FALSE(r.done);
  }
  const StepResult last = e->step(OfficeWorldEnv::kUp);
  CHECK(last.done);
  CHECK(last.truncated);
  CHECK(last.reward == 0.0);
}

TEST_CASE("reward machines: chain sizes match the task structure") {
  const auto dc = build_reward_machine(office_config());
  CHECK(dc.num_states == 3);
  auto s = dc.step(0, {"got_coffee"});
  CHECK(s.state == 1);
  CHECK(s.delta == 1);
  s = dc.step(1, {"at_office"});
  CHECK(s.state == 2);
  CHECK(s.delta == 1);
  s = dc.step(2, {"got_coffee"});  // absorbing accept
  CHECK(s.state == 2);
  CHECK(s.delta == 0);
  s = dc.step(1, {"hit_plant"});
  CHECK(s.state == 1);
  CHECK(s.delta == -1);

  const auto abc = build_reward_machine(office_config(OfficeTask::kPatrolABC));
  CHECK(abc.num_states == 4);

  const auto sink = build_reward_machine(office_config(), true);
  CHECK(sink.num_states == 4);  // extra failure state
  s = sink.step(0, {"hit_plant"});
  CHECK(s.state == 3);
  CHECK(s.delta == -1);
  s = sink.step(3, {"got_coffee"});
  CHECK(s.state == 3);
  CHECK(s.delta == 0);

  const auto mail =
      build_reward_machine(office_config(OfficeTask::kDeliverCoffeeAndMail));
  CHECK(mail.num_states == 5);
  // coffee and mail commute
  auto a = mail.step(0, {"got_coffee"});
  auto b = mail.step(a.state, {"got_mail"});
  auto c = mail.step(0, {"got_mail"});
  auto d = mail.step(c.state, {"got_coffee"});
  CHECK(b.state == d.state);
  CHECK(mail.step(b.state, {"at_office"}).state == mail.accepting);
}

TEST_CASE("reward machines: doorkey chain and waterworld regress") {
  const auto dk = build_reward_machine(doorkey_config());
  CHECK(dk.num_states == 4);
  auto s = dk.step(0, {"picked_matching_key"});
  CHECK(s.state == 1);
  s = dk.step(1, {"door_unlocked"});
  CHECK(s.state == 2);
  s = dk.step(2, {"door_closed"});
  CHECK(s.state == 1);
  CHECK(s.delta == -1);
  s = dk.step(2, {"reached_goal"});
  CHECK(s.state == 3);

  const auto ww = build_reward_machine(water_config());
  CHECK(ww.num_states == 3);
  s = ww.step(0, {"touched_red"});
  CHECK(s.state == 1);
  CHECK(s.delta == 1);
  s = ww.step(1, {"touched_red"});
  CHECK(s.state == 0);
  CHECK(s.delta == -1);
  s = ww.step(1, {"touched_green"});
  CHECK(s.state == 2);
  CHECK(s.delta == 1);

  const auto ww2 = build_reward_machine(water_config(WaterTask::kRedGreenBlueCyan));
  CHECK(ww2.num_states == 9);
  // pairs progress independently
  s = ww2.step(0, {"touched_blue"});
  CHECK(s.delta == 1);
  auto s2 = ww2.step(s.state, {"touched_red"});
  CHECK(s2.delta == 1);
}
