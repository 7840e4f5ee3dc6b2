#include "nsrl/harness/config.hpp"

#include <fstream>
#include <map>
#include <set>

#include "nsrl/errors.hpp"

namespace nsrl::harness {

namespace {

void check_keys(const ordered_json& j, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
T get_or(const ordered_json& j, const std::string& key, T fallback,
         const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

template <typename T>
T require(const ordered_json& j, const std::string& key,
          const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

env::OfficeTask office_task_from_string(const std::string& s) {
  if (s == "DeliverCoffee") return env::OfficeTask::kDeliverCoffee;
  if (s == "DeliverCoffeeAndMail") return env::OfficeTask::kDeliverCoffeeAndMail;
  if (s == "PatrolAB") return env::OfficeTask::kPatrolAB;
  if (s == "PatrolABC") return env::OfficeTask::kPatrolABC;
  throw ConfigError("unknown officeworld variant '" + s + "'");
}

std::string to_string(env::OfficeTask t) {
  switch (t) {
    case env::OfficeTask::kDeliverCoffee: return "DeliverCoffee";
    case env::OfficeTask::kDeliverCoffeeAndMail: return "DeliverCoffeeAndMail";
    case env::OfficeTask::kPatrolAB: return "PatrolAB";
    case env::OfficeTask::kPatrolABC: return "PatrolABC";
  }
  return {};
}

env::WaterTask water_task_from_string(const std::string& s) {
  if (s == "RG") return env::WaterTask::kRedGreen;
  if (s == "RG&BC") return env::WaterTask::kRedGreenBlueCyan;
  if (s == "RG&BC&MY") return env::WaterTask::kRedGreenBlueCyanMagentaYellow;
  throw ConfigError("unknown waterworld variant '" + s + "'");
}

std::string to_string(env::WaterTask t) {
  switch (t) {
    case env::WaterTask::kRedGreen: return "RG";
    case env::WaterTask::kRedGreenBlueCyan: return "RG&BC";
    case env::WaterTask::kRedGreenBlueCyanMagentaYellow: return "RG&BC&MY";
  }
  return {};
}

env::EnvConfig env_from_json(const ordered_json& j) {
  env::EnvConfig c;
  const std::string domain = require<std::string>(j, "domain", "env");
  if (domain == "doorkey") {
    c.domain = env::Domain::kDoorKey;
    check_keys(j, "env",
               {"domain", "size", "keys", "max_steps",
                "allow_duplicate_distractor_colors"});
    c.size = get_or<int>(j, "size", 8, "env");
    c.keys = get_or<int>(j, "keys", 1, "env");
    c.allow_duplicate_distractor_colors =
        get_or<bool>(j, "allow_duplicate_distractor_colors", false, "env");
  } else if (domain == "officeworld") {
    c.domain = env::Domain::kOfficeWorld;
    check_keys(j, "env", {"domain", "variant", "width", "height", "max_steps"});
    c.office_task =
        office_task_from_string(require<std::string>(j, "variant", "env"));
    c.office_width = get_or<int>(j, "width", 12, "env");
    c.office_height = get_or<int>(j, "height", 9, "env");
  } else if (domain == "waterworld") {
    c.domain = env::Domain::kWaterWorld;
    check_keys(j, "env", {"domain", "variant", "size", "max_steps"});
    c.water_task =
        water_task_from_string(require<std::string>(j, "variant", "env"));
    c.water_size = get_or<double>(j, "size", 400.0, "env");
  } else {
    throw ConfigError("env.domain: unknown domain '" + domain + "'");
  }
  c.max_steps = get_or<int>(j, "max_steps", 0, "env");
  return c;
}

ordered_json env_to_json(const env::EnvConfig& c) {
  ordered_json j;
  switch (c.domain) {
    case env::Domain::kDoorKey:
      j["domain"] = "doorkey";
      j["size"] = c.size;
      j["keys"] = c.keys;
      break;
    case env::Domain::kOfficeWorld:
      j["domain"] = "officeworld";
      j["variant"] = to_string(c.office_task);
      j["width"] = c.office_width;
      j["height"] = c.office_height;
      break;
    case env::Domain::kWaterWorld:
      j["domain"] = "waterworld";
      j["variant"] = to_string(c.water_task);
      j["size"] = c.water_size;
      break;
  }
  if (c.max_steps > 0) j["max_steps"] = c.max_steps;
  return j;
}

ppo::Hyperparams hp_from_json(const ordered_json& j) {
  check_keys(j, "hyperparams",
             {"learning_rate", "num_steps", "anneal_lr", "gamma", "gae_lambda",
              "num_minibatches", "update_epochs", "norm_adv", "clip_coef",
              "clip_vloss", "ent_coef", "vf_coef", "max_grad_norm", "num_envs",
              "total_timesteps"});
  ppo::Hyperparams hp;
  hp.learning_rate = get_or<double>(j, "learning_rate", hp.learning_rate, "hyperparams");
  hp.num_steps = get_or<int>(j, "num_steps", hp.num_steps, "hyperparams");
  hp.anneal_lr = get_or<bool>(j, "anneal_lr", hp.anneal_lr, "hyperparams");
  hp.gamma = get_or<double>(j, "gamma", hp.gamma, "hyperparams");
  hp.gae_lambda = get_or<double>(j, "gae_lambda", hp.gae_lambda, "hyperparams");
  hp.num_minibatches =
      get_or<int>(j, "num_minibatches", hp.num_minibatches, "hyperparams");
  hp.update_epochs =
      get_or<int>(j, "update_epochs", hp.update_epochs, "hyperparams");
  hp.norm_adv = get_or<bool>(j, "norm_adv", hp.norm_adv, "hyperparams");
  hp.clip_coef = get_or<double>(j, "clip_coef", hp.clip_coef, "hyperparams");
  hp.clip_vloss = get_or<bool>(j, "clip_vloss", hp.clip_vloss, "hyperparams");
  hp.ent_coef = get_or<double>(j, "ent_coef", hp.ent_coef, "hyperparams");
  hp.vf_coef = get_or<double>(j, "vf_coef", hp.vf_coef, "hyperparams");
  hp.max_grad_norm =
      get_or<double>(j, "max_grad_norm", hp.max_grad_norm, "hyperparams");
  hp.num_envs = get_or<int>(j, "num_envs", hp.num_envs, "hyperparams");
  hp.total_timesteps = get_or<long long>(j, "total_timesteps",
                                         hp.total_timesteps, "hyperparams");
  return hp;
}

ordered_json hp_to_json(const ppo::Hyperparams& hp) {
  ordered_json j;
  j["total_timesteps"] = hp.total_timesteps;
  j["num_envs"] = hp.num_envs;
  j["num_steps"] = hp.num_steps;
  j["learning_rate"] = hp.learning_rate;
  j["anneal_lr"] = hp.anneal_lr;
  j["gamma"] = hp.gamma;
  j["gae_lambda"] = hp.gae_lambda;
  j["num_minibatches"] = hp.num_minibatches;
  j["update_epochs"] = hp.update_epochs;
  j["norm_adv"] = hp.norm_adv;
  j["clip_coef"] = hp.clip_coef;
  j["clip_vloss"] = hp.clip_vloss;
  j["ent_coef"] = hp.ent_coef;
  j["vf_coef"] = hp.vf_coef;
  j["max_grad_norm"] = hp.max_grad_norm;
  return j;
}

guidance::GuidanceConfig guide_from_json(const ordered_json& j) {
  check_keys(j, "guidance",
             {"mode", "lambda", "epsilon_i", "epsilon_r", "epsilon_f", "eta",
              "theta_mode", "theta", "theta_i", "theta_r", "theta_f",
              "time_scale", "action_bonus", "progress_bonus", "plant_sink"});
  guidance::GuidanceConfig g;
  g.mode = guidance::mode_from_string(
      get_or<std::string>(j, "mode", "none", "guidance"));
  g.product.confidence =
      get_or<double>(j, "lambda", g.product.confidence, "guidance");
  g.product.eps_initial =
      get_or<double>(j, "epsilon_i", g.product.eps_initial, "guidance");
  g.product.eps_rate =
      get_or<double>(j, "epsilon_r", g.product.eps_rate, "guidance");
  g.product.eps_final =
      get_or<double>(j, "epsilon_f", g.product.eps_final, "guidance");
  g.symloss.confidence = get_or<double>(j, "eta", g.symloss.confidence, "guidance");
  const std::string theta_mode =
      get_or<std::string>(j, "theta_mode", "schedule", "guidance");
  if (theta_mode == "schedule") {
    g.symloss.schedule = true;
  } else if (theta_mode == "constant") {
    g.symloss.schedule = false;
  } else {
    throw ConfigError("guidance.theta_mode: expected schedule|constant");
  }
  g.symloss.theta = get_or<double>(j, "theta", g.symloss.theta, "guidance");
  g.symloss.theta_initial =
      get_or<double>(j, "theta_i", g.symloss.theta_initial, "guidance");
  g.symloss.theta_rate =
      get_or<double>(j, "theta_r", g.symloss.theta_rate, "guidance");
  g.symloss.theta_final =
      get_or<double>(j, "theta_f", g.symloss.theta_final, "guidance");
  const double time_scale =
      get_or<double>(j, "time_scale", g.product.time_scale, "guidance");
  g.product.time_scale = time_scale;
  g.symloss.time_scale = time_scale;
  g.rm.action_bonus =
      get_or<double>(j, "action_bonus", g.rm.action_bonus, "guidance");
  g.rm.progress_bonus =
      get_or<double>(j, "progress_bonus", g.rm.progress_bonus, "guidance");
  g.rm.plant_sink = get_or<bool>(j, "plant_sink", g.rm.plant_sink, "guidance");
  return g;
}

ordered_json guide_to_json(const guidance::GuidanceConfig& g) {
  ordered_json j;
  j["mode"] = guidance::to_string(g.mode);
  j["lambda"] = g.product.confidence;
  j["epsilon_i"] = g.product.eps_initial;
  j["epsilon_r"] = g.product.eps_rate;
  j["epsilon_f"] = g.product.eps_final;
  j["eta"] = g.symloss.confidence;
  j["theta_mode"] = g.symloss.schedule ? "schedule" : "constant";
  j["theta"] = g.symloss.theta;
  j["theta_i"] = g.symloss.theta_initial;
  j["theta_r"] = g.symloss.theta_rate;
  j["theta_f"] = g.symloss.theta_final;
  j["time_scale"] = g.product.time_scale;
  j["action_bonus"] = g.rm.action_bonus;
  j["progress_bonus"] = g.rm.progress_bonus;
  j["plant_sink"] = g.rm.plant_sink;
  return j;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (name.empty()) throw ConfigError("config: name must not be empty");
  if (seeds.empty()) throw ConfigError("config: seeds must not be empty");
  if (eval_interval <= 0) throw ConfigError("config: eval_interval must be > 0");
  environment.validate();
  hp.validate();
  guide.validate();
  if (guide.mode != guidance::Mode::kNone && rules_path.empty()) {
    throw ConfigError("config: guidance mode '" +
                      guidance::to_string(guide.mode) +
                      "' requires a rules file");
  }
}

ExperimentConfig config_from_json(const ordered_json& j) {
  check_keys(j, "config",
             {"name", "env", "hyperparams", "guidance", "rules", "seeds",
              "eval_interval", "output_dir"});
  ExperimentConfig c;
  c.name = require<std::string>(j, "name", "config");
  c.environment = env_from_json(
      j.contains("env") ? j.at("env") : throw ConfigError("config: missing key 'env'"));
  c.hp = hp_from_json(j.contains("hyperparams") ? j.at("hyperparams")
                                                : ordered_json::object());
  c.guide = guide_from_json(j.contains("guidance") ? j.at("guidance")
                                                   : ordered_json::object());
  c.rules_path = get_or<std::string>(j, "rules", "", "config");
  c.seeds = get_or<std::vector<uint64_t>>(j, "seeds", c.seeds, "config");
  c.eval_interval =
      get_or<long long>(j, "eval_interval", c.eval_interval, "config");
  c.output_dir = get_or<std::string>(j, "output_dir", c.output_dir, "config");
  c.validate();
  return c;
}

ordered_json config_to_json(const ExperimentConfig& config) {
  ordered_json j;
  j["name"] = config.name;
  j["env"] = env_to_json(config.environment);
  j["hyperparams"] = hp_to_json(config.hp);
  j["guidance"] = guide_to_json(config.guide);
  j["rules"] = config.rules_path;
  j["seeds"] = config.seeds;
  j["eval_interval"] = config.eval_interval;
  j["output_dir"] = config.output_dir;
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  ExperimentConfig c = config_from_json(j);
  c.rules_path = resolve_rules_path(path, c.rules_path);
  return c;
}

void save_config(const ExperimentConfig& config,
                 const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file: " + path.string());
  out << config_to_json(config).dump(2) << "\n";
}

std::string resolve_rules_path(const std::filesystem::path& config_path,
                               const std::string& rules_path) {
  if (rules_path.empty()) return rules_path;
  namespace fs = std::filesystem;
  if (fs::exists(rules_path)) return rules_path;
  // try next to the config file, then one level up (configs/ -> repo root)
  const fs::path dir = config_path.parent_path();
  const fs::path candidates[] = {dir / rules_path,
                                 dir.parent_path() / rules_path};
  for (const fs::path& candidate : candidates) {
    if (fs::exists(candidate)) return candidate.string();
  }
  return rules_path;
}

std::vector<std::string> known_tasks() {
  return {"doorkey_8x8_1k",      "doorkey_8x8_2k",
          "doorkey_8x8_4k",      "doorkey_16x16_1k",
          "doorkey_16x16_2k",    "doorkey_16x16_4k",
          "office_delivercoffee", "office_delivercoffeeandmail",
          "office_patrolab",     "office_patrolabc",
          "water_rg",            "water_rgbc",
          "water_rgbcmy"};
}

ExperimentConfig default_config(const std::string& task_id) {
  struct TaskSpec {
    env::EnvConfig env;
    long long total_timesteps;
    int num_envs;
    std::string rules;
    long long desk_timesteps;
  };
  static const std::map<std::string, TaskSpec> registry = [] {
    std::map<std::string, TaskSpec> m;
    const auto doorkey = [](int size, int keys) {
      env::EnvConfig e;
      e.domain = env::Domain::kDoorKey;
      e.size = size;
      e.keys = keys;
      return e;
    };
    const auto office = [](env::OfficeTask t) {
      env::EnvConfig e;
      e.domain = env::Domain::kOfficeWorld;
      e.office_task = t;
      return e;
    };
    const auto water = [](env::WaterTask t) {
      env::EnvConfig e;
      e.domain = env::Domain::kWaterWorld;
      e.water_task = t;
      return e;
    };
    const std::string dk = "rules/doorkey.rules";
    const std::string oc = "rules/officeworld_coffee.rules";
    const std::string op = "rules/officeworld_patrol.rules";
    const std::string wr = "rules/waterworld_rg.rules";
    m["doorkey_8x8_1k"] = {doorkey(8, 1), 5'000'000, 4, dk, 500'000};
    m["doorkey_8x8_2k"] = {doorkey(8, 2), 25'000'000, 8, dk, 1'000'000};
    m["doorkey_8x8_4k"] = {doorkey(8, 4), 50'000'000, 16, dk, 1'500'000};
    m["doorkey_16x16_1k"] = {doorkey(16, 1), 5'000'000, 16, dk, 500'000};
    m["doorkey_16x16_2k"] = {doorkey(16, 2), 25'000'000, 32, dk, 1'000'000};
    m["doorkey_16x16_4k"] = {doorkey(16, 4), 100'000'000, 64, dk, 2'000'000};
    m["office_delivercoffee"] = {office(env::OfficeTask::kDeliverCoffee),
                                 1'000'000, 8, oc, 300'000};
    m["office_delivercoffeeandmail"] = {
        office(env::OfficeTask::kDeliverCoffeeAndMail), 25'000'000, 32, oc,
        1'000'000};
    m["office_patrolab"] = {office(env::OfficeTask::kPatrolAB), 5'000'000, 8,
                            op, 300'000};
    m["office_patrolabc"] = {office(env::OfficeTask::kPatrolABC), 10'000'000,
                             8, op, 500'000};
    m["water_rg"] = {water(env::WaterTask::kRedGreen), 5'000'000, 8, wr,
                     500'000};
    m["water_rgbc"] = {water(env::WaterTask::kRedGreenBlueCyan), 10'000'000,
                       16, wr, 500'000};
    m["water_rgbcmy"] = {
        water(env::WaterTask::kRedGreenBlueCyanMagentaYellow), 20'000'000, 32,
        wr, 800'000};
    return m;
  }();

  auto it = registry.find(task_id);
  if (it == registry.end()) {
    throw ConfigError("unknown task '" + task_id + "'");
  }
  ExperimentConfig c;
  c.name = task_id;
  c.environment = it->second.env;
  c.hp.total_timesteps = it->second.total_timesteps;
  c.hp.num_envs = it->second.num_envs;
  c.rules_path = it->second.rules;
  return c;
}

void apply_desk_preset(ExperimentConfig& config) {
  static const std::map<std::string, long long> desk = [] {
    std::map<std::string, long long> m;
    for (const std::string& task : known_tasks()) {
      // registry lookup via default_config would recurse; hardcode here
      m[task] = 0;
    }
    m["doorkey_8x8_1k"] = 500'000;
    m["doorkey_8x8_2k"] = 1'000'000;
    m["doorkey_8x8_4k"] = 1'500'000;
    m["doorkey_16x16_1k"] = 500'000;
    m["doorkey_16x16_2k"] = 1'000'000;
    m["doorkey_16x16_4k"] = 2'000'000;
    m["office_delivercoffee"] = 300'000;
    m["office_delivercoffeeandmail"] = 1'000'000;
    m["office_patrolab"] = 300'000;
    m["office_patrolabc"] = 500'000;
    m["water_rg"] = 500'000;
    m["water_rgbc"] = 500'000;
    m["water_rgbcmy"] = 800'000;
    return m;
  }();
  auto it = desk.find(config.name);
  if (it != desk.end() && it->second > 0) {
    config.hp.total_timesteps = it->second;
  } else {
    config.hp.total_timesteps =
        std::max<long long>(config.hp.batch_size(),
                            config.hp.total_timesteps / 10);
  }
  config.seeds = {1, 2, 3};
}

}  // namespace nsrl::harness
