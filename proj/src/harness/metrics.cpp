#include "nsrl/harness/metrics.hpp"

#include <charconv>

#include "nsrl/errors.hpp"

namespace nsrl::harness {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

MetricsWriter::MetricsWriter(const fs::path& run_dir)
    : dir_(run_dir), start_(std::chrono::steady_clock::now()) {
  fs::create_directories(run_dir);
  jsonl_.open(run_dir / "metrics.jsonl", std::ios::trunc);
  if (!jsonl_) {
    throw ConfigError("cannot open metrics file in " + run_dir.string());
  }
}

long long MetricsWriter::wall_ms() const {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now() - start_)
      .count();
}

void MetricsWriter::write_episode(long long global_step,
                                  double reported_return, int length) {
  nlohmann::ordered_json j;
  j["kind"] = "episode";
  j["step"] = global_step;
  j["return"] = reported_return;
  j["length"] = length;
  j["wall_ms"] = wall_ms();
  jsonl_ << j.dump() << "\n";
  jsonl_.flush();
  Row r;
  r.is_episode = true;
  r.step = global_step;
  r.ret = reported_return;
  r.length = length;
  rows_.push_back(r);
}

void MetricsWriter::write_update(long long global_step, double lr,
                                 const ppo::UpdateStats& stats, double eps_t,
                                 double theta_t) {
  nlohmann::ordered_json j;
  j["kind"] = "update";
  j["step"] = global_step;
  j["lr"] = lr;
  j["policy_loss"] = stats.policy_loss;
  j["value_loss"] = stats.value_loss;
  j["entropy"] = stats.entropy;
  j["sym_loss"] = stats.sym_loss;
  j["approx_kl"] = stats.approx_kl;
  j["clip_frac"] = stats.clip_frac;
  j["eps_t"] = eps_t;
  j["theta_t"] = theta_t;
  j["wall_ms"] = wall_ms();
  jsonl_ << j.dump() << "\n";
  jsonl_.flush();
  Row r;
  r.is_episode = false;
  r.step = global_step;
  r.lr = lr;
  r.stats = stats;
  r.eps_t = eps_t;
  r.theta_t = theta_t;
  rows_.push_back(r);
}

const char* MetricsWriter::csv_header() {
  return "kind,step,return,length,lr,policy_loss,value_loss,entropy,"
         "sym_loss,approx_kl,clip_frac,eps_t,theta_t";
}

void MetricsWriter::finalize() {
  std::ofstream csv(dir_ / "metrics.csv", std::ios::trunc);
  if (!csv) throw ConfigError("cannot write metrics.csv in " + dir_.string());
  csv << csv_header() << "\n";
  for (const Row& r : rows_) {
    if (r.is_episode) {
      csv << "episode," << r.step << "," << format_double(r.ret) << ","
          << r.length << ",,,,,,,,,\n";
    } else {
      csv << "update," << r.step << ",,," << format_double(r.lr) << ","
          << format_double(r.stats.policy_loss) << ","
          << format_double(r.stats.value_loss) << ","
          << format_double(r.stats.entropy) << ","
          << format_double(r.stats.sym_loss) << ","
          << format_double(r.stats.approx_kl) << ","
          << format_double(r.stats.clip_frac) << ","
          << format_double(r.eps_t) << "," << format_double(r.theta_t)
          << "\n";
    }
  }
}

namespace {

void atomic_write(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
  return buf;
}

nlohmann::ordered_json base_manifest(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["name"] = m.name;
  j["method"] = m.method;
  j["seed"] = m.seed;
  j["build"] = "nsrl 0.1.0";
  if (!m.ablation_param.empty()) {
    j["ablation"] = {{"param", m.ablation_param}, {"value", m.ablation_value}};
  }
  j["config"] = m.config;
  return j;
}

}  // namespace

void RunManifest::write_started(const fs::path& run_dir) const {
  fs::create_directories(run_dir);
  nlohmann::ordered_json j = base_manifest(*this);
  j["status"] = "running";
  j["started_at"] = now_iso8601();
  atomic_write(run_dir / "manifest.json", j.dump(2) + "\n");
}

void RunManifest::write_finished(const fs::path& run_dir,
                                 long long global_steps, long long episodes,
                                 double mean_return_recent) const {
  nlohmann::ordered_json j = base_manifest(*this);
  j["status"] = "complete";
  j["started_at"] = load_manifest(run_dir).value("started_at", "");
  j["ended_at"] = now_iso8601();
  j["summary"] = {{"global_steps", global_steps},
                  {"episodes", episodes},
                  {"mean_return_recent", mean_return_recent}};
  atomic_write(run_dir / "manifest.json", j.dump(2) + "\n");
}

nlohmann::ordered_json load_manifest(const fs::path& run_dir) {
  std::ifstream in(run_dir / "manifest.json");
  if (!in) {
    throw ConfigError("no manifest.json in " + run_dir.string());
  }
  nlohmann::ordered_json j;
  in >> j;
  return j;
}

}  // namespace nsrl::harness
