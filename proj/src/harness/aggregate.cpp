#include "nsrl/harness/aggregate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "nsrl/errors.hpp"
#include "nsrl/harness/metrics.hpp"

namespace nsrl::harness {

namespace fs = std::filesystem;

namespace {

struct RunSeries {
  std::string method;
  // smoothed return at the step each episode ended
  std::vector<std::pair<long long, double>> points;
  long long last_step = 0;
};

RunSeries load_run(const fs::path& dir, int smoothing_window) {
  RunSeries series;
  const nlohmann::ordered_json manifest = load_manifest(dir);
  series.method = manifest.value("method", "unknown");

  std::ifstream in(dir / "metrics.jsonl");
  if (!in) {
    throw ConfigError("no metrics.jsonl in " + dir.string());
  }
  std::deque<double> window;
  double window_sum = 0.0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;  // tolerate a truncated final line
    const std::string kind = j.value("kind", "");
    const long long step = j.value("step", 0LL);
    series.last_step = std::max(series.last_step, step);
    if (kind != "episode") continue;
    const double ret = j.value("return", 0.0);
    window.push_back(ret);
    window_sum += ret;
    if (static_cast<int>(window.size()) > smoothing_window) {
      window_sum -= window.front();
      window.pop_front();
    }
    series.points.push_back({step, window_sum / window.size()});
  }
  return series;
}

double value_at(const RunSeries& series, long long step) {
  // last recorded smoothed value at or before `step`; 0 before the first
  // completed episode
  double value = 0.0;
  for (const auto& [s, v] : series.points) {
    if (s > step) break;
    value = v;
  }
  return value;
}

}  // namespace

std::vector<MethodCurve> aggregate_runs(const std::vector<fs::path>& run_dirs,
                                        int smoothing_window,
                                        long long grid_step) {
  if (run_dirs.empty()) {
    throw ConfigError("aggregate: no run directories given");
  }
  if (smoothing_window <= 0 || grid_step <= 0) {
    throw ConfigError("aggregate: window and grid step must be positive");
  }
  std::vector<RunSeries> runs;
  long long common_end = std::numeric_limits<long long>::max();
  for (const fs::path& dir : run_dirs) {
    runs.push_back(load_run(dir, smoothing_window));
    common_end = std::min(common_end, runs.back().last_step);
  }
  if (common_end < grid_step) {
    throw ConfigError("aggregate: runs too short for the step grid");
  }

  std::map<std::string, std::vector<const RunSeries*>> by_method;
  for (const RunSeries& r : runs) by_method[r.method].push_back(&r);

  std::vector<MethodCurve> curves;
  for (const auto& [method, group] : by_method) {
    MethodCurve curve;
    curve.method = method;
    for (long long step = grid_step; step <= common_end; step += grid_step) {
      std::vector<double> vals;
      vals.reserve(group.size());
      for (const RunSeries* r : group) vals.push_back(value_at(*r, step));
      double mean = 0.0;
      for (double v : vals) mean += v;
      mean /= vals.size();
      double var = 0.0;
      for (double v : vals) var += (v - mean) * (v - mean);
      curve.points.push_back({step, mean, std::sqrt(var / vals.size())});
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

void write_curves_csv(const std::vector<MethodCurve>& curves,
                      const fs::path& path) {
  if (curves.empty()) {
    throw ConfigError("write_curves_csv: no curves to write");
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "step,method,mean,std\n";
  for (const MethodCurve& c : curves) {
    for (const CurvePoint& p : c.points) {
      out << p.step << "," << c.method << "," << format_double(p.mean) << ","
          << format_double(p.stddev) << "\n";
    }
  }
}

std::vector<MethodCurve> read_curves_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "step,method,mean,std") {
    throw ConfigError(path.string() + ": not a curves CSV");
  }
  std::map<std::string, MethodCurve> by_method;
  std::vector<std::string> order;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string step_s, method, mean_s, std_s;
    std::getline(ss, step_s, ',');
    std::getline(ss, method, ',');
    std::getline(ss, mean_s, ',');
    std::getline(ss, std_s, ',');
    CurvePoint p;
    p.step = std::stoll(step_s);
    p.mean = std::stod(mean_s);
    p.stddev = std::stod(std_s);
    if (!by_method.count(method)) {
      by_method[method].method = method;
      order.push_back(method);
    }
    by_method[method].points.push_back(p);
  }
  std::vector<MethodCurve> curves;
  for (const std::string& m : order) curves.push_back(by_method[m]);
  return curves;
}

const char* method_color(const std::string& method) {
  if (method == "product") return "#0173B2";  // blue
  if (method == "symloss") return "#CC78BC";  // pink
  if (method == "ppo") return "#ED9C0E";      // yellow
  if (method == "ppo_rm") return "#029E73";   // green
  return "#555555";
}

void write_curves_svg(const std::vector<MethodCurve>& curves,
                      const fs::path& path, const std::string& title) {
  if (curves.empty()) {
    throw ConfigError("write_curves_svg: no curves to render");
  }
  const double width = 820, height = 520;
  const double ml = 70, mr = 30, mt = 50, mb = 55;
  const double plot_w = width - ml - mr, plot_h = height - mt - mb;

  long long max_step = 1;
  for (const MethodCurve& c : curves) {
    for (const CurvePoint& p : c.points) max_step = std::max(max_step, p.step);
  }
  const auto sx = [&](long long step) {
    return ml + plot_w * static_cast<double>(step) / max_step;
  };
  const auto sy = [&](double ret) {
    const double clamped = std::clamp(ret, 0.0, 1.0);
    return mt + plot_h * (1.0 - clamped);
  };

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"28\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"18\">" << title
      << "</text>\n";

  // axes and gridlines
  out << "<g stroke=\"#cccccc\" stroke-width=\"1\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double y = mt + plot_h * i / 5.0;
    out << "<line x1=\"" << ml << "\" y1=\"" << y << "\" x2=\"" << ml + plot_w
        << "\" y2=\"" << y << "\"/>\n";
  }
  out << "</g>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double v = 1.0 - i / 5.0;
    const double y = mt + plot_h * i / 5.0;
    out << "<text x=\"" << ml - 8 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\">" << format_double(v) << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const long long s = max_step * i / 4;
    out << "<text x=\"" << sx(s) << "\" y=\"" << mt + plot_h + 20
        << "\" text-anchor=\"middle\">" << s << "</text>\n";
  }
  out << "<text x=\"" << ml + plot_w / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\">environment steps</text>\n";
  out << "<text x=\"18\" y=\"" << mt + plot_h / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << mt + plot_h / 2 << ")\">return</text>\n";
  out << "</g>\n";

  for (const MethodCurve& c : curves) {
    if (c.points.empty()) continue;
    const char* color = method_color(c.method);
    // std band
    out << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" "
        << "stroke=\"none\" points=\"";
    for (const CurvePoint& p : c.points) {
      out << sx(p.step) << "," << sy(p.mean + p.stddev) << " ";
    }
    for (auto it = c.points.rbegin(); it != c.points.rend(); ++it) {
      out << sx(it->step) << "," << sy(it->mean - it->stddev) << " ";
    }
    out << "\"/>\n";
    // mean line
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\" points=\"";
    for (const CurvePoint& p : c.points) {
      out << sx(p.step) << "," << sy(p.mean) << " ";
    }
    out << "\"/>\n";
  }

  // legend
  double ly = mt + 14;
  for (const MethodCurve& c : curves) {
    const char* color = method_color(c.method);
    out << "<rect x=\"" << ml + plot_w - 150 << "\" y=\"" << ly - 10
        << "\" width=\"18\" height=\"4\" fill=\"" << color << "\"/>\n";
    out << "<text class=\"legend\" x=\"" << ml + plot_w - 126 << "\" y=\""
        << ly - 4 << "\" font-family=\"sans-serif\" font-size=\"13\">"
        << c.method << "</text>\n";
    ly += 20;
  }
  out << "</svg>\n";
}

double curve_auc(const MethodCurve& curve) {
  double auc = 0.0;
  for (size_t i = 1; i < curve.points.size(); ++i) {
    const double dx = static_cast<double>(curve.points[i].step -
                                          curve.points[i - 1].step);
    auc += 0.5 * (curve.points[i].mean + curve.points[i - 1].mean) * dx;
  }
  return auc;
}

double curve_final_mean(const MethodCurve& curve) {
  if (curve.points.empty()) return 0.0;
  return curve.points.back().mean;
}

double curve_peak_mean(const MethodCurve& curve) {
  double peak = 0.0;
  for (const CurvePoint& p : curve.points) peak = std::max(peak, p.mean);
  return peak;
}

}  // namespace nsrl::harness
