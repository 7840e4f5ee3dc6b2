#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace nsrl::harness {

struct CurvePoint {
  long long step = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

struct MethodCurve {
  std::string method;
  std::vector<CurvePoint> points;
};

// Reads episode records from each run directory (manifest.json +
// metrics.jsonl), smooths per-run returns with a rolling mean over the
// last `smoothing_window` episodes, aligns runs to a common step grid by
// last-value interpolation, and reduces across seeds to mean and
// population standard deviation. Aggregation covers only the step range
// common to every run.
std::vector<MethodCurve> aggregate_runs(
    const std::vector<std::filesystem::path>& run_dirs, int smoothing_window,
    long long grid_step);

// CSV with header step,method,mean,std. Round-trips byte-for-byte through
// read_curves_csv.
void write_curves_csv(const std::vector<MethodCurve>& curves,
                      const std::filesystem::path& path);
std::vector<MethodCurve> read_curves_csv(const std::filesystem::path& path);

// Mean lines with +-std bands; one legend entry per method, colors fixed
// per method.
void write_curves_svg(const std::vector<MethodCurve>& curves,
                      const std::filesystem::path& path,
                      const std::string& title);

const char* method_color(const std::string& method);

// Trapezoidal area under the mean curve, and the final mean value.
double curve_auc(const MethodCurve& curve);
double curve_final_mean(const MethodCurve& curve);
double curve_peak_mean(const MethodCurve& curve);

}  // namespace nsrl::harness
