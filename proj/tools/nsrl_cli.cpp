#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "nsrl/errors.hpp"
#include "nsrl/harness/aggregate.hpp"
#include "nsrl/harness/config.hpp"
#include "nsrl/harness/runner.hpp"

namespace fs = std::filesystem;
using namespace nsrl;

namespace {

int run_app(int argc, char** argv) {
  CLI::App app{"Neuro-symbolic PPO experiment runner"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "Train every seed of one config");
  std::string train_config, train_guidance, train_out;
  int64_t train_seed = -1;
  bool train_desk = false;
  train->add_option("--config", train_config, "Experiment config JSON")
      ->required();
  train->add_option("--seed", train_seed, "Run only this seed");
  train->add_option("--guidance", train_guidance,
                    "Override guidance mode (none|product|symloss|rm)");
  train->add_option("--out", train_out, "Override output directory");
  train->add_flag("--preset", train_desk,
                  "Desk preset: reduced timesteps, 3 seeds")
      ->option_text("desk");

  // aggregate
  auto* agg = app.add_subcommand(
      "aggregate", "Aggregate runs into mean/std learning curves");
  std::vector<std::string> agg_runs;
  std::string agg_out;
  int agg_window = 100;
  int64_t agg_grid = 4096;
  agg->add_option("--runs", agg_runs, "Run directories")->required();
  agg->add_option("--out", agg_out, "Output CSV path")->required();
  agg->add_option("--window", agg_window, "Episode smoothing window");
  agg->add_option("--grid", agg_grid, "Step grid for alignment");

  // plot
  auto* plot = app.add_subcommand("plot", "Render curves CSV to SVG");
  std::string plot_curves, plot_out, plot_title;
  plot->add_option("--curves", plot_curves, "Curves CSV from aggregate")
      ->required();
  plot->add_option("--out", plot_out, "Output directory")->required();
  plot->add_option("--title", plot_title, "Plot title");

  // ablate
  auto* ablate = app.add_subcommand("ablate", "Run a parameter ablation grid");
  std::string ablate_config, ablate_param, ablate_out;
  bool ablate_desk = false;
  ablate->add_option("--config", ablate_config, "Experiment config JSON")
      ->required();
  ablate->add_option("--param", ablate_param, "theta or epsilon_f")
      ->required();
  ablate->add_option("--out", ablate_out, "Override output directory");
  ablate->add_flag("--preset", ablate_desk, "Desk preset");

  // write-default-configs
  auto* gen = app.add_subcommand("write-default-configs",
                                 "Write bundled task configs to a directory");
  std::string gen_out = "configs";
  gen->add_option("--out", gen_out, "Target directory");

  CLI11_PARSE(app, argc, argv);

  if (train->parsed()) {
    harness::ExperimentConfig config = harness::load_config(train_config);
    if (train_desk) harness::apply_desk_preset(config);
    if (!train_guidance.empty()) {
      config.guide.mode = guidance::mode_from_string(train_guidance);
    }
    if (!train_out.empty()) config.output_dir = train_out;
    if (train_seed >= 0) {
      config.seeds = {static_cast<uint64_t>(train_seed)};
    }
    harness::run(config, std::cout);
    return 0;
  }

  if (agg->parsed()) {
    std::vector<fs::path> dirs(agg_runs.begin(), agg_runs.end());
    const auto curves = harness::aggregate_runs(dirs, agg_window, agg_grid);
    harness::write_curves_csv(curves, agg_out);
    std::cout << "wrote " << agg_out << " (" << curves.size()
              << " method curve(s))\n";
    return 0;
  }

  if (plot->parsed()) {
    const auto curves = harness::read_curves_csv(plot_curves);
    fs::create_directories(plot_out);
    const std::string stem = fs::path(plot_curves).stem().string();
    const fs::path out = fs::path(plot_out) / (stem + ".svg");
    harness::write_curves_svg(curves, out,
                              plot_title.empty() ? stem : plot_title);
    std::cout << "wrote " << out.string() << "\n";
    return 0;
  }

  if (ablate->parsed()) {
    harness::ExperimentConfig config = harness::load_config(ablate_config);
    if (ablate_desk) harness::apply_desk_preset(config);
    if (!ablate_out.empty()) config.output_dir = ablate_out;
    harness::ablation_grid(config, ablate_param, std::cout);
    return 0;
  }

  if (gen->parsed()) {
    fs::create_directories(gen_out);
    for (const std::string& task : harness::known_tasks()) {
      const harness::ExperimentConfig config = harness::default_config(task);
      harness::save_config(config, fs::path(gen_out) / (task + ".json"));
    }
    std::cout << "wrote " << harness::known_tasks().size() << " configs to "
              << gen_out << "\n";
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_app(argc, argv);
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const RuleParseError& e) {
    std::cerr << "rule error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
