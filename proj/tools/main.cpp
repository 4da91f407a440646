// landmark2vec command-line front end: simulate | train | infer | evaluate | plot | pipeline.

#include <algorithm>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli/commands.hpp"

namespace {

using namespace landmark2vec;
using namespace landmark2vec::cli;

struct CommonOptions {
  std::string config_path;
  std::string out_dir = ".";
  bool paper_scale = false;
  std::map<std::string, std::string> overrides;
};

std::string flag_name(const std::string& key) {
  std::string out = key;
  std::replace(out.begin(), out.end(), '_', '-');
  return "--" + out;
}

void add_common(CLI::App* cmd, CommonOptions& opts, bool run_config) {
  cmd->add_option("--config", opts.config_path, "Flat key = value recipe file");
  cmd->add_option("--out", opts.out_dir, "Output directory")->capture_default_str();
  if (!run_config) {
    cmd->add_option_function<std::string>("--seed", [&opts](const std::string& v) { opts.overrides["seed"] = v; },
                                          "Random seed");
    return;
  }
  for (const auto& key : RunConfig::keys()) {
    cmd->add_option_function<std::string>(
        flag_name(key), [&opts, key](const std::string& v) { opts.overrides[key] = v; },
        "Override '" + key + "' from the recipe");
  }
  cmd->add_flag("--paper-scale", opts.paper_scale, "Use the full N_m = 1e6 measurements");
}

RunConfig resolve(const CommonOptions& opts) {
  RunConfig config;
  if (!opts.config_path.empty()) load_config_file(opts.config_path, config);
  if (opts.paper_scale) config.set("measurements", "1000000");
  for (const auto& [key, value] : opts.overrides) {
    try {
      config.set(key, value);
    } catch (const Error& e) {
      throw Error(ErrorCode::kConfig, "command line " + flag_name(key) + ": " + e.message());
    }
  }
  return config;
}

int train_exit(const TrainOutputs& out) {
  const auto& log = out.result.log;
  std::cout << "trained " << log.epochs.size() << " epochs, stop_reason=" << to_string(log.stop_reason) << '\n';
  return log.stop_reason == StopReason::kNonFinite ? kExitNumerical : kExitOk;
}

void print_report(const EvaluationReport& report) {
  std::cout << "ssme=" << report.fit.ssme << " ssme_normalized=" << report.ssme_normalized;
  if (report.cyclic_order_score) std::cout << " cyclic_order_score=" << *report.cyclic_order_score;
  std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"landmark2vec: unsupervised landmark map reconstruction"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string input_a, input_b, agent_csv, baseline_csv;

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic layout and measurement CSV");
  add_common(simulate, opts, true);

  auto* train_cmd = app.add_subcommand("train", "Train the embedding network on a measurement CSV");
  train_cmd->add_option("input", input_a, "Measurement CSV")->required()->check(CLI::ExistingFile);
  add_common(train_cmd, opts, true);

  auto* infer = app.add_subcommand("infer", "Extract the landmark map from a model file");
  infer->add_option("model", input_a, "Model file")->required()->check(CLI::ExistingFile);
  add_common(infer, opts, false);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score an estimated map against the true layout");
  evaluate_cmd->add_option("layout", input_a, "True layout CSV")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("estimate", input_b, "Estimated map CSV")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--agent", agent_csv, "Position these measurements with the estimated map")
      ->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--baseline", baseline_csv, "Labelled measurements for the weighted-centroid baseline")
      ->check(CLI::ExistingFile);
  add_common(evaluate_cmd, opts, false);

  auto* plot = app.add_subcommand("plot", "Render one or two maps as SVG");
  plot->add_option("map", input_a, "Map CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("second", input_b, "Second map CSV, drawn alongside")->check(CLI::ExistingFile);
  add_common(plot, opts, false);

  auto* pipeline = app.add_subcommand("pipeline", "simulate -> train -> infer -> evaluate -> plot");
  add_common(pipeline, opts, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const RunConfig config = resolve(opts);
    const fs::path out_dir = opts.out_dir;

    if (simulate->parsed()) {
      const auto out = cmd_simulate(config, out_dir);
      std::cout << "wrote " << out.measurements.string() << ", " << out.layout.string() << '\n';
      return kExitOk;
    }
    if (train_cmd->parsed()) {
      return train_exit(cmd_train(input_a, config, out_dir));
    }
    if (infer->parsed()) {
      std::cout << "wrote " << cmd_infer(input_a, out_dir).string() << '\n';
      return kExitOk;
    }
    if (evaluate_cmd->parsed()) {
      EvaluateOptions options;
      if (!agent_csv.empty()) options.agent_measurements = agent_csv;
      if (!baseline_csv.empty()) options.baseline_measurements = baseline_csv;
      print_report(cmd_evaluate(input_a, input_b, out_dir, options).report);
      return kExitOk;
    }
    if (plot->parsed()) {
      std::vector<fs::path> maps{input_a};
      if (!input_b.empty()) maps.emplace_back(input_b);
      std::cout << "wrote " << cmd_plot(maps, out_dir).string() << '\n';
      return kExitOk;
    }
    if (pipeline->parsed()) {
      const auto out = cmd_pipeline(config, out_dir);
      print_report(out.evaluate.report);
      return train_exit(out.train);
    }
  } catch (const Error& e) {
    std::cerr << "landmark2vec: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "landmark2vec: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}
