#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "cli/config.hpp"
#include "landmark2vec/embedder.hpp"
#include "landmark2vec/evaluation.hpp"

namespace landmark2vec::cli {

namespace fs = std::filesystem;

/// Process exit codes: 0 success, 2 config, 3 data, 4 numerical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;

int exit_code_for(ErrorCode code) noexcept;

struct SimulateOutputs {
  fs::path measurements;
  fs::path layout;
  fs::path manifest;
};

/// Writes measurements.csv, layout.csv and simulate_manifest.json to out_dir.
SimulateOutputs cmd_simulate(const RunConfig& config, const fs::path& out_dir);

struct TrainOutputs {
  fs::path model;
  fs::path log;
  fs::path manifest;
  TrainResult result;
  std::size_t pairs = 0;
  std::size_t skipped = 0;
};

/// Writes model.csv, train_log.jsonl and train_manifest.json. The landmark
/// count comes from the CSV header; an explicit `landmarks` key must agree.
TrainOutputs cmd_train(const fs::path& measurements_csv, RunConfig config, const fs::path& out_dir);

/// Writes map.csv (landmark_id,x,y[,z]) from the model's input weights.
fs::path cmd_infer(const fs::path& model_file, const fs::path& out_dir);

struct EvaluateOptions {
  // Measurements to position with the estimated map (writes agent_positions.csv).
  std::optional<fs::path> agent_measurements;
  // Labelled measurements for the weighted-centroid baseline report entry.
  std::optional<fs::path> baseline_measurements;
};

struct EvaluateOutputs {
  fs::path report_file;
  EvaluationReport report;
};

/// Aligns est onto the true layout by landmark id and writes report.json.
EvaluateOutputs cmd_evaluate(const fs::path& true_csv, const fs::path& est_csv, const fs::path& out_dir,
                             const EvaluateOptions& options = {});

/// Writes plot.svg with one panel per map.
fs::path cmd_plot(const std::vector<fs::path>& map_csvs, const fs::path& out_dir);

struct PipelineOutputs {
  SimulateOutputs simulate;
  TrainOutputs train;
  fs::path map;
  EvaluateOutputs evaluate;
  fs::path plot;
};

/// simulate -> train -> infer -> evaluate -> plot into one directory.
PipelineOutputs cmd_pipeline(const RunConfig& config, const fs::path& out_dir);

}  // namespace landmark2vec::cli
