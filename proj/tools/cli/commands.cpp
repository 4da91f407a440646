#include "cli/commands.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "cli/svg.hpp"
#include "landmark2vec/io.hpp"
#include "landmark2vec/simgen.hpp"

namespace landmark2vec::cli {

namespace {

using json = nlohmann::ordered_json;

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::kIo, "cannot create output directory '" + dir.string() + "'");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write to '" + path.string() + "' failed");
}

json config_json(const RunConfig& config) {
  json out = json::object();
  for (const auto& [key, value] : config.entries()) out[key] = value;
  return out;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json report_json(const EvaluationReport& report) {
  json out;
  out["ssme"] = report.fit.ssme;
  out["ssme_per_landmark"] = report.ssme_per_landmark;
  out["ssme_normalized"] = report.ssme_normalized;
  out["cyclic_order_score"] = report.cyclic_order_score ? json(*report.cyclic_order_score) : json(nullptr);
  out["A"] = matrix_json(report.fit.A);
  out["b"] = json(std::vector<double>(report.fit.b.data(), report.fit.b.data() + report.fit.b.size()));
  return out;
}

// Reorders est rows so its ids follow true_map's order.
LandmarkMap align_ids(const LandmarkMap& true_map, const LandmarkMap& est_map) {
  if (true_map.size() != est_map.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "layout has " + std::to_string(true_map.size()) +
                                                   " landmarks, estimate has " + std::to_string(est_map.size()));
  }
  std::map<int, Eigen::Index> est_row;
  for (std::size_t l = 0; l < est_map.size(); ++l) {
    if (!est_row.emplace(est_map.ids()[l], static_cast<Eigen::Index>(l)).second) {
      throw Error(ErrorCode::kDimensionMismatch, "duplicate landmark id " + std::to_string(est_map.ids()[l]));
    }
  }
  Eigen::MatrixXd coords(est_map.coords().rows(), est_map.coords().cols());
  for (std::size_t l = 0; l < true_map.size(); ++l) {
    const auto it = est_row.find(true_map.ids()[l]);
    if (it == est_row.end()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "landmark id " + std::to_string(true_map.ids()[l]) + " missing from the estimate");
    }
    coords.row(static_cast<Eigen::Index>(l)) = est_map.coords().row(it->second);
  }
  return LandmarkMap(std::move(coords), true_map.ids());
}

}  // namespace

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kConfig:
    case ErrorCode::kInvalidN:
    case ErrorCode::kInvalidDimension:
    case ErrorCode::kInvalidArgument:
      return kExitConfig;
    case ErrorCode::kDegenerateConfiguration:
    case ErrorCode::kNonFiniteLoss:
    case ErrorCode::kTooFewEpochs:
      return kExitNumerical;
    default:
      return kExitData;
  }
}

SimulateOutputs cmd_simulate(const RunConfig& config, const fs::path& out_dir) {
  config.validate();
  ensure_dir(out_dir);

  Layout layout = config.layout;
  layout.seed = config.layout_seed();
  const LandmarkMap map = make_layout(layout);
  const Region region = enclosing_region(map);
  const MeasurementSet set =
      config.model == SignalModel::kPathloss
          ? gen_pathloss(map, config.measurements, region, config.pathloss_params(), config.measurement_seed())
          : gen_inverse_linear(map, config.measurements, region, config.inverse_linear_params(),
                               config.measurement_seed());

  SimulateOutputs out{out_dir / "measurements.csv", out_dir / "layout.csv", out_dir / "simulate_manifest.json"};
  io::save_measurements(out.measurements, set);
  io::save_map(out.layout, map);

  json manifest;
  manifest["command"] = "simulate";
  manifest["config"] = config_json(config);
  manifest["seeds"] = {{"layout", config.layout_seed()}, {"measurements", config.measurement_seed()}};
  manifest["region"] = {{"lo", std::vector<double>(region.lo.data(), region.lo.data() + region.lo.size())},
                        {"hi", std::vector<double>(region.hi.data(), region.hi.data() + region.hi.size())}};
  manifest["outputs"] = {{"measurements", out.measurements.filename().string()},
                         {"layout", out.layout.filename().string()}};
  write_text(out.manifest, manifest.dump(2) + "\n");
  return out;
}

TrainOutputs cmd_train(const fs::path& measurements_csv, RunConfig config, const fs::path& out_dir) {
  const MeasurementSet set = io::load_measurements(measurements_csv);
  if (config.assigned.contains("landmarks") && config.layout.landmark_count != set.landmark_count()) {
    throw Error(ErrorCode::kConfig, "landmarks: config says " + std::to_string(config.layout.landmark_count) +
                                        " but '" + measurements_csv.string() + "' has " +
                                        std::to_string(set.landmark_count()) + " columns");
  }
  config.layout.landmark_count = set.landmark_count();
  config.validate();
  ensure_dir(out_dir);

  const Dataset dataset = build_dataset(set, config.train.context_size);
  const Split parts = split(dataset.pairs, config.train_fraction, config.split_seed());
  TrainConfig train_config = config.train;
  train_config.seed = config.train_seed();

  TrainOutputs out;
  out.model = out_dir / "model.csv";
  out.log = out_dir / "train_log.jsonl";
  out.manifest = out_dir / "train_manifest.json";
  out.result = train(parts.train, parts.validation, train_config);
  out.pairs = dataset.pairs.size();
  out.skipped = dataset.skipped;

  io::save_model(out.model, out.result.model);
  io::save_train_log(out.log, out.result.log);

  json manifest;
  manifest["command"] = "train";
  manifest["input"] = measurements_csv.filename().string();
  manifest["config"] = config_json(config);
  manifest["seeds"] = {{"split", config.split_seed()}, {"train", config.train_seed()}};
  manifest["landmarks"] = set.landmark_count();
  manifest["measurements"] = set.size();
  manifest["pairs"] = {{"total", dataset.pairs.size()},
                       {"skipped", dataset.skipped},
                       {"train", parts.train.size()},
                       {"validation", parts.validation.size()}};
  manifest["epochs"] = out.result.log.epochs.size();
  manifest["stop_reason"] = std::string(to_string(out.result.log.stop_reason));
  manifest["outputs"] = {{"model", out.model.filename().string()}, {"log", out.log.filename().string()}};
  write_text(out.manifest, manifest.dump(2) + "\n");
  return out;
}

fs::path cmd_infer(const fs::path& model_file, const fs::path& out_dir) {
  const EmbeddingModel model = io::load_model(model_file);
  ensure_dir(out_dir);
  const fs::path out = out_dir / "map.csv";
  io::save_map(out, extract_map(model));
  return out;
}

EvaluateOutputs cmd_evaluate(const fs::path& true_csv, const fs::path& est_csv, const fs::path& out_dir,
                             const EvaluateOptions& options) {
  const LandmarkMap true_map = io::load_map(true_csv);
  const LandmarkMap est_map = align_ids(true_map, io::load_map(est_csv));
  ensure_dir(out_dir);

  EvaluateOutputs out{out_dir / "report.json", evaluate(true_map, est_map)};
  json report = report_json(out.report);

  if (options.baseline_measurements) {
    const MeasurementSet labelled = io::load_measurements(*options.baseline_measurements);
    if (labelled.landmark_count() != true_map.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "baseline measurements and layout differ in landmark count");
    }
    const LandmarkMap wcl(wcl_landmarks(labelled).coords(), true_map.ids());
    report["wcl_baseline"] = report_json(evaluate(true_map, wcl));
  }

  if (options.agent_measurements) {
    const MeasurementSet scans = io::load_measurements(*options.agent_measurements);
    const fs::path agents = out_dir / "agent_positions.csv";
    std::ofstream csv(agents, std::ios::binary);
    if (!csv) throw Error(ErrorCode::kIo, "cannot write '" + agents.string() + "'");
    csv << "measurement_index,x,y" << (est_map.dim() == 3 ? ",z" : "") << '\n';
    for (std::size_t i = 0; i < scans.size(); ++i) {
      const Eigen::VectorXd pos = wcl_agent(est_map, scans[i]);
      csv << i;
      for (Eigen::Index k = 0; k < pos.size(); ++k) csv << ',' << io::format_double(pos(k));
      csv << '\n';
    }
    report["agent_positions"] = agents.filename().string();
  }

  write_text(out.report_file, report.dump(2) + "\n");
  return out;
}

fs::path cmd_plot(const std::vector<fs::path>& map_csvs, const fs::path& out_dir) {
  if (map_csvs.empty()) throw Error(ErrorCode::kInvalidArgument, "plot needs at least one map");
  std::vector<PlotPanel> panels;
  for (const auto& path : map_csvs) panels.push_back({path.stem().string(), io::load_map(path)});
  ensure_dir(out_dir);
  const fs::path out = out_dir / "plot.svg";
  write_text(out, render_svg(panels));
  return out;
}

PipelineOutputs cmd_pipeline(const RunConfig& config, const fs::path& out_dir) {
  PipelineOutputs out;
  out.simulate = cmd_simulate(config, out_dir);
  out.train = cmd_train(out.simulate.measurements, config, out_dir);
  out.map = cmd_infer(out.train.model, out_dir);
  out.evaluate = cmd_evaluate(out.simulate.layout, out.map, out_dir);
  out.plot = cmd_plot({out.simulate.layout, out.map}, out_dir);
  return out;
}

}  // namespace landmark2vec::cli
