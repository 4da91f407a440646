#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli/commands.hpp"
#include "cli/svg.hpp"
#include "doctest.h"
#include "landmark2vec/io.hpp"
#include "landmark2vec/simgen.hpp"

using namespace landmark2vec;
using namespace landmark2vec::cli;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("landmark2vec_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;
}

RunConfig small_config() {
  RunConfig c;
  parse_config(
      "layout = circle\nlandmarks = 12\nradius = 5\nmeasurements = 6000\ncontext_size = 6\n"
      "learning_rate = 0.2\nbatch_size = 64\nmax_epochs = 60\ntau = 0.05\nseed = 2\n",
      "small", c);
  return c;
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(LANDMARK2VEC_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
  RunConfig c;
  parse_config("# comment\n\nlayout = grid   # trailing\nlandmarks=12\ntx_power = 20, 21, 22\n", "recipe", c);
  CHECK(c.layout.kind == LayoutKind::kGrid);
  CHECK(c.layout.landmark_count == 12);
  CHECK(c.tx_power == std::vector<double>{20, 21, 22});
  CHECK(c.assigned.contains("landmarks"));
  CHECK_FALSE(c.assigned.contains("tau"));

  auto message = [](const std::string& text) {
    RunConfig cfg;
    try {
      parse_config(text, "recipe.cfg", cfg);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kConfig);
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("tau = 0.1\nlerning_rate = 0.1\n").find("recipe.cfg:2: unknown key 'lerning_rate'") !=
        std::string::npos);
  CHECK(message("tau = 0.1\ntau = 0.2\n").find("recipe.cfg:2: duplicate key") != std::string::npos);
  CHECK(message("batch_size = -3\n").find("recipe.cfg:1: batch_size") != std::string::npos);
  CHECK(message("model = radar\n").find("model") != std::string::npos);
  CHECK(message("just words\n").find("recipe.cfg:1: expected") != std::string::npos);
  CHECK(message("dim = 4\n").find("dim") != std::string::npos);

  RunConfig big_n;
  big_n.set("landmarks", "5");
  big_n.set("context_size", "6");
  CHECK(code_of([&] { big_n.validate(); }) == ErrorCode::kConfig);
  RunConfig bad_tau;
  bad_tau.set("tau", "1.5");
  CHECK(code_of([&] { bad_tau.validate(); }) == ErrorCode::kConfig);
  CHECK_NOTHROW(RunConfig{}.validate());
}

TEST_CASE("noise default follows the signal model") {
  RunConfig c;
  CHECK(c.entries().at("noise_std") == "2");
  c.set("model", "inverse_linear");
  CHECK(c.entries().at("noise_std") == "0.01");
  c.set("noise_std", "0.5");
  CHECK(c.inverse_linear_params().noise_std == 0.5);
}

TEST_CASE("recipes shipped with the repo parse and validate") {
  for (const char* name : {"experiment1.cfg", "experiment2_pathloss.cfg", "experiment2_inverse_linear.cfg"}) {
    RunConfig c;
    load_config_file(fs::path(LANDMARK2VEC_RECIPES) / name, c);
    CHECK_NOTHROW(c.validate());
    CHECK(c.layout.landmark_count == 30);
    CHECK(c.measurements == 100000);
  }
  RunConfig e2;
  load_config_file(fs::path(LANDMARK2VEC_RECIPES) / "experiment2_pathloss.cfg", e2);
  CHECK(e2.train.tau == 0.025);
  CHECK(e2.train_fraction == 0.2);
}

TEST_CASE("simulate") {
  const auto dir = scratch("simulate");
  RunConfig c;
  parse_config("landmarks = 2\nmeasurements = 3\ncontext_size = 2\n", "tiny", c);
  const auto out = cmd_simulate(c, dir);
  const std::string csv = slurp(out.measurements);
  CHECK(csv.substr(0, csv.find('\n')) == "m_0,m_1,x,y");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(io::load_map(out.layout).size() == 2);
  const auto manifest = nlohmann::json::parse(slurp(out.manifest));
  CHECK(manifest["config"]["measurements"] == "3");
  CHECK(manifest["seeds"]["measurements"] == 2);

  const auto again = cmd_simulate(c, scratch("simulate_again"));
  CHECK(slurp(again.measurements) == csv);
  CHECK(slurp(again.layout) == slurp(out.layout));
  CHECK(slurp(again.manifest) == slurp(out.manifest));
}

TEST_CASE("train, infer, evaluate, plot") {
  const auto dir = scratch("pipeline");
  auto config = small_config();
  const auto sim = cmd_simulate(config, dir);

  SUBCASE("one epoch") {
    config.set("max_epochs", "1");
    const auto t = cmd_train(sim.measurements, config, dir / "one");
    CHECK(t.result.log.epochs.size() == 1);
    const std::string log = slurp(t.log);
    CHECK(std::count(log.begin(), log.end(), '\n') == 2);
    CHECK(log.find("{\"stop_reason\":\"max_epochs\"}") != std::string::npos);
  }
  SUBCASE("tau recorded in the manifest") {
    config.set("tau", "0.025");
    const auto t = cmd_train(sim.measurements, config, dir / "tau");
    const auto manifest = nlohmann::json::parse(slurp(t.manifest));
    CHECK(manifest["config"]["tau"] == "0.025");
    CHECK(manifest["pairs"]["total"] == 6000);
  }
  SUBCASE("landmark count must agree with the CSV") {
    config.set("landmarks", "9");
    CHECK(code_of([&] { cmd_train(sim.measurements, config, dir / "bad"); }) == ErrorCode::kConfig);
  }
  SUBCASE("full chain") {
    const auto t = cmd_train(sim.measurements, config, dir);
    const auto map_csv = cmd_infer(t.model, dir);
    const auto map = io::load_map(map_csv);
    CHECK(map.coords() == t.result.model.w_in);

    const auto eval = cmd_evaluate(sim.layout, map_csv, dir / "eval");
    const auto report = nlohmann::json::parse(slurp(eval.report_file));
    for (const char* key : {"ssme", "ssme_per_landmark", "ssme_normalized", "cyclic_order_score", "A", "b"}) {
      CHECK(report.contains(key));
    }
    CHECK(report["A"].size() == 2);
    CHECK(report["A"][0].size() == 2);
    CHECK(report["b"].size() == 2);
    CHECK(report["ssme_normalized"].get<double>() < 0.2);
  }
}

TEST_CASE("infer passes weights through") {
  const auto dir = scratch("infer");
  auto model = init_model(5, 3, 1);
  model.w_in.row(2) << 1.5, -2.0, 0.25;
  io::save_model(dir / "model.csv", model);
  const auto map = io::load_map(cmd_infer(dir / "model.csv", dir));
  CHECK(map.dim() == 3);
  CHECK(map.coords() == model.w_in);
  CHECK(slurp(dir / "map.csv").find("\n2,1.5,-2,0.25\n") != std::string::npos);

  write(dir / "corrupt.csv", "# landmark2vec model L=5 d=3\n1,2\n");
  CHECK(code_of([&] { cmd_infer(dir / "corrupt.csv", dir); }) == ErrorCode::kParse);
}

TEST_CASE("evaluate") {
  const auto dir = scratch("evaluate");
  Layout layout;
  layout.landmark_count = 12;
  const auto truth = make_layout(layout);
  io::save_map(dir / "true.csv", truth);

  SUBCASE("identical files") {
    const auto r = cmd_evaluate(dir / "true.csv", dir / "true.csv", dir);
    CHECK(r.report.fit.ssme <= 1e-12);
    CHECK(*r.report.cyclic_order_score == 1.0);
  }
  SUBCASE("affinely transformed estimate, rows shuffled") {
    Eigen::Matrix2d A;
    A << 0.3, -1.2, 2.0, 0.7;
    Eigen::MatrixXd est = (truth.coords() * A.transpose()).rowwise() + Eigen::RowVector2d(4, -9);
    std::vector<int> ids(12);
    Eigen::MatrixXd shuffled(12, 2);
    for (int l = 0; l < 12; ++l) {
      const int src = (l * 5) % 12;
      ids[static_cast<std::size_t>(l)] = src;
      shuffled.row(l) = est.row(src);
    }
    io::save_map(dir / "est.csv", LandmarkMap(shuffled, ids));
    const auto r = cmd_evaluate(dir / "true.csv", dir / "est.csv", dir);
    CHECK(r.report.fit.ssme < 1e-9);
  }
  SUBCASE("id mismatch") {
    io::save_map(dir / "other.csv", LandmarkMap(truth.coords(), {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 99}));
    CHECK(code_of([&] { cmd_evaluate(dir / "true.csv", dir / "other.csv", dir); }) ==
          ErrorCode::kDimensionMismatch);
  }
  SUBCASE("degenerate estimate") {
    Eigen::MatrixXd line(12, 2);
    for (int l = 0; l < 12; ++l) line.row(l) << l, 2 * l;
    io::save_map(dir / "line.csv", LandmarkMap(line));
    CHECK(code_of([&] { cmd_evaluate(dir / "true.csv", dir / "line.csv", dir); }) ==
          ErrorCode::kDegenerateConfiguration);
  }
  SUBCASE("agent positions and weighted-centroid baseline") {
    PathlossParams p;
    p.noise_std_db = 0.0;
    io::save_measurements(dir / "m.csv", gen_pathloss(truth, 400, enclosing_region(truth), p, 2));
    EvaluateOptions opts;
    opts.agent_measurements = dir / "m.csv";
    opts.baseline_measurements = dir / "m.csv";
    const auto r = cmd_evaluate(dir / "true.csv", dir / "true.csv", dir, opts);
    const auto report = nlohmann::json::parse(slurp(r.report_file));
    CHECK(report["wcl_baseline"]["cyclic_order_score"] == 1.0);
    const std::string agents = slurp(dir / "agent_positions.csv");
    CHECK(agents.rfind("measurement_index,x,y\n", 0) == 0);
    CHECK(std::count(agents.begin(), agents.end(), '\n') == 401);
  }
}

TEST_CASE("plot") {
  const auto dir = scratch("plot");
  Layout layout;
  io::save_map(dir / "layout.csv", make_layout(layout));
  const auto svg = slurp(cmd_plot({dir / "layout.csv"}, dir));
  std::ptrdiff_t circles = 0, labels = 0;
  for (std::size_t pos = 0; (pos = svg.find("<circle", pos)) != std::string::npos; ++pos) ++circles;
  for (std::size_t pos = 0; (pos = svg.find("class=\"label\"", pos)) != std::string::npos; ++pos) ++labels;
  CHECK(circles == 30);
  CHECK(labels == 30);
  CHECK(svg.find(">29</text>") != std::string::npos);

  CHECK(slurp(cmd_plot({dir / "layout.csv"}, dir)) == svg);

  const auto two = slurp(cmd_plot({dir / "layout.csv", dir / "layout.csv"}, dir));
  std::ptrdiff_t panels = 0;
  for (std::size_t pos = 0; (pos = two.find("class=\"panel\"", pos)) != std::string::npos; ++pos) ++panels;
  CHECK(panels == 2);

  CHECK(render_svg({{"a<b", LandmarkMap(Eigen::MatrixXd::Zero(2, 2))}}).find("a&lt;b") != std::string::npos);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("exit");
  CHECK(run_binary("--help") == kExitOk);
  CHECK(run_binary("") == kExitConfig);
  CHECK(run_binary("frobnicate") == kExitConfig);

  write(dir / "typo.cfg", "landmarks = 6\ncontxt_size = 3\n");
  CHECK(run_binary("simulate --config " + (dir / "typo.cfg").string() + " --out " + dir.string()) == kExitConfig);
  CHECK(run_binary("simulate --landmarks 6 --context-size 7 --out " + dir.string()) == kExitConfig);

  write(dir / "tiny.cfg", "landmarks = 6\nmeasurements = 500\ncontext_size = 3\nmax_epochs = 3\n");
  const std::string cfg = " --config " + (dir / "tiny.cfg").string();
  CHECK(run_binary("simulate" + cfg + " --out " + dir.string()) == kExitOk);
  CHECK(fs::exists(dir / "measurements.csv"));
  CHECK(run_binary("train " + (dir / "measurements.csv").string() + cfg + " --out " + dir.string()) == kExitOk);
  CHECK(run_binary("train " + (dir / "measurements.csv").string() + cfg + " --learning-rate 1e300 --out " +
                   (dir / "nan").string()) == kExitNumerical);
  CHECK(fs::exists(dir / "nan" / "model.csv"));

  write(dir / "broken.csv", "m_0,m_1\n1,2\n1,2,3\n");
  CHECK(run_binary("train " + (dir / "broken.csv").string() + " --context-size 2 --out " + dir.string()) == kExitData);

  write(dir / "corrupt_model.csv", "# landmark2vec model L=3 d=2\n1,2\n");
  CHECK(run_binary("infer " + (dir / "corrupt_model.csv").string() + " --out " + dir.string()) == kExitData);

  Eigen::MatrixXd line(4, 2);
  line << 0, 0, 1, 1, 2, 2, 3, 3;
  io::save_map(dir / "line.csv", LandmarkMap(line));
  io::save_map(dir / "square.csv", LandmarkMap((Eigen::MatrixXd(4, 2) << 0, 0, 1, 0, 0, 1, 1, 1).finished()));
  CHECK(run_binary("evaluate " + (dir / "square.csv").string() + " " + (dir / "line.csv").string() + " --out " +
                   dir.string()) == kExitNumerical);
  CHECK(run_binary("plot " + (dir / "square.csv").string() + " --out " + dir.string()) == kExitOk);
  CHECK(fs::exists(dir / "plot.svg"));
}
