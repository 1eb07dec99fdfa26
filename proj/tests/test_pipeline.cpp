#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <doctest.h>

#include "wavecast/ablation.hpp"
#include "wavecast/data.hpp"
#include "wavecast/eval.hpp"
#include "wavecast/pipeline.hpp"
#include "wavecast/runconfig.hpp"
#include "wavecast/synth.hpp"

using namespace wavecast;

namespace {

struct TempDir {
  std::filesystem::path path;

  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("wavecast_pipe_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }

  std::string file(const std::string& name) const {
    return (path / name).string();
  }

  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Small enough to train in well under a second.
cfg::RunConfig tiny_config() {
  cfg::RunConfig c;
  c.model.window_len = 16;
  c.model.num_blocks = 2;
  c.model.hidden_channels = 4;
  c.model.embed_dim = 3;
  c.train.epochs = 2;
  c.train.batch_size = 8;
  c.train.threads = 2;
  c.synth.length = 420;
  return c;
}

pipeline::TrainArtifacts artifacts_in(const TempDir& dir,
                                      const std::string& prefix = "") {
  return {dir.file(prefix + "model.ckpt"), dir.file(prefix + "curves.csv"),
          dir.file(prefix + "report.json"),
          dir.file(prefix + "predictions.csv")};
}

}  // namespace

TEST_CASE("run config round-trips through json with defaults intact") {
  const cfg::RunConfig def;
  const nlohmann::json j = cfg::to_json(def);
  const cfg::RunConfig back = cfg::from_json(j);
  CHECK(cfg::to_json(back) == j);

  // A partial config keeps every unmentioned default.
  const cfg::RunConfig partial =
      cfg::from_json(nlohmann::json::parse(R"({"train":{"epochs":7}})"));
  CHECK(partial.train.epochs == 7);
  CHECK(partial.train.batch_size == def.train.batch_size);
  CHECK(partial.model.window_len == def.model.window_len);
  CHECK(partial.synth.length == def.synth.length);

  const cfg::RunConfig empty = cfg::from_json(nlohmann::json::object());
  CHECK(cfg::to_json(empty) == j);
}

TEST_CASE("unknown or mistyped config keys are rejected by name") {
  CHECK_THROWS_WITH_AS(
      cfg::from_json(nlohmann::json::parse(R"({"trian":{}})")),
      doctest::Contains("trian"), cfg::BadConfig);
  CHECK_THROWS_WITH_AS(
      cfg::from_json(nlohmann::json::parse(R"({"train":{"epocs":3}})")),
      doctest::Contains("train.epocs"), cfg::BadConfig);
  CHECK_THROWS_WITH_AS(
      cfg::from_json(nlohmann::json::parse(R"({"train":{"epochs":"many"}})")),
      doctest::Contains("train.epochs"), cfg::BadConfig);
  CHECK_THROWS_AS(cfg::from_json(nlohmann::json::parse(R"({"train":3})")),
                  cfg::BadConfig);
  CHECK_THROWS_AS(cfg::from_json(nlohmann::json::parse("[1,2]")),
                  cfg::BadConfig);
}

TEST_CASE("config hash ignores key order and paths but not values") {
  const cfg::RunConfig a = cfg::from_json(
      nlohmann::json::parse(R"({"train":{"epochs":5,"seed":9}})"));
  const cfg::RunConfig b = cfg::from_json(
      nlohmann::json::parse(R"({"train":{"seed":9,"epochs":5}})"));
  CHECK(cfg::config_hash(a) == cfg::config_hash(b));
  CHECK(cfg::config_hash(a).size() == 16);

  cfg::RunConfig c = a;
  c.paths.checkpoint = "elsewhere.ckpt";
  CHECK(cfg::config_hash(c) == cfg::config_hash(a));

  cfg::RunConfig d = a;
  d.train.seed = 10;
  CHECK(cfg::config_hash(d) != cfg::config_hash(a));
}

TEST_CASE("config sections map onto the module configs") {
  cfg::RunConfig c;
  c.model.hidden_channels = 12;
  c.model.topk = 5;
  c.train.optimizer = "sgd";
  c.train.regime = "joint";
  c.synth.storm_rate = 7.5;

  const gtnet::GtNetConfig n = cfg::net_config(c, 3);
  CHECK(n.num_nodes == 3);
  CHECK(n.hidden_channels == 12);
  CHECK(n.topk == 2);  // clamped to num_nodes - 1

  const wgnn::TrainConfig t = cfg::train_config(c);
  CHECK(t.optimizer == wgnn::Optimizer::sgd);
  CHECK(t.regime == wgnn::Regime::joint);

  const synth::SynthConfig s = cfg::synth_config(c);
  CHECK(s.storm_rate == 7.5);

  c.train.optimizer = "nadam";
  CHECK_THROWS_AS(cfg::train_config(c), Error);
  c.wavelet.mode = "reflective";
  CHECK_THROWS_AS(cfg::wavelet_mode(c), Error);
}

TEST_CASE("config files load with overrides and reject junk") {
  TempDir dir;
  {
    std::ofstream out(dir.file("run.json"));
    out << R"({"train": {"epochs": 4}, "synth": {"length": 100}})";
  }
  const cfg::RunConfig c = cfg::load_runconfig(dir.file("run.json"));
  CHECK(c.train.epochs == 4);
  CHECK(c.synth.length == 100);

  {
    std::ofstream out(dir.file("bad.json"));
    out << R"({"synht": {}})";
  }
  CHECK_THROWS_AS(cfg::load_runconfig(dir.file("bad.json")), cfg::BadConfig);
  {
    std::ofstream out(dir.file("notjson.json"));
    out << "epochs: 4";
  }
  CHECK_THROWS_AS(cfg::load_runconfig(dir.file("notjson.json")),
                  cfg::BadConfig);
  CHECK_THROWS_AS(cfg::load_runconfig(dir.file("absent.json")),
                  cfg::BadConfig);
}

TEST_CASE("synth command writes a deterministic canonical CSV") {
  TempDir dir;
  cfg::RunConfig c = tiny_config();
  c.synth.length = 200;
  std::ostringstream diag;

  pipeline::cmd_synth(c, dir.file("a.csv"), diag);
  pipeline::cmd_synth(c, dir.file("b.csv"), diag);
  CHECK(slurp(dir.file("a.csv")) == slurp(dir.file("b.csv")));
  CHECK(diag.str().find("200 records") != std::string::npos);

  const data::Series series = data::load_csv(dir.file("a.csv"));
  CHECK(series.records.size() == 200);
  CHECK(slurp(dir.file("a.csv")).find("config_hash=") != std::string::npos);

  c.synth.length = 0;
  CHECK_THROWS_AS(pipeline::cmd_synth(c, dir.file("zero.csv"), diag),
                  pipeline::PipelineError);
  CHECK(!std::filesystem::exists(dir.file("zero.csv")));
}

TEST_CASE("decompose command emits additive band columns") {
  TempDir dir;
  cfg::RunConfig c = tiny_config();
  c.synth.length = 256;
  std::ostringstream diag;
  pipeline::cmd_synth(c, dir.file("data.csv"), diag);
  pipeline::cmd_decompose(c, dir.file("data.csv"), "swh", dir.file("bands.csv"),
                          diag);
  CHECK(diag.str().find("max reconstruction error") != std::string::npos);

  std::ifstream in(dir.file("bands.csv"));
  std::string line;
  std::vector<std::vector<double>> rows;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      CHECK(line == "original,rA1,rA2,rA3,rD1,rD2,rD3");
      saw_header = true;
      continue;
    }
    std::vector<double> row;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) row.push_back(std::stod(field));
    REQUIRE(row.size() == 7);
    rows.push_back(std::move(row));
  }
  REQUIRE(rows.size() == 256);
  const data::Series series = data::load_csv(dir.file("data.csv"));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i][0] == series.records[i].swh);
    // rA3 + rD1 + rD2 + rD3 reconstructs the original.
    const double sum = rows[i][3] + rows[i][4] + rows[i][5] + rows[i][6];
    CHECK(std::abs(sum - rows[i][0]) <= 1e-10);
  }

  CHECK_THROWS_AS(pipeline::cmd_decompose(c, dir.file("data.csv"), "height",
                                          dir.file("x.csv"), diag),
                  pipeline::MissingColumn);
}

TEST_CASE("decomposing a constant column leaves no detail energy") {
  TempDir dir;
  std::vector<data::BuoyRecord> records;
  for (int i = 0; i < 128; ++i) {
    data::BuoyRecord r;
    r.timestamp = 1704067200 + i * 3600;
    r.avg_wind = 5.0 + 0.1 * i;
    r.max_wind = r.avg_wind * 1.2;
    r.wind_dir = 180.0;
    r.swh = 1.5;
    records.push_back(r);
  }
  data::write_csv(dir.file("flat.csv"), records);

  cfg::RunConfig c;
  c.wavelet.order = 2;
  std::ostringstream diag;
  pipeline::cmd_decompose(c, dir.file("flat.csv"), "swh", dir.file("out.csv"),
                          diag);

  std::ifstream in(dir.file("out.csv"));
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      saw_header = true;
      continue;
    }
    std::vector<double> row;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) row.push_back(std::stod(field));
    for (std::size_t k = 4; k < 7; ++k) CHECK(std::abs(row[k]) <= 1e-12);
  }
}

TEST_CASE("train command produces a full artifact set") {
  TempDir dir;
  const cfg::RunConfig c = tiny_config();
  std::ostringstream diag;
  pipeline::cmd_synth(c, dir.file("data.csv"), diag);

  const pipeline::TrainArtifacts art = artifacts_in(dir);
  pipeline::cmd_train(c, dir.file("data.csv"), art, diag);

  const wgnn::LoadedModel loaded = wgnn::load_model(art.checkpoint);
  CHECK(loaded.meta.at("config_hash").get<std::string>() ==
        cfg::config_hash(c));
  CHECK(loaded.model.net_config.window_len == 16);
  CHECK(loaded.model.input_names ==
        std::vector<std::string>{"avg_wind", "max_wind", "wind_dir"});

  const nlohmann::json report =
      nlohmann::json::parse(slurp(art.report));
  CHECK(report.at("config_hash") == cfg::config_hash(c));
  CHECK(report.at("regime") == "per_band");
  REQUIRE(report.at("reports").size() == 9);  // 3 models x 3 splits
  for (const auto& r : report.at("reports")) {
    const eval::MetricReport parsed = eval::report_from_json(r.dump());
    CHECK(parsed.config_hash == cfg::config_hash(c));
    CHECK(parsed.units == "normalized");
    CHECK(parsed.n >= 2);
  }

  const std::string curves = slurp(art.curves);
  CHECK(curves.find("phase,epoch,train_loss,val_loss") != std::string::npos);
  for (const char* band : {"rD1", "rD2", "rD3", "rA3"}) {
    CHECK(curves.find(band) != std::string::npos);
  }

  const eval::PredictionPairs pairs =
      eval::read_prediction_csv(art.predictions);
  CHECK(pairs.truth.size() == pairs.pred.size());
  CHECK(pairs.truth.size() > 50);
}

TEST_CASE("training on a corrupt CSV fails at the load stage with no artifacts") {
  TempDir dir;
  {
    std::ofstream out(dir.file("bad.csv"));
    out << "timestamp,avg_wind,max_wind,wind_dir,swh\n";
    out << "2024-01-01T00:00:00,1.0,2.0,10.0,oops\n";
  }
  const cfg::RunConfig c = tiny_config();
  std::ostringstream diag;
  const pipeline::TrainArtifacts art = artifacts_in(dir);
  CHECK_THROWS_WITH_AS(pipeline::cmd_train(c, dir.file("bad.csv"), art, diag),
                       doctest::Contains("[load]"), pipeline::PipelineError);
  CHECK(!std::filesystem::exists(art.checkpoint));
  CHECK(!std::filesystem::exists(art.curves));
  CHECK(!std::filesystem::exists(art.report));
  CHECK(!std::filesystem::exists(art.predictions));
}

TEST_CASE("two identical training runs write identical bytes") {
  TempDir dir;
  const cfg::RunConfig c = tiny_config();
  std::ostringstream diag;
  pipeline::cmd_synth(c, dir.file("data.csv"), diag);

  const pipeline::TrainArtifacts a = artifacts_in(dir, "a_");
  const pipeline::TrainArtifacts b = artifacts_in(dir, "b_");
  pipeline::cmd_train(c, dir.file("data.csv"), a, diag);
  pipeline::cmd_train(c, dir.file("data.csv"), b, diag);

  CHECK(slurp(a.checkpoint) == slurp(b.checkpoint));
  CHECK(slurp(a.curves) == slurp(b.curves));
  CHECK(slurp(a.report) == slurp(b.report));
  CHECK(slurp(a.predictions) == slurp(b.predictions));
}

TEST_CASE("regime and thread count flow through without changing results") {
  TempDir dir;
  cfg::RunConfig c = tiny_config();
  std::ostringstream diag;
  pipeline::cmd_synth(c, dir.file("data.csv"), diag);

  const pipeline::TrainArtifacts serial = artifacts_in(dir, "serial_");
  const pipeline::TrainArtifacts parallel = artifacts_in(dir, "par_");
  c.train.threads = 1;
  pipeline::cmd_train(c, dir.file("data.csv"), serial, diag);
  c.train.threads = 4;
  pipeline::cmd_train(c, dir.file("data.csv"), parallel, diag);
  CHECK(slurp(serial.checkpoint) == slurp(parallel.checkpoint));
  CHECK(slurp(serial.curves) == slurp(parallel.curves));

  c.train.regime = "joint";
  const pipeline::TrainArtifacts joint = artifacts_in(dir, "joint_");
  pipeline::cmd_train(c, dir.file("data.csv"), joint, diag);
  const nlohmann::json report = nlohmann::json::parse(slurp(joint.report));
  CHECK(report.at("regime") == "joint");
  CHECK(slurp(joint.curves).find("joint,") != std::string::npos);
}

TEST_CASE("predict reproduces a stored evaluation prediction bitwise") {
  TempDir dir;
  const cfg::RunConfig c = tiny_config();
  std::ostringstream diag;
  pipeline::cmd_synth(c, dir.file("data.csv"), diag);
  const pipeline::TrainArtifacts art = artifacts_in(dir);
  pipeline::cmd_train(c, dir.file("data.csv"), art, diag);

  // Rebuild the first test window's raw records and forecast from them.
  const data::Series series = data::load_csv(dir.file("data.csv"));
  const data::DatasetSplits splits = data::split_622(series.records.size());
  const std::size_t wb = splits.val_end;  // first test window start
  const std::vector<data::BuoyRecord> window_records(
      series.records.begin() + wb,
      series.records.begin() + wb + c.model.window_len);
  data::write_csv(dir.file("window.csv"), window_records);

  std::ostringstream pdiag;
  pipeline::cmd_predict(c, art.checkpoint, dir.file("window.csv"),
                        dir.file("forecast.csv"), pdiag);

  const eval::PredictionPairs stored =
      eval::read_prediction_csv(art.predictions);
  const std::string forecast = slurp(dir.file("forecast.csv"));
  std::istringstream lines(forecast);
  std::string line;
  double value = -1;
  while (std::getline(lines, line)) {
    if (line.rfind("1,", 0) == 0) value = std::stod(line.substr(2));
  }
  CHECK(value == stored.pred.front());
  CHECK(forecast.find("units=meters") != std::string::npos);
}

TEST_CASE("predict rejects short windows and warns on outliers") {
  TempDir dir;
  const cfg::RunConfig c = tiny_config();
  std::ostringstream diag;
  pipeline::cmd_synth(c, dir.file("data.csv"), diag);
  const pipeline::TrainArtifacts art = artifacts_in(dir);
  pipeline::cmd_train(c, dir.file("data.csv"), art, diag);

  const data::Series series = data::load_csv(dir.file("data.csv"));
  const std::vector<data::BuoyRecord> shorty(series.records.begin(),
                                             series.records.begin() + 5);
  data::write_csv(dir.file("short.csv"), shorty);
  CHECK_THROWS_WITH_AS(
      pipeline::cmd_predict(c, art.checkpoint, dir.file("short.csv"),
                            dir.file("f.csv"), diag),
      doctest::Contains("[window]"), pipeline::PipelineError);

  std::vector<data::BuoyRecord> wild(series.records.begin(),
                                     series.records.begin() + 16);
  for (auto& r : wild) {
    r.avg_wind = 500.0;
    r.max_wind = 600.0;
  }
  data::write_csv(dir.file("wild.csv"), wild);
  std::ostringstream wdiag;
  pipeline::cmd_predict(c, art.checkpoint, dir.file("wild.csv"),
                        dir.file("wild_forecast.csv"), wdiag);
  CHECK(wdiag.str().find("warning:") != std::string::npos);
  CHECK(std::filesystem::exists(dir.file("wild_forecast.csv")));
}

TEST_CASE("evaluate matches the training run's reports exactly") {
  TempDir dir;
  const cfg::RunConfig c = tiny_config();
  std::ostringstream diag;
  pipeline::cmd_synth(c, dir.file("data.csv"), diag);
  const pipeline::TrainArtifacts art = artifacts_in(dir);
  pipeline::cmd_train(c, dir.file("data.csv"), art, diag);

  pipeline::cmd_evaluate(c, art.checkpoint, dir.file("data.csv"),
                         dir.file("re_report.json"), dir.file("re_pred.csv"),
                         diag);
  CHECK(slurp(dir.file("re_report.json")) == slurp(art.report));
  CHECK(slurp(dir.file("re_pred.csv")) == slurp(art.predictions));
}

TEST_CASE("gradient check passes clean and fails under an injected fault") {
  const cfg::RunConfig c;
  std::ostringstream out;
  CHECK(pipeline::cmd_gradcheck(c, false, out));
  CHECK(out.str().find("PASS") != std::string::npos);
  CHECK(out.str().find("band0.e1") != std::string::npos);
  CHECK(out.str().find("band3.head.b2") != std::string::npos);
  CHECK(out.str().find("max relative error") != std::string::npos);

  std::ostringstream fault_out;
  CHECK(!pipeline::cmd_gradcheck(c, true, fault_out));
  CHECK(fault_out.str().find("FAIL") != std::string::npos);
}

TEST_CASE("ablation command writes a reproducible comparison report") {
  TempDir dir;
  cfg::RunConfig c = tiny_config();
  c.ablation.records = 240;
  c.ablation.epochs = 1;
  c.ablation.fine_tune_epochs = 0;
  c.ablation.seeds = {11, 12, 13};
  std::ostringstream diag;

  pipeline::cmd_ablate(c, "", dir.file("ablation.json"), diag);
  pipeline::cmd_ablate(c, "", dir.file("ablation2.json"), diag);
  CHECK(slurp(dir.file("ablation.json")) == slurp(dir.file("ablation2.json")));

  const nlohmann::json j =
      nlohmann::json::parse(slurp(dir.file("ablation.json")));
  CHECK(j.at("config_hash") == cfg::config_hash(c));
  CHECK(j.at("degenerate_data") == false);
  CHECK(j.at("wgnn_parameter_count").get<std::size_t>() > 0);
  CHECK(j.at("gnn_parameter_count").get<std::size_t>() > 0);
  REQUIRE(j.at("seeds").size() == 3);
  for (const auto& s : j.at("seeds")) {
    CHECK(s.at("failed") == false);
    CHECK(s.at("wgnn").at("mse").get<double>() >= 0.0);
    CHECK(s.at("gnn").at("mse").get<double>() >= 0.0);
  }
  CHECK(j.at("wgnn_mse").size() == 3);
  CHECK(j.at("gnn_mse").size() == 3);

  // Thread count must not change the written report.
  c.train.threads = 4;
  pipeline::cmd_ablate(c, "", dir.file("ablation4.json"), diag);
  CHECK(slurp(dir.file("ablation4.json")) ==
        slurp(dir.file("ablation.json")));
}

TEST_CASE("ablation benchmark lag comes from the ablation section") {
  TempDir dir;
  cfg::RunConfig c = tiny_config();
  c.ablation.records = 240;
  c.ablation.epochs = 1;
  c.ablation.fine_tune_epochs = 0;
  c.ablation.seeds = {11, 12, 13};
  std::ostringstream diag;
  pipeline::cmd_ablate(c, "", dir.file("base.json"), diag);

  auto arrays = [&](const std::string& name) {
    const nlohmann::json j = nlohmann::json::parse(slurp(dir.file(name)));
    return std::pair{j.at("wgnn_mse"), j.at("gnn_mse")};
  };

  // The synth section's lag configures the data tool, not the benchmark.
  cfg::RunConfig shifted = c;
  shifted.synth.wind_lag = 5;
  pipeline::cmd_ablate(shifted, "", dir.file("shifted.json"), diag);
  CHECK(arrays("shifted.json") == arrays("base.json"));

  cfg::RunConfig lagged = c;
  lagged.ablation.wind_lag = 3;
  pipeline::cmd_ablate(lagged, "", dir.file("lagged.json"), diag);
  CHECK(arrays("lagged.json") != arrays("base.json"));
}

TEST_CASE("matched parameter budgets stay within a few percent") {
  cfg::RunConfig c;  // full-size default model
  const gtnet::GtNetConfig wgnn_net = cfg::net_config(c, 3);
  gtnet::GtNetConfig gnn_net = wgnn_net;
  gnn_net.hidden_channels *= 2;
  const std::size_t wgnn_params =
      4 * gtnet::GtNet(wgnn_net, 0).parameter_count();
  const std::size_t gnn_params = gtnet::GtNet(gnn_net, 0).parameter_count();
  const double ratio =
      static_cast<double>(wgnn_params) / static_cast<double>(gnn_params);
  CHECK(ratio > 0.9);
  CHECK(ratio < 1.1);
}

TEST_CASE("ablation on zero-variance data reports degenerate with reduction 0") {
  eval::AblationDataset ds;
  auto flat_sample = [] {
    data::Sample s;
    s.window.assign(2, std::vector<double>(16, 0.25));
    s.target = std::vector<double>{0.25};
    return s;
  };
  for (int i = 0; i < 6; ++i) ds.train.push_back(flat_sample());
  for (int i = 0; i < 2; ++i) ds.val.push_back(flat_sample());
  for (int i = 0; i < 2; ++i) ds.test.push_back(flat_sample());
  ds.input_names = {"a", "b"};
  ds.input_channels = {0, 1};
  ds.swh_channel = 1;
  ds.stats.names = {"a", "b", "swh"};
  ds.stats.mins = {0.0, 0.0, 0.0};
  ds.stats.maxs = {1.0, 1.0, 1.0};

  gtnet::GtNetConfig net;
  net.num_nodes = 2;
  net.window_len = 16;
  net.num_blocks = 2;
  net.hidden_channels = 4;
  net.embed_dim = 3;
  net.topk = 1;
  wgnn::TrainConfig tcfg;
  tcfg.epochs = 1;

  const eval::AblationReport report = eval::ablation_compare(
      ds, 4, dwt::ExtensionMode::symmetric, net, tcfg, {1, 2, 3}, 1);
  CHECK(report.degenerate_data);
  CHECK(report.median_reduction == 0.0);
  CHECK(report.seeds.empty());

  CHECK_THROWS_AS(eval::ablation_compare(ds, 4, dwt::ExtensionMode::symmetric,
                                         net, tcfg, {1, 2}, 1),
                  eval::TooFewSeeds);
}

TEST_CASE("ablation marks seeds whose training diverges") {
  TempDir dir;
  cfg::RunConfig c = tiny_config();
  c.ablation.records = 240;
  c.ablation.epochs = 1;
  c.ablation.fine_tune_epochs = 0;
  c.ablation.seeds = {21, 22, 23};
  c.train.optimizer = "sgd";
  // After one clipped step the parameters sit near 1e200, so the next
  // squared residual overflows no matter how saturating the activations are.
  c.train.learning_rate = 1e200;
  std::ostringstream diag;

  pipeline::cmd_ablate(c, "", dir.file("ablation.json"), diag);
  const nlohmann::json j =
      nlohmann::json::parse(slurp(dir.file("ablation.json")));
  REQUIRE(j.at("seeds").size() == 3);
  for (const auto& s : j.at("seeds")) {
    CHECK(s.at("failed") == true);
    CHECK(s.at("error").get<std::string>().find("diverged") !=
          std::string::npos);
  }
  CHECK(j.at("median_reduction") == 0.0);
}
