#include "wavecast/runconfig.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace wavecast::cfg {

namespace {

// Reads known keys out of one JSON object and rejects everything else.
class Section {
 public:
  Section(const nlohmann::json& j, std::string name)
      : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) {
      throw BadConfig("'" + name_ + "' must be a JSON object");
    }
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw BadConfig("'" + name_ + "." + key + "' has the wrong type");
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.contains(it.key())) {
        throw BadConfig("unknown key '" + name_ + "." + it.key() + "'");
      }
    }
  }

 private:
  const nlohmann::json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

const nlohmann::json kEmptyObject = nlohmann::json::object();

}  // namespace

nlohmann::json semantic_json(const RunConfig& c) {
  nlohmann::json j;
  j["wavelet"] = {{"order", c.wavelet.order}, {"mode", c.wavelet.mode}};
  j["model"] = {{"window_len", c.model.window_len},
                {"horizon", c.model.horizon},
                {"num_blocks", c.model.num_blocks},
                {"dilation", c.model.dilation},
                {"hidden_channels", c.model.hidden_channels},
                {"embed_dim", c.model.embed_dim},
                {"mixhop_depth", c.model.mixhop_depth},
                {"retain_ratio", c.model.retain_ratio},
                {"topk", c.model.topk},
                {"saturation", c.model.saturation},
                {"kernel_sizes", c.model.kernel_sizes},
                {"dir_encoding", c.model.dir_encoding},
                {"use_swh_input", c.model.use_swh_input}};
  // threads is an execution detail, not part of the experiment: the same
  // config must hash the same whether it runs on 1 worker or 8.
  j["train"] = {{"epochs", c.train.epochs},
                {"batch_size", c.train.batch_size},
                {"learning_rate", c.train.learning_rate},
                {"optimizer", c.train.optimizer},
                {"regime", c.train.regime},
                {"fine_tune_epochs", c.train.fine_tune_epochs},
                {"clip_norm", c.train.clip_norm},
                {"seed", c.train.seed}};
  j["synth"] = {{"length", c.synth.length},
                {"base_level", c.synth.base_level},
                {"seasonal_amp", c.synth.seasonal_amp},
                {"seasonal_period", c.synth.seasonal_period},
                {"tidal_amp", c.synth.tidal_amp},
                {"tidal_period", c.synth.tidal_period},
                {"storm_rate", c.synth.storm_rate},
                {"storm_amp", c.synth.storm_amp},
                {"storm_decay", c.synth.storm_decay},
                {"noise_std", c.synth.noise_std},
                {"wind_lag", c.synth.wind_lag},
                {"seed", c.synth.seed},
                {"start_time", c.synth.start_time}};
  j["eval"] = {{"ridge_lambda", c.eval.ridge_lambda}};
  j["ablation"] = {{"seeds", c.ablation.seeds},
                   {"records", c.ablation.records},
                   {"epochs", c.ablation.epochs},
                   {"fine_tune_epochs", c.ablation.fine_tune_epochs},
                   {"wind_lag", c.ablation.wind_lag}};
  return j;
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j = semantic_json(c);
  j["train"]["threads"] = c.train.threads;
  j["paths"] = {{"data", c.paths.data},
                {"checkpoint", c.paths.checkpoint},
                {"curves", c.paths.curves},
                {"report", c.paths.report},
                {"predictions", c.paths.predictions},
                {"bands", c.paths.bands},
                {"forecast", c.paths.forecast},
                {"ablation_report", c.paths.ablation_report},
                {"column", c.paths.column}};
  return j;
}

RunConfig from_json(const nlohmann::json& j) {
  RunConfig c;
  if (!j.is_object()) throw BadConfig("config root must be a JSON object");
  const std::set<std::string> sections = {"wavelet", "model",    "train",
                                          "synth",   "eval",     "ablation",
                                          "paths"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!sections.contains(it.key())) {
      throw BadConfig("unknown key '" + it.key() + "'");
    }
  }
  const auto section = [&](const char* name) -> const nlohmann::json& {
    return j.contains(name) ? j.at(name) : kEmptyObject;
  };

  {
    Section s(section("wavelet"), "wavelet");
    s.get("order", c.wavelet.order);
    s.get("mode", c.wavelet.mode);
    s.finish();
  }
  {
    Section s(section("model"), "model");
    s.get("window_len", c.model.window_len);
    s.get("horizon", c.model.horizon);
    s.get("num_blocks", c.model.num_blocks);
    s.get("dilation", c.model.dilation);
    s.get("hidden_channels", c.model.hidden_channels);
    s.get("embed_dim", c.model.embed_dim);
    s.get("mixhop_depth", c.model.mixhop_depth);
    s.get("retain_ratio", c.model.retain_ratio);
    s.get("topk", c.model.topk);
    s.get("saturation", c.model.saturation);
    s.get("kernel_sizes", c.model.kernel_sizes);
    s.get("dir_encoding", c.model.dir_encoding);
    s.get("use_swh_input", c.model.use_swh_input);
    s.finish();
  }
  {
    Section s(section("train"), "train");
    s.get("epochs", c.train.epochs);
    s.get("batch_size", c.train.batch_size);
    s.get("learning_rate", c.train.learning_rate);
    s.get("optimizer", c.train.optimizer);
    s.get("regime", c.train.regime);
    s.get("fine_tune_epochs", c.train.fine_tune_epochs);
    s.get("clip_norm", c.train.clip_norm);
    s.get("threads", c.train.threads);
    s.get("seed", c.train.seed);
    s.finish();
  }
  {
    Section s(section("synth"), "synth");
    s.get("length", c.synth.length);
    s.get("base_level", c.synth.base_level);
    s.get("seasonal_amp", c.synth.seasonal_amp);
    s.get("seasonal_period", c.synth.seasonal_period);
    s.get("tidal_amp", c.synth.tidal_amp);
    s.get("tidal_period", c.synth.tidal_period);
    s.get("storm_rate", c.synth.storm_rate);
    s.get("storm_amp", c.synth.storm_amp);
    s.get("storm_decay", c.synth.storm_decay);
    s.get("noise_std", c.synth.noise_std);
    s.get("wind_lag", c.synth.wind_lag);
    s.get("seed", c.synth.seed);
    s.get("start_time", c.synth.start_time);
    s.finish();
  }
  {
    Section s(section("eval"), "eval");
    s.get("ridge_lambda", c.eval.ridge_lambda);
    s.finish();
  }
  {
    Section s(section("ablation"), "ablation");
    s.get("seeds", c.ablation.seeds);
    s.get("records", c.ablation.records);
    s.get("epochs", c.ablation.epochs);
    s.get("fine_tune_epochs", c.ablation.fine_tune_epochs);
    s.get("wind_lag", c.ablation.wind_lag);
    s.finish();
  }
  {
    Section s(section("paths"), "paths");
    s.get("data", c.paths.data);
    s.get("checkpoint", c.paths.checkpoint);
    s.get("curves", c.paths.curves);
    s.get("report", c.paths.report);
    s.get("predictions", c.paths.predictions);
    s.get("bands", c.paths.bands);
    s.get("forecast", c.paths.forecast);
    s.get("ablation_report", c.paths.ablation_report);
    s.get("column", c.paths.column);
    s.finish();
  }
  return c;
}

RunConfig load_runconfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadConfig("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw BadConfig("config file '" + path + "' is not valid JSON: " +
                    e.what());
  }
  return from_json(j);
}

std::string config_hash(const RunConfig& config) {
  const std::string text = semantic_json(config).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex;
  for (int shift = 60; shift >= 0; shift -= 4) {
    out << ((h >> shift) & 0xF);
  }
  return out.str();
}

gtnet::GtNetConfig net_config(const RunConfig& c, std::size_t num_nodes) {
  gtnet::GtNetConfig n;
  n.num_nodes = num_nodes;
  n.window_len = c.model.window_len;
  n.horizon = c.model.horizon;
  n.num_blocks = c.model.num_blocks;
  n.dilation = c.model.dilation;
  n.hidden_channels = c.model.hidden_channels;
  n.embed_dim = c.model.embed_dim;
  n.mixhop_depth = c.model.mixhop_depth;
  n.retain_ratio = c.model.retain_ratio;
  n.topk = std::min(c.model.topk, num_nodes > 0 ? num_nodes - 1 : 0);
  n.saturation = c.model.saturation;
  n.kernel_sizes = c.model.kernel_sizes;
  return n;
}

wgnn::TrainConfig train_config(const RunConfig& c) {
  wgnn::TrainConfig t;
  t.epochs = c.train.epochs;
  t.batch_size = c.train.batch_size;
  t.learning_rate = c.train.learning_rate;
  t.optimizer = wgnn::parse_optimizer(c.train.optimizer);
  t.regime = wgnn::parse_regime(c.train.regime);
  t.fine_tune_epochs = c.train.fine_tune_epochs;
  t.clip_norm = c.train.clip_norm;
  t.threads = c.train.threads;
  t.seed = c.train.seed;
  return t;
}

synth::SynthConfig synth_config(const RunConfig& c) {
  synth::SynthConfig s;
  s.length = c.synth.length;
  s.base_level = c.synth.base_level;
  s.seasonal_amp = c.synth.seasonal_amp;
  s.seasonal_period = c.synth.seasonal_period;
  s.tidal_amp = c.synth.tidal_amp;
  s.tidal_period = c.synth.tidal_period;
  s.storm_rate = c.synth.storm_rate;
  s.storm_amp = c.synth.storm_amp;
  s.storm_decay = c.synth.storm_decay;
  s.noise_std = c.synth.noise_std;
  s.wind_lag = c.synth.wind_lag;
  s.seed = c.synth.seed;
  s.start_time = c.synth.start_time;
  return s;
}

dwt::ExtensionMode wavelet_mode(const RunConfig& c) {
  return dwt::parse_extension_mode(c.wavelet.mode);
}

}  // namespace wavecast::cfg
