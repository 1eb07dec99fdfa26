#include "wavecast/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "wavecast/ablation.hpp"
#include "wavecast/checkpoint.hpp"
#include "wavecast/data.hpp"
#include "wavecast/eval.hpp"
#include "wavecast/rng.hpp"

namespace wavecast::pipeline {

namespace {

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Rethrows any library error with a stage prefix; already-labelled errors
// pass through untouched.
template <typename F>
auto stage(const char* label, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const PipelineError&) {
    throw;
  } catch (const Error& e) {
    throw PipelineError(std::string("[") + label + "] " + e.what());
  }
}

// Everything cmd_train and cmd_evaluate share: the physical and normalized
// channel views, the chronological splits, and the model channel layout.
struct Dataset {
  data::ChannelMatrix raw;
  data::ChannelMatrix norm;
  data::NormStats stats;        // every matrix channel
  std::size_t out_of_unit = 0;  // values scaled outside [0,1]
  data::DatasetSplits splits;
  std::vector<std::size_t> segment_starts;
  std::vector<std::size_t> input_channels;
  std::vector<std::string> input_names;
  data::NormStats model_stats;  // input channels plus SWH target last
};

// Channel layout: every non-SWH channel is an input; SWH joins them only on
// request and is always the final stats entry (the denormalization target).
void pick_inputs(Dataset& ds, bool use_swh_input) {
  ds.input_channels.clear();
  ds.input_names.clear();
  for (std::size_t c = 0; c < ds.raw.channels(); ++c) {
    if (c == ds.raw.swh_index && !use_swh_input) continue;
    ds.input_channels.push_back(c);
    ds.input_names.push_back(ds.raw.names[c]);
  }
  ds.model_stats = data::NormStats{};
  for (const std::size_t c : ds.input_channels) {
    ds.model_stats.names.push_back(ds.stats.names[c]);
    ds.model_stats.mins.push_back(ds.stats.mins[c]);
    ds.model_stats.maxs.push_back(ds.stats.maxs[c]);
  }
  ds.model_stats.names.push_back(ds.stats.names[ds.raw.swh_index]);
  ds.model_stats.mins.push_back(ds.stats.mins[ds.raw.swh_index]);
  ds.model_stats.maxs.push_back(ds.stats.maxs[ds.raw.swh_index]);
}

// Training-time dataset: stats are measured on the training range.
Dataset build_dataset(const cfg::RunConfig& c, const data::Series& series) {
  Dataset ds;
  ds.segment_starts = series.segment_starts;
  stage("normalize", [&] {
    ds.raw = data::build_channels(series.records,
                                  data::parse_dir_encoding(c.model.dir_encoding));
  });
  stage("split", [&] { ds.splits = data::split_622(ds.raw.length()); });
  stage("normalize", [&] {
    data::NormalizedChannels norm =
        data::normalize(ds.raw, 0, ds.splits.train_end);
    ds.norm = std::move(norm.matrix);
    ds.stats = std::move(norm.stats);
    ds.out_of_unit = norm.out_of_unit;
  });
  pick_inputs(ds, c.model.use_swh_input);
  return ds;
}

// Evaluation-time dataset: the checkpoint's stats are authoritative, looked
// up per channel name.
Dataset build_dataset_with_stats(const cfg::RunConfig& c,
                                 const data::Series& series,
                                 const data::NormStats& stored,
                                 bool use_swh_input) {
  Dataset ds;
  ds.segment_starts = series.segment_starts;
  stage("normalize", [&] {
    ds.raw = data::build_channels(series.records,
                                  data::parse_dir_encoding(c.model.dir_encoding));
  });
  stage("split", [&] { ds.splits = data::split_622(ds.raw.length()); });
  stage("normalize", [&] {
    ds.norm = ds.raw;
    ds.stats = data::NormStats{};
    for (std::size_t ch = 0; ch < ds.raw.channels(); ++ch) {
      const std::string& name = ds.raw.names[ch];
      const auto it =
          std::find(stored.names.begin(), stored.names.end(), name);
      if (it == stored.names.end()) {
        throw Error("channel '" + name + "' missing from checkpoint stats");
      }
      const std::size_t s =
          static_cast<std::size_t>(it - stored.names.begin());
      ds.stats.names.push_back(name);
      ds.stats.mins.push_back(stored.mins[s]);
      ds.stats.maxs.push_back(stored.maxs[s]);
      const double lo = stored.mins[s];
      const double range = stored.maxs[s] - lo;
      for (double& v : ds.norm.values[ch]) {
        v = (v - lo) / range;
        if (v < 0.0 || v > 1.0) ++ds.out_of_unit;
      }
    }
  });
  pick_inputs(ds, use_swh_input);
  return ds;
}

struct SplitWindows {
  std::vector<data::Sample> train, val, test;
};

SplitWindows cut_windows(const Dataset& ds, std::size_t window_len,
                         std::size_t horizon) {
  return stage("window", [&] {
    SplitWindows w;
    w.train = data::make_windows(ds.norm, 0, ds.splits.train_end,
                                 ds.segment_starts, window_len, horizon);
    w.val = data::make_windows(ds.norm, ds.splits.train_end,
                               ds.splits.val_end, ds.segment_starts,
                               window_len, horizon);
    w.test = data::make_windows(ds.norm, ds.splits.val_end, ds.splits.n,
                                ds.segment_starts, window_len, horizon);
    return w;
  });
}

eval::MetricReport make_report(const std::string& model,
                               const std::string& split, std::uint64_t seed,
                               const std::string& hash,
                               const std::vector<double>& truth,
                               const std::vector<double>& pred) {
  eval::MetricReport r;
  r.model = model;
  r.split = split;
  r.seed = seed;
  r.mse = eval::mse(truth, pred);
  r.r2 = eval::r2(truth, pred);
  r.n = truth.size();
  r.units = "normalized";
  r.config_hash = hash;
  return r;
}

std::vector<double> model_predictions(const wgnn::WgnnModel& model,
                                      const std::vector<data::Sample>& samples,
                                      const std::vector<std::size_t>& inputs) {
  std::vector<double> flat;
  for (const data::Sample& s : samples) {
    std::vector<std::vector<double>> window;
    window.reserve(inputs.size());
    for (const std::size_t c : inputs) window.push_back(s.window[c]);
    const std::vector<double> out = wgnn::wgnn_forward(model, window);
    flat.insert(flat.end(), out.begin(), out.end());
  }
  return flat;
}

// Shared back half of cmd_train and cmd_evaluate: metric reports for the
// model and both baselines on every split, plus the physical-units test
// predictions produced through the same code path cmd_predict uses.
void evaluate_and_write(const cfg::RunConfig& c, const wgnn::WgnnModel& model,
                        const Dataset& ds, const SplitWindows& w,
                        const std::string& hash, const std::string& report_out,
                        const std::string& predictions_out,
                        std::ostream& diag) {
  stage("evaluate", [&] {
    nlohmann::json out;
    out["config_hash"] = hash;
    out["regime"] = c.train.regime;
    out["seed"] = c.train.seed;
    out["reports"] = nlohmann::json::array();

    const std::vector<eval::RidgeModel> ridge =
        eval::fit_ridge_per_step(w.train, c.eval.ridge_lambda);

    const std::vector<std::pair<std::string, const std::vector<data::Sample>*>>
        splits = {{"train", &w.train}, {"val", &w.val}, {"test", &w.test}};
    double wgnn_test = 0.0, persistence_test = 0.0;
    for (const auto& [split_name, samples] : splits) {
      const std::vector<double> truth = eval::flatten_targets(*samples);
      const eval::MetricReport model_report = make_report(
          "wgnn", split_name, c.train.seed, hash, truth,
          model_predictions(model, *samples, ds.input_channels));
      const eval::MetricReport persistence_report = make_report(
          "persistence", split_name, c.train.seed, hash, truth,
          eval::baseline_persistence(*samples, ds.norm.swh_index));
      const eval::MetricReport ridge_report =
          make_report("ridge", split_name, c.train.seed, hash, truth,
                      eval::ridge_forecast(ridge, *samples));
      for (const eval::MetricReport& r :
           {model_report, persistence_report, ridge_report}) {
        out["reports"].push_back(nlohmann::json::parse(report_to_json(r)));
      }
      if (split_name == "test") {
        wgnn_test = model_report.mse;
        persistence_test = persistence_report.mse;
      }
      diag << split_name << ": wgnn mse=" << model_report.mse
           << " r2=" << model_report.r2
           << " | persistence mse=" << persistence_report.mse
           << " | ridge mse=" << ridge_report.mse << "\n";
    }
    ckpt::atomic_write_text(report_out, out.dump(2) + "\n");

    // Test predictions in meters, through predict() so a later cmd_predict
    // on the same window reproduces every value bitwise.
    std::vector<double> truth_m, pred_m;
    std::size_t range_warnings = 0;
    for (const data::Sample& s : w.test) {
      std::vector<std::vector<double>> physical;
      physical.reserve(ds.input_channels.size());
      for (const std::size_t ch : ds.input_channels) {
        const std::vector<double>& row = ds.raw.values[ch];
        physical.emplace_back(row.begin() + s.window_begin,
                              row.begin() + s.window_begin +
                                  model.net_config.window_len);
      }
      const wgnn::Forecast fc = wgnn::predict(model, physical);
      range_warnings += fc.warnings.size();
      pred_m.insert(pred_m.end(), fc.swh.begin(), fc.swh.end());
      const std::vector<double>& swh_raw = ds.raw.values[ds.raw.swh_index];
      truth_m.insert(truth_m.end(),
                     swh_raw.begin() + s.window_begin +
                         model.net_config.window_len,
                     swh_raw.begin() + s.window_begin +
                         model.net_config.window_len +
                         model.net_config.horizon);
    }
    eval::write_prediction_csv(predictions_out, truth_m, pred_m,
                               "config_hash=" + hash + "\nunits=meters\n" +
                                   "split=test");
    if (range_warnings > 0) {
      diag << "note: " << range_warnings
           << " test window(s) had inputs outside the training range\n";
    }
    diag << "test mse " << wgnn_test << " vs persistence "
         << persistence_test << " (normalized units)\n";
  });
}

// Identity with a deliberately wrong adjoint (sign-flipped). Used by the
// gradient checker's self-test: composing it into the loss must make the
// check fail.
ad::Tensor wrong_gradient_identity(const ad::Tensor& x) {
  ad::Tensor out = ad::make_tensor(x->shape, x->data);
  if (x->requires_grad && ad::grad_enabled()) {
    out->requires_grad = true;
    out->op_tag = "wrong_gradient_identity";
    out->parents = {x};
    out->backward_fn = [](ad::TensorNode& self) {
      std::vector<double>& g = self.parents[0]->grad;
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
    };
  }
  return out;
}

}  // namespace

void cmd_synth(const cfg::RunConfig& c, const std::string& out_path,
               std::ostream& diag) {
  const synth::SynthConfig scfg = cfg::synth_config(c);
  const std::vector<data::BuoyRecord> records =
      stage("synth", [&] { return synth::generate(scfg); });
  const std::string hash = cfg::config_hash(c);
  stage("write", [&] {
    data::write_csv(out_path, records,
                    "config_hash=" + hash + "\nseed=" +
                        std::to_string(scfg.seed) + "\ngenerator=synth");
  });
  diag << "wrote " << records.size() << " records (seed " << scfg.seed
       << ") to " << out_path << "\n";
}

void cmd_decompose(const cfg::RunConfig& c, const std::string& in_csv,
                   const std::string& column, const std::string& out_csv,
                   std::ostream& diag) {
  const data::Series series = stage("load", [&] { return data::load_csv(in_csv); });

  std::vector<double> signal(series.records.size());
  if (column == "avg_wind") {
    std::transform(series.records.begin(), series.records.end(),
                   signal.begin(), [](const auto& r) { return r.avg_wind; });
  } else if (column == "max_wind") {
    std::transform(series.records.begin(), series.records.end(),
                   signal.begin(), [](const auto& r) { return r.max_wind; });
  } else if (column == "wind_dir") {
    std::transform(series.records.begin(), series.records.end(),
                   signal.begin(), [](const auto& r) { return r.wind_dir; });
  } else if (column == "swh") {
    std::transform(series.records.begin(), series.records.end(),
                   signal.begin(), [](const auto& r) { return r.swh; });
  } else {
    throw MissingColumn("no column '" + column +
                        "' (expected avg_wind|max_wind|wind_dir|swh)");
  }

  const dwt::WaveletFilter filter = stage("decompose", [&] {
    return dwt::make_daubechies(c.wavelet.order);
  });
  const dwt::ExtensionMode mode = cfg::wavelet_mode(c);
  const auto [l1, l2, l3] = stage("decompose", [&] {
    return std::make_tuple(dwt::band_decompose(signal, filter, 1, mode),
                           dwt::band_decompose(signal, filter, 2, mode),
                           dwt::band_decompose(signal, filter, 3, mode));
  });

  double max_err = 0.0;
  for (std::size_t i = 0; i < signal.size(); ++i) {
    const double sum = l3.approx()[i] + l3.detail(3)[i] + l3.detail(2)[i] +
                       l3.detail(1)[i];
    max_err = std::max(max_err, std::abs(sum - signal[i]));
  }
  const bool verified = max_err <= 1e-10;
  if (!verified) {
    throw PipelineError("[verify] band components sum to the original with "
                        "max error " +
                        g17(max_err) + ", above the 1e-10 bound");
  }

  const std::string hash = cfg::config_hash(c);
  stage("write", [&] {
    std::ostringstream out;
    out << "# config_hash=" << hash << "\n";
    out << "# wavelet=db" << c.wavelet.order << " mode=" << c.wavelet.mode
        << " column=" << column << "\n";
    out << "# max_reconstruction_error=" << g17(max_err) << " verified=1\n";
    out << "original,rA1,rA2,rA3,rD1,rD2,rD3\n";
    for (std::size_t i = 0; i < signal.size(); ++i) {
      out << g17(signal[i]) << ',' << g17(l1.approx()[i]) << ','
          << g17(l2.approx()[i]) << ',' << g17(l3.approx()[i]) << ','
          << g17(l3.detail(1)[i]) << ',' << g17(l3.detail(2)[i]) << ','
          << g17(l3.detail(3)[i]) << "\n";
    }
    ckpt::atomic_write_text(out_csv, out.str());
  });
  diag << "max reconstruction error = " << g17(max_err)
       << " (verified <= 1e-10)\n";
}

void cmd_train(const cfg::RunConfig& c, const std::string& data_csv,
               const TrainArtifacts& artifacts, std::ostream& diag) {
  const data::Series series =
      stage("load", [&] { return data::load_csv(data_csv); });
  diag << "loaded " << series.records.size() << " records ("
       << series.gaps_filled << " gap-filled, "
       << series.segment_starts.size() << " segment(s))\n";

  Dataset ds = build_dataset(c, series);
  if (ds.out_of_unit > 0) {
    diag << "note: " << ds.out_of_unit
         << " value(s) outside [0,1] after normalization (outside the "
            "training range)\n";
  }

  const SplitWindows w = cut_windows(ds, c.model.window_len, c.model.horizon);
  diag << "windows: train " << w.train.size() << ", val " << w.val.size()
       << ", test " << w.test.size() << "\n";

  const std::string hash = cfg::config_hash(c);
  wgnn::WgnnModel model = stage("prepare", [&] {
    return wgnn::make_model(c.wavelet.order, cfg::wavelet_mode(c),
                            cfg::net_config(c, ds.input_channels.size()),
                            ds.input_names, ds.model_stats, c.train.seed);
  });
  const auto prepared_train = stage("prepare", [&] {
    return wgnn::prepare_samples(model, w.train, ds.input_channels,
                                 ds.norm.swh_index);
  });
  const auto prepared_val = stage("prepare", [&] {
    return wgnn::prepare_samples(model, w.val, ds.input_channels,
                                 ds.norm.swh_index);
  });

  const wgnn::TrainResult result = stage("train", [&] {
    return wgnn::train(model, prepared_train, prepared_val,
                       cfg::train_config(c));
  });
  diag << "training done; joint validation loss "
       << g17(result.final_val_loss) << "\n";

  stage("write", [&] {
    nlohmann::json extra;
    extra["config_hash"] = hash;
    extra["config"] = cfg::semantic_json(c);
    extra["regime"] = c.train.regime;
    wgnn::save_model(artifacts.checkpoint, model, extra);

    std::ostringstream curves;
    curves << "# config_hash=" << hash << "\n";
    curves << "phase,epoch,train_loss,val_loss\n";
    for (std::size_t k = 0; k < wgnn::kNumBands; ++k) {
      for (const wgnn::EpochLoss& e : result.band_curves[k]) {
        curves << wgnn::kBandNames[k] << ',' << e.epoch << ','
               << g17(e.train_loss) << ',' << g17(e.val_loss) << "\n";
      }
    }
    for (const wgnn::EpochLoss& e : result.joint_curve) {
      curves << "joint," << e.epoch << ',' << g17(e.train_loss) << ','
             << g17(e.val_loss) << "\n";
    }
    ckpt::atomic_write_text(artifacts.curves, curves.str());
  });
  diag << "checkpoint: " << artifacts.checkpoint << "\n";

  evaluate_and_write(c, model, ds, w, hash, artifacts.report,
                     artifacts.predictions, diag);
}

void cmd_predict(const cfg::RunConfig& c, const std::string& checkpoint,
                 const std::string& window_csv, const std::string& out_csv,
                 std::ostream& diag) {
  const wgnn::LoadedModel loaded =
      stage("load", [&] { return wgnn::load_model(checkpoint); });
  // The checkpoint's own semantic config wins over the current one for
  // anything that shapes inputs.
  const cfg::RunConfig stored = loaded.meta.contains("config")
                                    ? cfg::from_json(loaded.meta.at("config"))
                                    : c;
  const std::string hash = loaded.meta.contains("config_hash")
                               ? loaded.meta.at("config_hash").get<std::string>()
                               : cfg::config_hash(c);

  const data::Series series =
      stage("load", [&] { return data::load_csv(window_csv); });
  const data::ChannelMatrix matrix = stage("window", [&] {
    return data::build_channels(
        series.records, data::parse_dir_encoding(stored.model.dir_encoding));
  });

  const std::size_t window_len = loaded.model.net_config.window_len;
  const std::vector<std::vector<double>> physical = stage("window", [&] {
    if (matrix.length() < window_len) {
      throw ad::WindowTooShort("window CSV has " +
                               std::to_string(matrix.length()) +
                               " usable records, the model needs " +
                               std::to_string(window_len));
    }
    const std::size_t begin = matrix.length() - window_len;
    if (series.segment_starts.back() > begin) {
      throw ad::WindowTooShort(
          "the last " + std::to_string(window_len) +
          " records straddle a data gap longer than " +
          std::to_string(data::kMaxInterpolatedGap) + " hours");
    }
    std::vector<std::vector<double>> rows;
    rows.reserve(loaded.model.input_names.size());
    for (const std::string& name : loaded.model.input_names) {
      const auto it =
          std::find(matrix.names.begin(), matrix.names.end(), name);
      if (it == matrix.names.end()) {
        throw MissingColumn("window CSV lacks channel '" + name + "'");
      }
      const std::vector<double>& row =
          matrix.values[static_cast<std::size_t>(it - matrix.names.begin())];
      rows.emplace_back(row.begin() + begin, row.end());
    }
    return rows;
  });

  const wgnn::Forecast fc =
      stage("predict", [&] { return wgnn::predict(loaded.model, physical); });
  for (const std::string& warning : fc.warnings) {
    diag << "warning: " << warning << "\n";
  }

  stage("write", [&] {
    std::ostringstream out;
    out << "# config_hash=" << hash << "\n";
    out << "# units=meters\n";
    out << "step,swh\n";
    for (std::size_t i = 0; i < fc.swh.size(); ++i) {
      out << (i + 1) << ',' << g17(fc.swh[i]) << "\n";
    }
    ckpt::atomic_write_text(out_csv, out.str());
  });
  diag << "forecast of " << fc.swh.size() << " step(s) after "
       << data::format_iso8601(series.records.back().timestamp) << " -> "
       << out_csv << "\n";
}

void cmd_evaluate(const cfg::RunConfig& c, const std::string& checkpoint,
                  const std::string& data_csv, const std::string& report_out,
                  const std::string& predictions_out, std::ostream& diag) {
  const wgnn::LoadedModel loaded =
      stage("load", [&] { return wgnn::load_model(checkpoint); });
  const cfg::RunConfig stored = loaded.meta.contains("config")
                                    ? cfg::from_json(loaded.meta.at("config"))
                                    : c;
  const std::string hash = loaded.meta.contains("config_hash")
                               ? loaded.meta.at("config_hash").get<std::string>()
                               : cfg::config_hash(c);

  const data::Series series =
      stage("load", [&] { return data::load_csv(data_csv); });
  Dataset ds = build_dataset_with_stats(stored, series, loaded.model.stats,
                                        stored.model.use_swh_input);
  if (ds.out_of_unit > 0) {
    diag << "note: " << ds.out_of_unit
         << " value(s) outside [0,1] under the checkpoint's stats\n";
  }
  const SplitWindows w = cut_windows(ds, loaded.model.net_config.window_len,
                                     loaded.model.net_config.horizon);
  evaluate_and_write(stored, loaded.model, ds, w, hash, report_out,
                     predictions_out, diag);
}

bool cmd_gradcheck(const cfg::RunConfig& c, bool inject_fault,
                   std::ostream& out) {
  gtnet::GtNetConfig net;
  net.num_nodes = 3;
  net.window_len = 16;
  net.num_blocks = 2;
  net.hidden_channels = 4;
  net.embed_dim = 3;
  net.topk = 2;

  data::NormStats stats;
  for (const char* name : {"u", "v", "w", "target"}) {
    stats.names.push_back(name);
    stats.mins.push_back(0.0);
    stats.maxs.push_back(1.0);
  }
  wgnn::WgnnModel model =
      wgnn::make_model(c.wavelet.order, cfg::wavelet_mode(c), net,
                       {"u", "v", "w"}, stats, c.train.seed);

  Rng rng = Rng(c.train.seed).fork(1);
  std::vector<wgnn::PreparedSample> prepared;
  for (int i = 0; i < 2; ++i) {
    data::Sample s;
    s.window.assign(3, std::vector<double>(net.window_len));
    for (auto& row : s.window) {
      for (double& v : row) v = rng.uniform(0.0, 1.0);
    }
    s.target = std::vector<double>{rng.uniform(0.0, 1.0)};
    prepared.push_back(wgnn::prepare_sample(model, s, {0, 1, 2}, 2));
  }
  const wgnn::Batch batch = wgnn::full_batch(prepared);

  std::vector<std::string> labels;
  std::vector<ad::Tensor> params;
  for (std::size_t k = 0; k < wgnn::kNumBands; ++k) {
    for (const auto& [name, tensor] : model.nets[k].named_parameters()) {
      labels.push_back("band" + std::to_string(k) + "." + name);
      params.push_back(tensor);
    }
  }

  const auto loss_fn = [&]() {
    const ad::Tensor loss = wgnn::loss_joint(model, batch);
    return inject_fault ? wrong_gradient_identity(loss) : loss;
  };
  const ad::GradCheckResult res =
      ad::grad_check_detailed(loss_fn, params, 1e-5);

  out << "parameter block                     worst relative error\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    char line[96];
    std::snprintf(line, sizeof(line), "%-36s %.3e\n", labels[i].c_str(),
                  res.per_param[i]);
    out << line;
  }
  const bool pass = res.max_rel_error <= 1e-4;
  out << "max relative error = " << g17(res.max_rel_error)
      << (pass ? "  PASS" : "  FAIL") << " (tolerance 1e-4)\n";
  return pass;
}

void cmd_ablate(const cfg::RunConfig& c, const std::string& data_csv,
                const std::string& report_out, std::ostream& diag) {
  data::Series series;
  if (data_csv.empty()) {
    stage("synth", [&] {
      synth::SynthConfig scfg = cfg::synth_config(c);
      scfg.length = c.ablation.records;
      scfg.wind_lag = c.ablation.wind_lag;
      series.records = synth::generate(scfg);
      series.segment_starts = {0};
    });
    diag << "benchmark series: " << series.records.size()
         << " synthetic records\n";
  } else {
    series = stage("load", [&] { return data::load_csv(data_csv); });
  }

  Dataset ds = build_dataset(c, series);
  const SplitWindows w = cut_windows(ds, c.model.window_len, c.model.horizon);

  eval::AblationDataset dataset;
  dataset.train = w.train;
  dataset.val = w.val;
  dataset.test = w.test;
  dataset.input_names = ds.input_names;
  dataset.input_channels = ds.input_channels;
  dataset.swh_channel = ds.norm.swh_index;
  dataset.stats = ds.model_stats;

  wgnn::TrainConfig tcfg = cfg::train_config(c);
  tcfg.epochs = c.ablation.epochs;
  tcfg.fine_tune_epochs = c.ablation.fine_tune_epochs;

  const eval::AblationReport report = stage("ablate", [&] {
    return eval::ablation_compare(dataset, c.wavelet.order,
                                  cfg::wavelet_mode(c),
                                  cfg::net_config(c, ds.input_channels.size()),
                                  tcfg, c.ablation.seeds, c.train.threads);
  });

  const std::string hash = cfg::config_hash(c);
  stage("write", [&] {
    nlohmann::json j = eval::ablation_to_json(report);
    j["config_hash"] = hash;
    j["units"] = "normalized";
    ckpt::atomic_write_text(report_out, j.dump(2) + "\n");
  });

  if (report.degenerate_data) {
    diag << "degenerate data: both arms skipped, reduction 0\n";
    return;
  }
  for (const eval::AblationSeedResult& r : report.seeds) {
    if (r.failed) {
      diag << "seed " << r.seed << ": FAILED (" << r.error << ")\n";
    } else {
      diag << "seed " << r.seed << ": wgnn mse " << r.wgnn.mse << ", gnn mse "
           << r.gnn.mse << ", reduction " << (r.reduction * 100.0) << "%\n";
    }
  }
  diag << "median MSE reduction " << (report.median_reduction * 100.0)
       << "% over " << report.seeds.size() << " seed(s) (wgnn "
       << report.wgnn_parameter_count << " params, gnn "
       << report.gnn_parameter_count << " params)\n";
}

}  // namespace wavecast::pipeline
