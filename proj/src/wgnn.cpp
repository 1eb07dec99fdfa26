#include "wavecast/wgnn.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "wavecast/checkpoint.hpp"
#include "wavecast/ops.hpp"
#include "wavecast/rng.hpp"

namespace wavecast::wgnn {

namespace {

const std::vector<double>& band_of(const dwt::BandSet& set, std::size_t band) {
  return band + 1 == kNumBands ? set.approx() : set.detail(band + 1);
}

void check_window_shape(const std::vector<std::vector<double>>& window,
                        std::size_t nodes, std::size_t steps) {
  if (window.size() != nodes) {
    throw WindowTooShort("window has " + std::to_string(window.size()) +
                         " channels, model expects " + std::to_string(nodes));
  }
  for (const auto& row : window) {
    if (row.size() != steps) {
      throw WindowTooShort("window row has " + std::to_string(row.size()) +
                           " steps, model needs exactly " +
                           std::to_string(steps));
    }
  }
}

ad::Tensor window_tensor(const std::vector<std::vector<double>>& rows) {
  std::vector<double> flat;
  flat.reserve(rows.size() * rows.front().size());
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  return ad::make_tensor({rows.size(), rows.front().size()}, std::move(flat));
}

void check_prepared(const PreparedSample& ps) {
  if (ps.band_windows.size() != kNumBands ||
      ps.band_targets.size() != kNumBands) {
    throw BandCountMismatch("sample carries " +
                            std::to_string(ps.band_windows.size()) +
                            " band windows and " +
                            std::to_string(ps.band_targets.size()) +
                            " band targets, expected " +
                            std::to_string(kNumBands));
  }
}

ad::Tensor squared_residual(const ad::Tensor& pred,
                            const std::vector<double>& target) {
  const ad::Tensor t = ad::make_tensor({target.size()}, target);
  const ad::Tensor diff = ad::sub(pred, t);
  return ad::sum(ad::mul(diff, diff));
}

using Snapshot = std::vector<std::vector<double>>;

Snapshot snapshot(const std::vector<ad::Tensor>& params) {
  Snapshot s;
  s.reserve(params.size());
  for (const ad::Tensor& p : params) s.push_back(p->data);
  return s;
}

void restore(const std::vector<ad::Tensor>& params, const Snapshot& s) {
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->data = s[i];
}

void zero_grads(const std::vector<ad::Tensor>& params) {
  for (const ad::Tensor& p : params) p->zero_grad();
}

void clip_global_norm(const std::vector<ad::Tensor>& params, double clip) {
  double sq = 0.0;
  for (const ad::Tensor& p : params) {
    for (double g : p->grad) sq += g * g;
  }
  const double norm = std::sqrt(sq);
  if (norm > clip) {
    const double scale = clip / norm;
    for (const ad::Tensor& p : params) {
      for (double& g : p->grad) g *= scale;
    }
  }
}

struct AdamState {
  Snapshot m, v;
  std::size_t t = 0;

  void init(const std::vector<ad::Tensor>& params) {
    m.clear();
    v.clear();
    for (const ad::Tensor& p : params) {
      m.emplace_back(p->data.size(), 0.0);
      v.emplace_back(p->data.size(), 0.0);
    }
  }
};

void optimizer_step(const std::vector<ad::Tensor>& params, Optimizer opt,
                    AdamState& adam, double lr) {
  if (opt == Optimizer::sgd) {
    for (const ad::Tensor& p : params) {
      for (std::size_t i = 0; i < p->data.size(); ++i) {
        p->data[i] -= lr * p->grad[i];
      }
    }
    return;
  }
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  ++adam.t;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(adam.t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(adam.t));
  for (std::size_t j = 0; j < params.size(); ++j) {
    const ad::Tensor& p = params[j];
    for (std::size_t i = 0; i < p->data.size(); ++i) {
      const double g = p->grad[i];
      adam.m[j][i] = b1 * adam.m[j][i] + (1.0 - b1) * g;
      adam.v[j][i] = b2 * adam.v[j][i] + (1.0 - b2) * g * g;
      const double mh = adam.m[j][i] / c1;
      const double vh = adam.v[j][i] / c2;
      p->data[i] -= lr * mh / (std::sqrt(vh) + eps);
    }
  }
}

double eval_band_val(const WgnnModel& model, std::size_t band,
                     const std::vector<PreparedSample>& val) {
  ad::NoGradGuard guard;
  double acc = 0.0;
  for (const PreparedSample& ps : val) {
    const ad::Tensor out = model.nets[band].forward(ps.band_windows[band]);
    for (std::size_t i = 0; i < out->data.size(); ++i) {
      const double d = out->data[i] - ps.band_targets[band][i];
      acc += d * d;
    }
  }
  return acc / static_cast<double>(val.size());
}

double eval_joint_val(const WgnnModel& model,
                      const std::vector<PreparedSample>& val) {
  ad::NoGradGuard guard;
  double acc = 0.0;
  for (const PreparedSample& ps : val) {
    std::vector<double> sum(ps.target.size(), 0.0);
    for (std::size_t k = 0; k < kNumBands; ++k) {
      const ad::Tensor out = model.nets[k].forward(ps.band_windows[k]);
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += out->data[i];
    }
    for (std::size_t i = 0; i < sum.size(); ++i) {
      const double d = sum[i] - ps.target[i];
      acc += d * d;
    }
  }
  return acc / static_cast<double>(val.size());
}

[[noreturn]] void report_divergence(const std::string& phase,
                                    std::size_t epoch, std::size_t step) {
  throw DivergenceDetected(phase + " training diverged at epoch " +
                           std::to_string(epoch) + ", step " +
                           std::to_string(step) +
                           ": loss is not finite");
}

// One optimization phase over `params` with loss built by `make_loss`.
// Shared by per-band and joint training; returns the curve and restores the
// parameters that scored the best validation loss (initial state included).
template <typename MakeLoss, typename EvalVal>
void run_phase(const std::vector<ad::Tensor>& params, std::size_t n_train,
               const TrainConfig& cfg, std::size_t epochs, Rng rng,
               const std::string& phase, MakeLoss&& make_loss,
               EvalVal&& eval_val, std::vector<EpochLoss>& curve) {
  double best_val = eval_val();
  Snapshot best = snapshot(params);

  AdamState adam;
  if (cfg.optimizer == Optimizer::adam) adam.init(params);

  std::vector<std::size_t> order(n_train);
  for (std::size_t i = 0; i < n_train; ++i) order[i] = i;

  for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
    rng.shuffle(order);
    double acc = 0.0;
    std::size_t seen = 0;
    std::size_t step = 0;
    for (std::size_t off = 0; off < n_train; off += cfg.batch_size) {
      ++step;
      const std::size_t hi = std::min(off + cfg.batch_size, n_train);
      zero_grads(params);
      const ad::Tensor loss =
          make_loss(order.begin() + off, order.begin() + hi);
      const double value = loss->data[0];
      if (!std::isfinite(value)) report_divergence(phase, epoch, step);
      try {
        ad::backward(loss);
      } catch (const ad::NaNDetected&) {
        report_divergence(phase, epoch, step);
      }
      clip_global_norm(params, cfg.clip_norm);
      optimizer_step(params, cfg.optimizer, adam, cfg.learning_rate);
      acc += value * static_cast<double>(hi - off);
      seen += hi - off;
    }
    const double val = eval_val();
    if (!std::isfinite(val)) report_divergence(phase, epoch, step);
    curve.push_back({epoch, acc / static_cast<double>(seen), val});
    if (val < best_val) {
      best_val = val;
      best = snapshot(params);
    }
  }
  restore(params, best);
}

}  // namespace

WgnnModel make_model(int wavelet_order, dwt::ExtensionMode mode,
                     const gtnet::GtNetConfig& net_config,
                     const std::vector<std::string>& input_names,
                     const data::NormStats& stats, std::uint64_t seed) {
  WgnnModel model;
  model.wavelet_order = wavelet_order;
  model.mode = mode;
  model.net_config = net_config;
  model.input_names = input_names;
  model.stats = stats;
  model.filter = dwt::make_daubechies(wavelet_order);

  Rng root(seed);
  model.nets.reserve(kNumBands);
  for (std::size_t k = 0; k < kNumBands; ++k) {
    model.nets.emplace_back(net_config, root.fork(k).next_u64());
  }
  validate_model(model);
  return model;
}

void validate_model(const WgnnModel& model) {
  model.net_config.validate();
  if (model.nets.size() != kNumBands) {
    throw BadBundle("model holds " + std::to_string(model.nets.size()) +
                    " band networks, expected " + std::to_string(kNumBands));
  }
  for (const gtnet::GtNet& net : model.nets) {
    if (net.config().window_len != model.net_config.window_len ||
        net.config().horizon != model.net_config.horizon ||
        net.config().num_nodes != model.net_config.num_nodes) {
      throw BadBundle("band networks disagree on window/horizon/nodes");
    }
  }
  if (model.filter.order != model.wavelet_order) {
    throw BadBundle("wavelet filter order " +
                    std::to_string(model.filter.order) +
                    " does not match configured order " +
                    std::to_string(model.wavelet_order));
  }
  const std::size_t n = model.net_config.num_nodes;
  if (model.input_names.size() != n) {
    throw BadBundle("model names " + std::to_string(model.input_names.size()) +
                    " input channels but the networks expect " +
                    std::to_string(n));
  }
  if (model.stats.mins.size() != n + 1 || model.stats.maxs.size() != n + 1) {
    throw BadBundle("norm stats must cover " + std::to_string(n + 1) +
                    " channels (inputs plus SWH target), got " +
                    std::to_string(model.stats.mins.size()));
  }
  for (std::size_t c = 0; c < model.stats.mins.size(); ++c) {
    if (!(model.stats.mins[c] < model.stats.maxs[c])) {
      throw BadBundle("norm stats channel " + std::to_string(c) +
                      " violates min < max");
    }
  }
}

std::array<std::vector<std::vector<double>>, kNumBands> decompose_window(
    const std::vector<std::vector<double>>& window,
    const dwt::WaveletFilter& filter, dwt::ExtensionMode mode) {
  if (window.empty() || window.front().empty()) {
    throw WindowTooShort("cannot decompose an empty window");
  }
  const std::vector<dwt::BandSet> sets =
      dwt::band_decompose_multichannel(window, filter, kLevels, mode);

  std::array<std::vector<std::vector<double>>, kNumBands> bands;
  for (std::size_t k = 0; k < kNumBands; ++k) {
    bands[k].reserve(window.size());
    for (const dwt::BandSet& set : sets) bands[k].push_back(band_of(set, k));
  }
  return bands;
}

ad::Tensor wgnn_forward_tensor(const WgnnModel& model,
                               const std::vector<std::vector<double>>& window) {
  check_window_shape(window, model.net_config.num_nodes,
                     model.net_config.window_len);
  const auto bands = decompose_window(window, model.filter, model.mode);
  ad::Tensor out;
  for (std::size_t k = 0; k < kNumBands; ++k) {
    const ad::Tensor pred = model.nets[k].forward(window_tensor(bands[k]));
    out = k == 0 ? pred : ad::add(out, pred);
  }
  return out;
}

std::vector<double> wgnn_forward(const WgnnModel& model,
                                 const std::vector<std::vector<double>>& window) {
  ad::NoGradGuard guard;
  return wgnn_forward_tensor(model, window)->data;
}

PreparedSample prepare_sample(const WgnnModel& model, const data::Sample& s,
                              const std::vector<std::size_t>& input_channels,
                              std::size_t swh_channel) {
  const std::size_t nodes = model.net_config.num_nodes;
  const std::size_t steps = model.net_config.window_len;
  const std::size_t horizon = model.net_config.horizon;
  if (input_channels.size() != nodes) {
    throw Error("sample preparation got " +
                std::to_string(input_channels.size()) +
                " input channels, model expects " + std::to_string(nodes));
  }
  for (std::size_t c : input_channels) {
    if (c >= s.window.size()) {
      throw Error("input channel index " + std::to_string(c) +
                  " out of range for sample with " +
                  std::to_string(s.window.size()) + " channels");
    }
  }
  if (swh_channel >= s.window.size()) {
    throw Error("swh channel index " + std::to_string(swh_channel) +
                " out of range");
  }
  if (s.target.size() != horizon) {
    throw Error("sample target has " + std::to_string(s.target.size()) +
                " steps, model horizon is " + std::to_string(horizon));
  }

  std::vector<std::vector<double>> window;
  window.reserve(nodes);
  for (std::size_t c : input_channels) window.push_back(s.window[c]);
  check_window_shape(window, nodes, steps);

  PreparedSample ps;
  const auto bands = decompose_window(window, model.filter, model.mode);
  ps.band_windows.reserve(kNumBands);
  for (std::size_t k = 0; k < kNumBands; ++k) {
    ps.band_windows.push_back(window_tensor(bands[k]));
  }

  // Band targets come from the window+target SWH stretch; its band sum
  // reconstructs the composite target up to wavelet round-off.
  std::vector<double> stretch = s.window[swh_channel];
  stretch.insert(stretch.end(), s.target.begin(), s.target.end());
  const dwt::BandSet set =
      dwt::band_decompose(stretch, model.filter, kLevels, model.mode);
  ps.band_targets.resize(kNumBands);
  for (std::size_t k = 0; k < kNumBands; ++k) {
    const std::vector<double>& component = band_of(set, k);
    ps.band_targets[k].assign(component.begin() + steps,
                              component.begin() + steps + horizon);
  }
  ps.target = s.target;
  return ps;
}

std::vector<PreparedSample> prepare_samples(
    const WgnnModel& model, const std::vector<data::Sample>& samples,
    const std::vector<std::size_t>& input_channels, std::size_t swh_channel) {
  std::vector<PreparedSample> out;
  out.reserve(samples.size());
  for (const data::Sample& s : samples) {
    out.push_back(prepare_sample(model, s, input_channels, swh_channel));
  }
  return out;
}

Batch full_batch(const std::vector<PreparedSample>& samples) {
  Batch b;
  b.reserve(samples.size());
  for (const PreparedSample& ps : samples) b.push_back(&ps);
  return b;
}

ad::Tensor loss_joint(const WgnnModel& model, const Batch& batch) {
  if (batch.empty()) throw EmptyBatch("joint loss over an empty batch");
  ad::Tensor total;
  for (const PreparedSample* ps : batch) {
    check_prepared(*ps);
    ad::Tensor pred;
    for (std::size_t k = 0; k < kNumBands; ++k) {
      const ad::Tensor out = model.nets[k].forward(ps->band_windows[k]);
      pred = k == 0 ? out : ad::add(pred, out);
    }
    const ad::Tensor sq = squared_residual(pred, ps->target);
    total = total ? ad::add(total, sq) : sq;
  }
  return ad::scalar_mul(total, 1.0 / static_cast<double>(batch.size()));
}

ad::Tensor band_loss(const WgnnModel& model, std::size_t band,
                     const Batch& batch) {
  if (band >= kNumBands) {
    throw BandCountMismatch("band index " + std::to_string(band) +
                            " out of range");
  }
  if (batch.empty()) throw EmptyBatch("band loss over an empty batch");
  ad::Tensor total;
  for (const PreparedSample* ps : batch) {
    check_prepared(*ps);
    const ad::Tensor out = model.nets[band].forward(ps->band_windows[band]);
    const ad::Tensor sq = squared_residual(out, ps->band_targets[band]);
    total = total ? ad::add(total, sq) : sq;
  }
  return ad::scalar_mul(total, 1.0 / static_cast<double>(batch.size()));
}

std::vector<ad::Tensor> loss_per_band(const WgnnModel& model,
                                      const Batch& batch) {
  std::vector<ad::Tensor> losses;
  losses.reserve(kNumBands);
  for (std::size_t k = 0; k < kNumBands; ++k) {
    losses.push_back(band_loss(model, k, batch));
  }
  return losses;
}

Regime parse_regime(const std::string& name) {
  if (name == "per_band") return Regime::per_band;
  if (name == "joint") return Regime::joint;
  throw Error("unknown training regime '" + name +
              "' (expected per_band|joint)");
}

Optimizer parse_optimizer(const std::string& name) {
  if (name == "adam") return Optimizer::adam;
  if (name == "sgd") return Optimizer::sgd;
  throw Error("unknown optimizer '" + name + "' (expected adam|sgd)");
}

std::string to_string(Regime r) {
  return r == Regime::per_band ? "per_band" : "joint";
}

std::string to_string(Optimizer o) {
  return o == Optimizer::adam ? "adam" : "sgd";
}

void TrainConfig::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw Error(std::string("train config: ") + what);
  };
  need(epochs >= 1, "epochs must be >= 1");
  need(batch_size >= 1, "batch_size must be >= 1");
  // Zero is the documented no-op limit; only negative rates are rejected.
  need(learning_rate >= 0.0, "learning_rate must be >= 0");
  need(std::isfinite(learning_rate), "learning_rate must be finite");
  need(clip_norm > 0.0, "clip_norm must be > 0");
  need(threads >= 1, "threads must be >= 1");
}

TrainResult train(WgnnModel& model,
                  const std::vector<PreparedSample>& train_samples,
                  const std::vector<PreparedSample>& val_samples,
                  const TrainConfig& cfg) {
  cfg.validate();
  validate_model(model);
  if (train_samples.empty()) throw EmptyBatch("no training samples");
  if (val_samples.empty()) throw EmptyBatch("no validation samples");
  for (const PreparedSample& ps : train_samples) check_prepared(ps);
  for (const PreparedSample& ps : val_samples) check_prepared(ps);

  TrainResult result;
  Rng root(cfg.seed);
  // All substreams forked up front: thread scheduling can never reorder
  // draws, so any --threads value reproduces the single-thread run.
  std::vector<Rng> band_rngs;
  for (std::size_t k = 0; k < kNumBands; ++k) band_rngs.push_back(root.fork(k));
  Rng joint_rng = root.fork(kNumBands);

  auto band_task = [&](std::size_t band) {
    const std::vector<ad::Tensor> params = model.nets[band].parameters();
    auto make_loss = [&, band](auto first, auto last) {
      Batch batch;
      batch.reserve(static_cast<std::size_t>(last - first));
      for (auto it = first; it != last; ++it) {
        batch.push_back(&train_samples[*it]);
      }
      return band_loss(model, band, batch);
    };
    auto eval_val = [&, band]() {
      return eval_band_val(model, band, val_samples);
    };
    run_phase(params, train_samples.size(), cfg, cfg.epochs, band_rngs[band],
              std::string("band ") + kBandNames[band], make_loss, eval_val,
              result.band_curves[band]);
  };

  auto joint_phase = [&](std::size_t epochs) {
    std::vector<ad::Tensor> params;
    for (const gtnet::GtNet& net : model.nets) {
      const std::vector<ad::Tensor> p = net.parameters();
      params.insert(params.end(), p.begin(), p.end());
    }
    auto make_loss = [&](auto first, auto last) {
      Batch batch;
      batch.reserve(static_cast<std::size_t>(last - first));
      for (auto it = first; it != last; ++it) {
        batch.push_back(&train_samples[*it]);
      }
      return loss_joint(model, batch);
    };
    auto eval_val = [&]() { return eval_joint_val(model, val_samples); };
    run_phase(params, train_samples.size(), cfg, epochs, joint_rng, "joint",
              make_loss, eval_val, result.joint_curve);
  };

  if (cfg.regime == Regime::per_band) {
    const std::size_t workers = std::min<std::size_t>(cfg.threads, kNumBands);
    if (workers <= 1) {
      for (std::size_t k = 0; k < kNumBands; ++k) band_task(k);
    } else {
      std::atomic<std::size_t> next{0};
      std::array<std::exception_ptr, kNumBands> failures{};
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
          while (true) {
            const std::size_t band = next.fetch_add(1);
            if (band >= kNumBands) return;
            try {
              band_task(band);
            } catch (...) {
              failures[band] = std::current_exception();
            }
          }
        });
      }
      for (std::thread& t : pool) t.join();
      for (std::size_t k = 0; k < kNumBands; ++k) {
        if (failures[k]) std::rethrow_exception(failures[k]);
      }
    }
    if (cfg.fine_tune_epochs > 0) joint_phase(cfg.fine_tune_epochs);
  } else {
    joint_phase(cfg.epochs);
  }

  result.final_val_loss = eval_joint_val(model, val_samples);
  return result;
}

std::vector<EpochLoss> train_single(
    gtnet::GtNet& net, const std::vector<ad::Tensor>& train_windows,
    const std::vector<std::vector<double>>& train_targets,
    const std::vector<ad::Tensor>& val_windows,
    const std::vector<std::vector<double>>& val_targets,
    const TrainConfig& cfg) {
  cfg.validate();
  if (train_windows.empty() || val_windows.empty()) {
    throw EmptyBatch("single-network training needs train and val samples");
  }
  if (train_windows.size() != train_targets.size() ||
      val_windows.size() != val_targets.size()) {
    throw Error("window and target counts differ");
  }

  const std::vector<ad::Tensor> params = net.parameters();
  auto make_loss = [&](auto first, auto last) {
    ad::Tensor total;
    for (auto it = first; it != last; ++it) {
      const ad::Tensor sq =
          squared_residual(net.forward(train_windows[*it]), train_targets[*it]);
      total = total ? ad::add(total, sq) : sq;
    }
    return ad::scalar_mul(total,
                          1.0 / static_cast<double>(last - first));
  };
  auto eval_val = [&]() {
    ad::NoGradGuard guard;
    double acc = 0.0;
    for (std::size_t i = 0; i < val_windows.size(); ++i) {
      const ad::Tensor out = net.forward(val_windows[i]);
      for (std::size_t j = 0; j < out->data.size(); ++j) {
        const double d = out->data[j] - val_targets[i][j];
        acc += d * d;
      }
    }
    return acc / static_cast<double>(val_windows.size());
  };

  std::vector<EpochLoss> curve;
  // Stream kNumBands + 1: disjoint from the band and joint streams, so the
  // ablation arms never share draws.
  run_phase(params, train_windows.size(), cfg, cfg.epochs,
            Rng(cfg.seed).fork(kNumBands + 1), "single", make_loss, eval_val,
            curve);
  return curve;
}

Forecast predict(const WgnnModel& model,
                 const std::vector<std::vector<double>>& physical_window) {
  validate_model(model);
  const std::size_t nodes = model.net_config.num_nodes;
  const std::size_t steps = model.net_config.window_len;
  check_window_shape(physical_window, nodes, steps);

  Forecast fc;
  std::vector<std::vector<double>> normalized(nodes);
  for (std::size_t c = 0; c < nodes; ++c) {
    const double lo = model.stats.mins[c];
    const double hi = model.stats.maxs[c];
    const double range = hi - lo;
    std::size_t outliers = 0;
    normalized[c].resize(steps);
    for (std::size_t i = 0; i < steps; ++i) {
      const double v = physical_window[c][i];
      if (v < lo - 0.1 * range || v > hi + 0.1 * range) ++outliers;
      normalized[c][i] = (v - lo) / range;
    }
    if (outliers > 0) {
      fc.warnings.push_back(
          "channel '" + model.input_names[c] + "': " +
          std::to_string(outliers) +
          " value(s) more than 10% outside the training range");
    }
  }

  const std::vector<double> out = wgnn_forward(model, normalized);
  const std::size_t target_stat = model.stats.mins.size() - 1;
  fc.swh.reserve(out.size());
  for (double v : out) {
    fc.swh.push_back(data::denormalize(model.stats, target_stat, v));
  }
  return fc;
}

void save_model(const std::string& path, const WgnnModel& model,
                const nlohmann::json& extra_meta) {
  validate_model(model);
  nlohmann::json meta;
  meta["format"] = "wgnn-bundle";
  meta["version"] = 1;
  meta["wavelet_order"] = model.wavelet_order;
  meta["extension_mode"] = dwt::to_string(model.mode);
  meta["levels"] = kLevels;
  meta["input_names"] = model.input_names;
  meta["stats"] = {{"names", model.stats.names},
                   {"mins", model.stats.mins},
                   {"maxs", model.stats.maxs}};
  const gtnet::GtNetConfig& nc = model.net_config;
  meta["net_config"] = {{"num_nodes", nc.num_nodes},
                        {"window_len", nc.window_len},
                        {"horizon", nc.horizon},
                        {"num_blocks", nc.num_blocks},
                        {"dilation", nc.dilation},
                        {"hidden_channels", nc.hidden_channels},
                        {"embed_dim", nc.embed_dim},
                        {"mixhop_depth", nc.mixhop_depth},
                        {"retain_ratio", nc.retain_ratio},
                        {"topk", nc.topk},
                        {"saturation", nc.saturation},
                        {"kernel_sizes", nc.kernel_sizes}};
  meta["extra"] = extra_meta;

  std::vector<std::pair<std::string, ad::Tensor>> tensors;
  for (std::size_t k = 0; k < kNumBands; ++k) {
    for (const auto& [name, tensor] : model.nets[k].named_parameters()) {
      tensors.emplace_back("band" + std::to_string(k) + "." + name, tensor);
    }
  }
  ckpt::save_checkpoint(path, meta, tensors);
}

LoadedModel load_model(const std::string& path) {
  const ckpt::Checkpoint ck = ckpt::load_checkpoint(path);
  const nlohmann::json& meta = ck.meta;
  try {
    if (meta.at("format").get<std::string>() != "wgnn-bundle") {
      throw BadBundle("'" + path + "' is not a model bundle");
    }
    if (meta.at("version").get<int>() != 1) {
      throw BadBundle("unsupported bundle version");
    }

    gtnet::GtNetConfig nc;
    const nlohmann::json& j = meta.at("net_config");
    nc.num_nodes = j.at("num_nodes").get<std::size_t>();
    nc.window_len = j.at("window_len").get<std::size_t>();
    nc.horizon = j.at("horizon").get<std::size_t>();
    nc.num_blocks = j.at("num_blocks").get<std::size_t>();
    nc.dilation = j.at("dilation").get<std::size_t>();
    nc.hidden_channels = j.at("hidden_channels").get<std::size_t>();
    nc.embed_dim = j.at("embed_dim").get<std::size_t>();
    nc.mixhop_depth = j.at("mixhop_depth").get<std::size_t>();
    nc.retain_ratio = j.at("retain_ratio").get<double>();
    nc.topk = j.at("topk").get<std::size_t>();
    nc.saturation = j.at("saturation").get<double>();
    nc.kernel_sizes = j.at("kernel_sizes").get<std::vector<std::size_t>>();

    data::NormStats stats;
    stats.names = meta.at("stats").at("names").get<std::vector<std::string>>();
    stats.mins = meta.at("stats").at("mins").get<std::vector<double>>();
    stats.maxs = meta.at("stats").at("maxs").get<std::vector<double>>();

    LoadedModel loaded{
        make_model(meta.at("wavelet_order").get<int>(),
                   dwt::parse_extension_mode(
                       meta.at("extension_mode").get<std::string>()),
                   nc,
                   meta.at("input_names").get<std::vector<std::string>>(),
                   stats, 0),
        meta.contains("extra") ? meta.at("extra") : nlohmann::json::object()};

    for (std::size_t k = 0; k < kNumBands; ++k) {
      for (const auto& [name, tensor] :
           loaded.model.nets[k].named_parameters()) {
        const ckpt::NamedTensor& saved =
            ck.find("band" + std::to_string(k) + "." + name);
        if (saved.shape != tensor->shape) {
          throw BadBundle("tensor '" + saved.name +
                          "' shape does not match the configured model");
        }
        tensor->data = saved.values;
      }
    }
    return loaded;
  } catch (const nlohmann::json::exception& e) {
    throw BadBundle("bundle header is malformed: " + std::string(e.what()));
  }
}

}  // namespace wavecast::wgnn
