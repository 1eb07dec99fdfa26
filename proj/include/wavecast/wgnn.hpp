#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "wavecast/data.hpp"
#include "wavecast/dwt.hpp"
#include "wavecast/error.hpp"
#include "wavecast/gtnet.hpp"

namespace wavecast::wgnn {

WAVECAST_DEFINE_ERROR(WindowTooShort);
WAVECAST_DEFINE_ERROR(EmptyBatch);
WAVECAST_DEFINE_ERROR(BandCountMismatch);
WAVECAST_DEFINE_ERROR(DivergenceDetected);
WAVECAST_DEFINE_ERROR(BadBundle);

// Band layout shared by decomposition, networks, and targets: finest detail
// first, the final approximation last.
inline constexpr std::size_t kNumBands = 4;
inline constexpr std::size_t kLevels = 3;
inline constexpr std::array<const char*, kNumBands> kBandNames = {
    "rD1", "rD2", "rD3", "rA3"};

// Ensemble of one network per frequency band. Each network sees every input
// channel filtered to its own band; the forecast is the sum of the four
// band forecasts. stats covers the input channels in row order plus the SWH
// target as its final entry.
struct WgnnModel {
  int wavelet_order = 4;
  dwt::ExtensionMode mode = dwt::ExtensionMode::symmetric;
  gtnet::GtNetConfig net_config;
  std::vector<std::string> input_names;
  data::NormStats stats;
  dwt::WaveletFilter filter;
  std::vector<gtnet::GtNet> nets;  // kNumBands entries, kBandNames order
};

// Builds the filter, validates the config, and seeds the four networks from
// independent substreams of `seed`.
WgnnModel make_model(int wavelet_order, dwt::ExtensionMode mode,
                     const gtnet::GtNetConfig& net_config,
                     const std::vector<std::string>& input_names,
                     const data::NormStats& stats, std::uint64_t seed);

void validate_model(const WgnnModel& model);

// Normalized window [N][T] -> four band windows [band][N][T], kBandNames
// order. Reads nothing outside the window, so forecasts stay causal.
std::array<std::vector<std::vector<double>>, kNumBands> decompose_window(
    const std::vector<std::vector<double>>& window,
    const dwt::WaveletFilter& filter, dwt::ExtensionMode mode);

// Differentiable ensemble forward pass; the plain overload runs without
// recording a graph and returns the [h] forecast in normalized units.
ad::Tensor wgnn_forward_tensor(const WgnnModel& model,
                               const std::vector<std::vector<double>>& window);
std::vector<double> wgnn_forward(const WgnnModel& model,
                                 const std::vector<std::vector<double>>& window);

// A supervised sample with its decomposition precomputed so training never
// repeats wavelet work: band k of the window as a constant [N x T] tensor,
// plus band targets cut from the decomposed window+target SWH stretch.
struct PreparedSample {
  std::vector<ad::Tensor> band_windows;           // kNumBands x [N x T]
  std::vector<std::vector<double>> band_targets;  // kNumBands x [h]
  std::vector<double> target;                     // [h], composite
};

// input_channels selects and orders the window rows fed to the networks;
// swh_channel locates the target channel inside the sample window.
PreparedSample prepare_sample(const WgnnModel& model, const data::Sample& s,
                              const std::vector<std::size_t>& input_channels,
                              std::size_t swh_channel);
std::vector<PreparedSample> prepare_samples(
    const WgnnModel& model, const std::vector<data::Sample>& samples,
    const std::vector<std::size_t>& input_channels, std::size_t swh_channel);

using Batch = std::vector<const PreparedSample*>;
Batch full_batch(const std::vector<PreparedSample>& samples);

// Mean over the batch of the squared L2 residual of the summed forecast.
ad::Tensor loss_joint(const WgnnModel& model, const Batch& batch);

// Component k: mean squared L2 residual of network k against band target k.
// Each scalar's graph touches only its own network's parameters.
std::vector<ad::Tensor> loss_per_band(const WgnnModel& model,
                                      const Batch& batch);
ad::Tensor band_loss(const WgnnModel& model, std::size_t band,
                     const Batch& batch);

enum class Regime { per_band, joint };
enum class Optimizer { adam, sgd };
Regime parse_regime(const std::string& name);
Optimizer parse_optimizer(const std::string& name);
std::string to_string(Regime r);
std::string to_string(Optimizer o);

struct TrainConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 4;
  double learning_rate = 1e-3;
  Optimizer optimizer = Optimizer::adam;
  std::uint64_t seed = 42;
  Regime regime = Regime::per_band;
  double clip_norm = 5.0;
  // Joint epochs appended after per_band pretraining; 0 disables.
  std::size_t fine_tune_epochs = 0;
  std::size_t threads = 1;

  void validate() const;
};

struct EpochLoss {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  std::array<std::vector<EpochLoss>, kNumBands> band_curves;
  std::vector<EpochLoss> joint_curve;
  // Joint validation loss of the returned (best-validation) parameters.
  double final_val_loss = 0.0;
};

// Trains under cfg.regime, snapshotting the best validation parameters
// (the untrained state counts, so training can never end worse than it
// started on validation). Per-band trainers draw from substreams forked
// per band, which makes results independent of cfg.threads.
TrainResult train(WgnnModel& model,
                  const std::vector<PreparedSample>& train_samples,
                  const std::vector<PreparedSample>& val_samples,
                  const TrainConfig& cfg);

// Trains one bare network on (window tensor, target) pairs with the same
// shuffling, clipping, optimizer, and best-validation selection as band
// training. This is the no-wavelet arm of the ablation; regime and
// fine_tune_epochs are ignored.
std::vector<EpochLoss> train_single(
    gtnet::GtNet& net, const std::vector<ad::Tensor>& train_windows,
    const std::vector<std::vector<double>>& train_targets,
    const std::vector<ad::Tensor>& val_windows,
    const std::vector<std::vector<double>>& val_targets,
    const TrainConfig& cfg);

struct Forecast {
  std::vector<double> swh;  // meters
  std::vector<std::string> warnings;
};

// Physical-units window, rows ordered as model.input_names. Normalizes with
// the stored stats, forecasts, and denormalizes with the SWH stats. Inputs
// more than 10% of the training range outside it add a warning per channel.
Forecast predict(const WgnnModel& model,
                 const std::vector<std::vector<double>>& physical_window);

// Checkpoint bundle: wavelet setup, network config, channel stats, and all
// four networks' tensors; extra_meta rides along and comes back on load.
void save_model(const std::string& path, const WgnnModel& model,
                const nlohmann::json& extra_meta);

struct LoadedModel {
  WgnnModel model;
  nlohmann::json meta;
};

LoadedModel load_model(const std::string& path);

}  // namespace wavecast::wgnn
