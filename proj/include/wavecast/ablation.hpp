#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wavecast/data.hpp"
#include "wavecast/error.hpp"
#include "wavecast/wgnn.hpp"

namespace wavecast::eval {

WAVECAST_DEFINE_ERROR(TooFewSeeds);

// Windows split chronologically, already normalized; channel bookkeeping
// matches wgnn::prepare_sample.
struct AblationDataset {
  std::vector<data::Sample> train, val, test;
  std::vector<std::string> input_names;
  std::vector<std::size_t> input_channels;
  std::size_t swh_channel = 0;
  data::NormStats stats;  // input channels plus the SWH target last
};

struct AblationArm {
  double mse = 0.0;
  // Absent when the test targets are constant and r2 is undefined.
  std::optional<double> r2;
};

struct AblationSeedResult {
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  AblationArm wgnn, gnn;
  double reduction = 0.0;  // (gnn_mse - wgnn_mse) / gnn_mse
};

struct AblationReport {
  std::vector<AblationSeedResult> seeds;
  double median_reduction = 0.0;
  bool degenerate_data = false;
  std::size_t wgnn_parameter_count = 0;
  std::size_t gnn_parameter_count = 0;
};

nlohmann::json ablation_to_json(const AblationReport& report);

// Trains the band-ensemble model and a single network on the raw normalized
// channels once per seed and compares test MSE. The single network gets
// doubled hidden channels so the parameter budgets roughly match (reported
// exactly in the result). Zero-variance data short-circuits: both arms are
// degenerate and the reduction is 0. A failing seed is marked and does not
// abort the others. Seeds may run on `threads` workers; results are merged
// in seed order and do not depend on the thread count.
AblationReport ablation_compare(const AblationDataset& dataset,
                                int wavelet_order, dwt::ExtensionMode mode,
                                const gtnet::GtNetConfig& net_config,
                                const wgnn::TrainConfig& train_config,
                                const std::vector<std::uint64_t>& seeds,
                                std::size_t threads);

}  // namespace wavecast::eval
