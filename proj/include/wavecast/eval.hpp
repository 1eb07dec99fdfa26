#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wavecast/data.hpp"
#include "wavecast/error.hpp"

namespace wavecast::eval {

WAVECAST_DEFINE_ERROR(EmptyInput);
WAVECAST_DEFINE_ERROR(LengthMismatch);
WAVECAST_DEFINE_ERROR(ConstantTruth);
WAVECAST_DEFINE_ERROR(SingularSystem);
WAVECAST_DEFINE_ERROR(MissingSwhHistory);
WAVECAST_DEFINE_ERROR(BadReport);

double mse(const std::vector<double>& truth, const std::vector<double>& pred);

// Coefficient of determination 1 - SS_res / SS_tot. Needs at least two
// samples and a non-constant truth.
double r2(const std::vector<double>& truth, const std::vector<double>& pred);

// Repeats each window's most recent SWH value across the horizon. Output is
// flat, sample-major, matching the flattened sample targets.
std::vector<double> baseline_persistence(const std::vector<data::Sample>& samples,
                                         std::size_t swh_index);

std::vector<double> flatten_targets(const std::vector<data::Sample>& samples);

// Ridge regression with an unpenalized intercept: features and target are
// centered, (Xc' Xc + lambda I) w = Xc' y_c is solved by an in-house
// Cholesky factorization, and the intercept is recovered from the means. As
// lambda grows the prediction therefore tends to the training mean.
struct RidgeModel {
  std::vector<double> weights;
  double intercept = 0.0;
};

RidgeModel fit_ridge(const std::vector<std::vector<double>>& features,
                     const std::vector<double>& target, double lambda);

double ridge_predict(const RidgeModel& model, const std::vector<double>& x);

// One ridge model per horizon step, fit on flattened sample windows.
std::vector<RidgeModel> fit_ridge_per_step(
    const std::vector<data::Sample>& samples, double lambda);

std::vector<double> ridge_forecast(const std::vector<RidgeModel>& models,
                                   const std::vector<data::Sample>& samples);

std::vector<double> flatten_window(const data::Sample& sample);

// Evaluation summary for one model on one split.
struct MetricReport {
  std::string model;
  std::uint64_t seed = 0;
  std::string split;
  double mse = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
  std::string units = "meters";
  std::string config_hash;
};

std::string report_to_json(const MetricReport& report);
MetricReport report_from_json(const std::string& text);

WAVECAST_DEFINE_ERROR(BadPredictionFile);

// Plot-ready per-timestep pairs: `index,truth,prediction` with 17
// significant digits, optional '#' comment lines first.
void write_prediction_csv(const std::string& path,
                          const std::vector<double>& truth,
                          const std::vector<double>& pred,
                          const std::string& comment = "");

struct PredictionPairs {
  std::vector<double> truth;
  std::vector<double> pred;
};

PredictionPairs read_prediction_csv(const std::string& path);

}  // namespace wavecast::eval
