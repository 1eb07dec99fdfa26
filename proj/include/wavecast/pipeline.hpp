#pragma once

#include <ostream>
#include <string>

#include "wavecast/error.hpp"
#include "wavecast/runconfig.hpp"

namespace wavecast::pipeline {

// Upstream failures are rethrown with a [stage] prefix so an operator can
// tell a parse problem from a training problem at a glance.
WAVECAST_DEFINE_ERROR(PipelineError);
WAVECAST_DEFINE_ERROR(MissingColumn);

// Output locations for a training run; all four files are written
// atomically.
struct TrainArtifacts {
  std::string checkpoint;
  std::string curves;
  std::string report;
  std::string predictions;
};

// Every command writes data to files only; `diag` carries progress and
// warnings (the CLI points it at stderr). All commands are deterministic
// given config + seed, and every artifact records the config hash.

// Generates the synthetic series and writes it in the canonical CSV schema.
void cmd_synth(const cfg::RunConfig& config, const std::string& out_path,
               std::ostream& diag);

// Decomposes one column into approximation and detail components at levels
// 1..3 and writes them alongside the original. Verifies that the four
// training bands sum back to the signal before anything is written.
void cmd_decompose(const cfg::RunConfig& config, const std::string& in_csv,
                   const std::string& column, const std::string& out_csv,
                   std::ostream& diag);

// Full pipeline: load -> split 6:2:2 -> normalize -> window -> train ->
// evaluate, producing a checkpoint, per-epoch loss curves, metric reports
// for all three splits plus persistence and ridge baselines, and the test
// predictions in meters.
void cmd_train(const cfg::RunConfig& config, const std::string& data_csv,
               const TrainArtifacts& artifacts, std::ostream& diag);

// Forecasts from the last window of a CSV using a saved checkpoint. Inputs
// outside the training range still forecast but warn on `diag`.
void cmd_predict(const cfg::RunConfig& config, const std::string& checkpoint,
                 const std::string& window_csv, const std::string& out_csv,
                 std::ostream& diag);

// Re-runs the evaluation stage of cmd_train against a saved checkpoint:
// same splits, metrics, and prediction CSV, no training.
void cmd_evaluate(const cfg::RunConfig& config, const std::string& checkpoint,
                  const std::string& data_csv, const std::string& report_out,
                  const std::string& predictions_out, std::ostream& diag);

// Checks analytic gradients of the four-network joint loss against central
// finite differences on a tiny model; prints a per-parameter-block table to
// `out` and returns pass/fail. `inject_fault` routes the loss through an
// operation with a deliberately wrong adjoint, which a healthy checker must
// catch.
bool cmd_gradcheck(const cfg::RunConfig& config, bool inject_fault,
                   std::ostream& out);

// Trains the band ensemble against the matched single-network baseline over
// config.ablation.seeds and writes the comparison report. data_csv may be
// empty: the benchmark series is then synthesized from the config.
void cmd_ablate(const cfg::RunConfig& config, const std::string& data_csv,
                const std::string& report_out, std::ostream& diag);

}  // namespace wavecast::pipeline
