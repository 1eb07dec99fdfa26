#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wavecast/pipeline.hpp"
#include "wavecast/runconfig.hpp"

namespace {

using wavecast::cfg::RunConfig;

// Flag values land here first; anything the user actually typed then
// overrides the config file (flags win).
struct Flags {
  RunConfig defaults;  // source of the printed default strings

  std::string config_file;
  std::uint64_t seed = 0;
  std::size_t epochs = 0, batch_size = 0, threads = 0, fine_tune_epochs = 0;
  double learning_rate = 0.0, clip_norm = 0.0, ridge_lambda = 0.0;
  std::string optimizer, regime, encoding, mode;
  int wavelet_order = 0;
  std::size_t window_len = 0, horizon = 0;
  bool use_swh_input = false;
  std::size_t synth_length = 0;
  std::uint64_t synth_seed = 0;
  double storm_rate = 0.0, noise_std = 0.0;
  std::vector<std::uint64_t> ablation_seeds;
  std::size_t ablation_records = 0, ablation_epochs = 0;
  std::size_t ablation_fine_tune_epochs = 0, ablation_wind_lag = 0;
};

// Adds the options shared by every subcommand. Each option remembers its
// CLI11 handle so apply() can tell "user typed it" from "default".
struct Common {
  CLI::Option *o_seed, *o_epochs, *o_batch, *o_threads, *o_ft, *o_lr, *o_clip,
      *o_opt, *o_regime, *o_enc, *o_mode, *o_order, *o_window, *o_horizon,
      *o_swh, *o_ridge, *o_slen, *o_sseed, *o_storm, *o_noise, *o_aseeds,
      *o_arec, *o_aepochs, *o_aft, *o_alag;

  Common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config_file,
                    "JSON config file; flags override its values");
    o_seed = cmd->add_option("--seed", f.seed, "training seed")
                 ->default_val(f.defaults.train.seed);
    o_epochs = cmd->add_option("--epochs", f.epochs, "training epochs")
                   ->default_val(f.defaults.train.epochs);
    o_batch = cmd->add_option("--batch-size", f.batch_size, "minibatch size")
                  ->default_val(f.defaults.train.batch_size);
    o_threads = cmd->add_option("--threads", f.threads,
                                "worker threads (per-band training, "
                                "per-seed ablation); never changes results")
                    ->default_val(f.defaults.train.threads);
    o_ft = cmd->add_option("--fine-tune-epochs", f.fine_tune_epochs,
                           "joint epochs after per-band training")
               ->default_val(f.defaults.train.fine_tune_epochs);
    o_lr = cmd->add_option("--learning-rate", f.learning_rate, "step size")
               ->default_val(f.defaults.train.learning_rate);
    o_clip = cmd->add_option("--clip-norm", f.clip_norm,
                             "global gradient norm cap")
                 ->default_val(f.defaults.train.clip_norm);
    o_opt = cmd->add_option("--optimizer", f.optimizer, "adam|sgd")
                ->default_val(f.defaults.train.optimizer);
    o_regime = cmd->add_option("--regime", f.regime, "per_band|joint")
                   ->default_val(f.defaults.train.regime);
    o_enc = cmd->add_option("--dir-encoding", f.encoding,
                            "wind direction encoding: degrees|sincos")
                ->default_val(f.defaults.model.dir_encoding);
    o_mode = cmd->add_option("--extension-mode", f.mode,
                             "wavelet boundary handling: "
                             "symmetric|periodic|zero")
                 ->default_val(f.defaults.wavelet.mode);
    o_order = cmd->add_option("--wavelet-order", f.wavelet_order,
                              "Daubechies order (1-10)")
                  ->default_val(f.defaults.wavelet.order);
    o_window = cmd->add_option("--window-len", f.window_len,
                               "input window length, hours")
                   ->default_val(f.defaults.model.window_len);
    o_horizon = cmd->add_option("--horizon", f.horizon,
                                "forecast horizon, hours")
                    ->default_val(f.defaults.model.horizon);
    o_swh = cmd->add_flag("--use-swh-input", f.use_swh_input,
                          "feed SWH history to the networks as well");
    o_ridge = cmd->add_option("--ridge-lambda", f.ridge_lambda,
                              "ridge baseline regularization")
                  ->default_val(f.defaults.eval.ridge_lambda);
    o_slen = cmd->add_option("--length", f.synth_length,
                             "synthetic series length, hours")
                 ->default_val(f.defaults.synth.length);
    o_sseed = cmd->add_option("--synth-seed", f.synth_seed,
                              "synthetic generator seed")
                  ->default_val(f.defaults.synth.seed);
    o_storm = cmd->add_option("--storm-rate", f.storm_rate,
                              "storms per 1000 hours")
                  ->default_val(f.defaults.synth.storm_rate);
    o_noise = cmd->add_option("--noise-std", f.noise_std,
                              "observation noise, meters")
                  ->default_val(f.defaults.synth.noise_std);
    o_aseeds = cmd->add_option("--ablation-seeds", f.ablation_seeds,
                               "seeds for the ablation (3 or more)")
                   ->delimiter(',');
    o_arec = cmd->add_option("--ablation-records", f.ablation_records,
                             "benchmark series length")
                 ->default_val(f.defaults.ablation.records);
    o_aepochs = cmd->add_option("--ablation-epochs", f.ablation_epochs,
                                "epochs per ablation run")
                    ->default_val(f.defaults.ablation.epochs);
    o_aft = cmd->add_option("--ablation-fine-tune-epochs",
                            f.ablation_fine_tune_epochs,
                            "joint fine-tune epochs, ensemble arm only")
                ->default_val(f.defaults.ablation.fine_tune_epochs);
    o_alag = cmd->add_option("--ablation-wind-lag", f.ablation_wind_lag,
                             "benchmark wind lead, hours")
                 ->default_val(f.defaults.ablation.wind_lag);
  }

  RunConfig apply(const Flags& f) const {
    RunConfig c = f.config_file.empty()
                      ? RunConfig{}
                      : wavecast::cfg::load_runconfig(f.config_file);
    if (o_seed->count()) c.train.seed = f.seed;
    if (o_epochs->count()) c.train.epochs = f.epochs;
    if (o_batch->count()) c.train.batch_size = f.batch_size;
    if (o_threads->count()) c.train.threads = f.threads;
    if (o_ft->count()) c.train.fine_tune_epochs = f.fine_tune_epochs;
    if (o_lr->count()) c.train.learning_rate = f.learning_rate;
    if (o_clip->count()) c.train.clip_norm = f.clip_norm;
    if (o_opt->count()) c.train.optimizer = f.optimizer;
    if (o_regime->count()) c.train.regime = f.regime;
    if (o_enc->count()) c.model.dir_encoding = f.encoding;
    if (o_mode->count()) c.wavelet.mode = f.mode;
    if (o_order->count()) c.wavelet.order = f.wavelet_order;
    if (o_window->count()) c.model.window_len = f.window_len;
    if (o_horizon->count()) c.model.horizon = f.horizon;
    if (o_swh->count()) c.model.use_swh_input = f.use_swh_input;
    if (o_ridge->count()) c.eval.ridge_lambda = f.ridge_lambda;
    if (o_slen->count()) c.synth.length = f.synth_length;
    if (o_sseed->count()) c.synth.seed = f.synth_seed;
    if (o_storm->count()) c.synth.storm_rate = f.storm_rate;
    if (o_noise->count()) c.synth.noise_std = f.noise_std;
    if (o_aseeds->count()) c.ablation.seeds = f.ablation_seeds;
    if (o_arec->count()) c.ablation.records = f.ablation_records;
    if (o_aepochs->count()) c.ablation.epochs = f.ablation_epochs;
    if (o_aft->count()) {
      c.ablation.fine_tune_epochs = f.ablation_fine_tune_epochs;
    }
    if (o_alag->count()) c.ablation.wind_lag = f.ablation_wind_lag;
    return c;
  }
};

std::string resolve(const CLI::Option* opt, const std::string& flag_value,
                    const std::string& config_value) {
  return opt->count() ? flag_value : config_value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wavelet-band graph network forecaster for significant wave "
               "height"};
  app.require_subcommand(1);

  Flags f;

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic buoy CSV");
  Common synth_common(synth, f);
  std::string synth_out = f.defaults.paths.data;
  auto* o_synth_out =
      synth->add_option("--out", synth_out, "output CSV path")
          ->default_val(f.defaults.paths.data);

  // decompose
  auto* decompose = app.add_subcommand(
      "decompose", "split one column into wavelet band components");
  Common decompose_common(decompose, f);
  std::string dec_in = f.defaults.paths.data;
  std::string dec_col = f.defaults.paths.column;
  std::string dec_out = f.defaults.paths.bands;
  auto* o_dec_in = decompose->add_option("--in", dec_in, "input CSV")
                       ->default_val(f.defaults.paths.data);
  auto* o_dec_col =
      decompose
          ->add_option("--column", dec_col,
                       "column to decompose: avg_wind|max_wind|wind_dir|swh")
          ->default_val(f.defaults.paths.column);
  auto* o_dec_out = decompose->add_option("--out", dec_out, "output CSV")
                        ->default_val(f.defaults.paths.bands);

  // train
  auto* train = app.add_subcommand(
      "train", "train the model and evaluate every split");
  Common train_common(train, f);
  std::string tr_data = f.defaults.paths.data;
  wavecast::pipeline::TrainArtifacts tr{
      f.defaults.paths.checkpoint, f.defaults.paths.curves,
      f.defaults.paths.report, f.defaults.paths.predictions};
  auto* o_tr_data = train->add_option("--data", tr_data, "training CSV")
                        ->default_val(f.defaults.paths.data);
  auto* o_tr_ckpt =
      train->add_option("--checkpoint", tr.checkpoint, "checkpoint path")
          ->default_val(f.defaults.paths.checkpoint);
  auto* o_tr_curves =
      train->add_option("--curves", tr.curves, "per-epoch loss CSV")
          ->default_val(f.defaults.paths.curves);
  auto* o_tr_report =
      train->add_option("--report", tr.report, "metrics JSON")
          ->default_val(f.defaults.paths.report);
  auto* o_tr_pred =
      train
          ->add_option("--predictions", tr.predictions,
                       "test predictions CSV (meters)")
          ->default_val(f.defaults.paths.predictions);

  // predict
  auto* predict = app.add_subcommand(
      "predict", "forecast from the last window of a CSV");
  Common predict_common(predict, f);
  std::string pr_ckpt = f.defaults.paths.checkpoint;
  std::string pr_window = f.defaults.paths.data;
  std::string pr_out = f.defaults.paths.forecast;
  auto* o_pr_ckpt =
      predict->add_option("--checkpoint", pr_ckpt, "trained model bundle")
          ->default_val(f.defaults.paths.checkpoint);
  auto* o_pr_window =
      predict->add_option("--window", pr_window, "CSV holding the window")
          ->default_val(f.defaults.paths.data);
  auto* o_pr_out = predict->add_option("--out", pr_out, "forecast CSV")
                       ->default_val(f.defaults.paths.forecast);

  // evaluate
  auto* evaluate = app.add_subcommand(
      "evaluate", "re-evaluate a checkpoint against a CSV");
  Common evaluate_common(evaluate, f);
  std::string ev_ckpt = f.defaults.paths.checkpoint;
  std::string ev_data = f.defaults.paths.data;
  std::string ev_report = f.defaults.paths.report;
  std::string ev_pred = f.defaults.paths.predictions;
  auto* o_ev_ckpt =
      evaluate->add_option("--checkpoint", ev_ckpt, "trained model bundle")
          ->default_val(f.defaults.paths.checkpoint);
  auto* o_ev_data = evaluate->add_option("--data", ev_data, "evaluation CSV")
                        ->default_val(f.defaults.paths.data);
  auto* o_ev_report =
      evaluate->add_option("--report", ev_report, "metrics JSON")
          ->default_val(f.defaults.paths.report);
  auto* o_ev_pred =
      evaluate
          ->add_option("--predictions", ev_pred,
                       "test predictions CSV (meters)")
          ->default_val(f.defaults.paths.predictions);

  // gradcheck
  auto* gradcheck = app.add_subcommand(
      "gradcheck", "compare analytic gradients with finite differences");
  Common gradcheck_common(gradcheck, f);
  bool inject_fault = false;
  gradcheck
      ->add_flag("--inject-gradient-fault", inject_fault,
                 "route the loss through a wrong adjoint (checker self-test)")
      ->group("");  // hidden: a testing hook, not an operator knob

  // ablate
  auto* ablate = app.add_subcommand(
      "ablate", "compare the band ensemble against a single network");
  Common ablate_common(ablate, f);
  std::string ab_data;
  std::string ab_out = f.defaults.paths.ablation_report;
  ablate->add_option("--data", ab_data,
                     "benchmark CSV (omit to synthesize one)");
  auto* o_ab_out =
      ablate->add_option("--out", ab_out, "ablation report JSON")
          ->default_val(f.defaults.paths.ablation_report);

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      const RunConfig c = synth_common.apply(f);
      wavecast::pipeline::cmd_synth(
          c, resolve(o_synth_out, synth_out, c.paths.data), std::cerr);
    } else if (decompose->parsed()) {
      const RunConfig c = decompose_common.apply(f);
      wavecast::pipeline::cmd_decompose(
          c, resolve(o_dec_in, dec_in, c.paths.data),
          resolve(o_dec_col, dec_col, c.paths.column),
          resolve(o_dec_out, dec_out, c.paths.bands), std::cerr);
    } else if (train->parsed()) {
      const RunConfig c = train_common.apply(f);
      wavecast::pipeline::TrainArtifacts artifacts{
          resolve(o_tr_ckpt, tr.checkpoint, c.paths.checkpoint),
          resolve(o_tr_curves, tr.curves, c.paths.curves),
          resolve(o_tr_report, tr.report, c.paths.report),
          resolve(o_tr_pred, tr.predictions, c.paths.predictions)};
      wavecast::pipeline::cmd_train(
          c, resolve(o_tr_data, tr_data, c.paths.data), artifacts, std::cerr);
    } else if (predict->parsed()) {
      const RunConfig c = predict_common.apply(f);
      wavecast::pipeline::cmd_predict(
          c, resolve(o_pr_ckpt, pr_ckpt, c.paths.checkpoint),
          resolve(o_pr_window, pr_window, c.paths.data),
          resolve(o_pr_out, pr_out, c.paths.forecast), std::cerr);
    } else if (evaluate->parsed()) {
      const RunConfig c = evaluate_common.apply(f);
      wavecast::pipeline::cmd_evaluate(
          c, resolve(o_ev_ckpt, ev_ckpt, c.paths.checkpoint),
          resolve(o_ev_data, ev_data, c.paths.data),
          resolve(o_ev_report, ev_report, c.paths.report),
          resolve(o_ev_pred, ev_pred, c.paths.predictions), std::cerr);
    } else if (gradcheck->parsed()) {
      const RunConfig c = gradcheck_common.apply(f);
      if (!wavecast::pipeline::cmd_gradcheck(c, inject_fault, std::cout)) {
        return 1;
      }
    } else if (ablate->parsed()) {
      const RunConfig c = ablate_common.apply(f);
      wavecast::pipeline::cmd_ablate(
          c, ab_data, resolve(o_ab_out, ab_out, c.paths.ablation_report),
          std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
