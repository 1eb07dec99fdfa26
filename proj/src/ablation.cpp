#include "wavecast/ablation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "wavecast/eval.hpp"
#include "wavecast/rng.hpp"

namespace wavecast::eval {

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bool zero_variance(const std::vector<const std::vector<data::Sample>*>& splits,
                   std::size_t swh_channel) {
  bool first = true;
  double ref = 0.0;
  for (const auto* split : splits) {
    for (const data::Sample& s : *split) {
      for (const double v : s.window[swh_channel]) {
        if (first) {
          ref = v;
          first = false;
        } else if (v != ref) {
          return false;
        }
      }
      for (const double v : s.target) {
        if (first) {
          ref = v;
          first = false;
        } else if (v != ref) {
          return false;
        }
      }
    }
  }
  return true;
}

ad::Tensor sample_tensor(const data::Sample& s,
                         const std::vector<std::size_t>& channels) {
  std::vector<double> flat;
  flat.reserve(channels.size() * s.window.front().size());
  for (const std::size_t c : channels) {
    flat.insert(flat.end(), s.window[c].begin(), s.window[c].end());
  }
  return ad::make_tensor({channels.size(), s.window.front().size()},
                         std::move(flat));
}

AblationArm score_flat(const std::vector<double>& truth,
                       const std::vector<double>& pred) {
  AblationArm arm;
  arm.mse = mse(truth, pred);
  try {
    arm.r2 = r2(truth, pred);
  } catch (const ConstantTruth&) {
    arm.r2.reset();
  }
  return arm;
}

}  // namespace

nlohmann::json ablation_to_json(const AblationReport& report) {
  nlohmann::json j;
  j["median_reduction"] = report.median_reduction;
  j["degenerate_data"] = report.degenerate_data;
  j["wgnn_parameter_count"] = report.wgnn_parameter_count;
  j["gnn_parameter_count"] = report.gnn_parameter_count;
  j["wgnn_mse"] = nlohmann::json::array();
  j["gnn_mse"] = nlohmann::json::array();
  j["seeds"] = nlohmann::json::array();
  for (const AblationSeedResult& s : report.seeds) {
    nlohmann::json e;
    e["seed"] = s.seed;
    e["failed"] = s.failed;
    if (s.failed) {
      e["error"] = s.error;
    } else {
      e["wgnn"] = {{"mse", s.wgnn.mse}};
      e["gnn"] = {{"mse", s.gnn.mse}};
      if (s.wgnn.r2) e["wgnn"]["r2"] = *s.wgnn.r2;
      if (s.gnn.r2) e["gnn"]["r2"] = *s.gnn.r2;
      e["reduction"] = s.reduction;
      j["wgnn_mse"].push_back(s.wgnn.mse);
      j["gnn_mse"].push_back(s.gnn.mse);
    }
    j["seeds"].push_back(std::move(e));
  }
  return j;
}

AblationReport ablation_compare(const AblationDataset& dataset,
                                int wavelet_order, dwt::ExtensionMode mode,
                                const gtnet::GtNetConfig& net_config,
                                const wgnn::TrainConfig& train_config,
                                const std::vector<std::uint64_t>& seeds,
                                std::size_t threads) {
  if (seeds.size() < 3) {
    throw TooFewSeeds("ablation needs at least 3 seeds, got " +
                      std::to_string(seeds.size()));
  }
  net_config.validate();
  train_config.validate();

  AblationReport report;
  if (zero_variance({&dataset.train, &dataset.val, &dataset.test},
                    dataset.swh_channel)) {
    // Nothing to learn and no defined R^2 on either arm.
    report.degenerate_data = true;
    report.median_reduction = 0.0;
    return report;
  }

  gtnet::GtNetConfig gnn_config = net_config;
  gnn_config.hidden_channels *= 2;

  report.seeds.resize(seeds.size());
  report.wgnn_parameter_count =
      wgnn::kNumBands * gtnet::GtNet(net_config, 0).parameter_count();
  report.gnn_parameter_count = gtnet::GtNet(gnn_config, 0).parameter_count();

  const std::vector<double> test_truth = flatten_targets(dataset.test);

  // Seed-level trainers are fully independent: each builds its own models
  // and sample tensors, so worker threads never share autodiff state.
  auto seed_task = [&](std::size_t idx) {
    AblationSeedResult& r = report.seeds[idx];
    r.seed = seeds[idx];
    try {
      wgnn::TrainConfig tcfg = train_config;
      tcfg.seed = seeds[idx];
      tcfg.threads = 1;

      wgnn::WgnnModel model =
          wgnn::make_model(wavelet_order, mode, net_config,
                           dataset.input_names, dataset.stats, seeds[idx]);
      const auto train_prepared = wgnn::prepare_samples(
          model, dataset.train, dataset.input_channels, dataset.swh_channel);
      const auto val_prepared = wgnn::prepare_samples(
          model, dataset.val, dataset.input_channels, dataset.swh_channel);
      wgnn::train(model, train_prepared, val_prepared, tcfg);

      std::vector<double> wgnn_pred;
      for (const data::Sample& s : dataset.test) {
        std::vector<std::vector<double>> window;
        for (const std::size_t c : dataset.input_channels) {
          window.push_back(s.window[c]);
        }
        const std::vector<double> out = wgnn::wgnn_forward(model, window);
        wgnn_pred.insert(wgnn_pred.end(), out.begin(), out.end());
      }
      r.wgnn = score_flat(test_truth, wgnn_pred);

      gtnet::GtNet gnn(gnn_config, Rng(seeds[idx]).fork(7).next_u64());
      std::vector<ad::Tensor> train_w, val_w;
      std::vector<std::vector<double>> train_t, val_t;
      for (const data::Sample& s : dataset.train) {
        train_w.push_back(sample_tensor(s, dataset.input_channels));
        train_t.push_back(s.target);
      }
      for (const data::Sample& s : dataset.val) {
        val_w.push_back(sample_tensor(s, dataset.input_channels));
        val_t.push_back(s.target);
      }
      wgnn::train_single(gnn, train_w, train_t, val_w, val_t, tcfg);

      std::vector<double> gnn_pred;
      {
        ad::NoGradGuard guard;
        for (const data::Sample& s : dataset.test) {
          const ad::Tensor out =
              gnn.forward(sample_tensor(s, dataset.input_channels));
          gnn_pred.insert(gnn_pred.end(), out->data.begin(),
                          out->data.end());
        }
      }
      r.gnn = score_flat(test_truth, gnn_pred);
      r.reduction =
          r.gnn.mse > 0.0 ? (r.gnn.mse - r.wgnn.mse) / r.gnn.mse : 0.0;
    } catch (const std::exception& e) {
      r.failed = true;
      r.error = e.what();
    }
  };

  const std::size_t workers =
      std::max<std::size_t>(1, std::min(threads, seeds.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < seeds.size(); ++i) seed_task(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= seeds.size()) return;
          seed_task(i);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  std::vector<double> reductions;
  for (const AblationSeedResult& r : report.seeds) {
    if (!r.failed) reductions.push_back(r.reduction);
  }
  report.median_reduction = reductions.empty() ? 0.0 : median(reductions);
  return report;
}

}  // namespace wavecast::eval
