#include "wavecast/synth.hpp"

#include <algorithm>
#include <cmath>

#include "wavecast/rng.hpp"

namespace wavecast::synth {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;
constexpr std::int64_t kHour = 3600;
}  // namespace

void SynthConfig::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw BadSynthConfig(what);
  };
  need(length >= 2, "length must be >= 2");
  need(base_level >= 0.0, "base_level must be >= 0");
  need(seasonal_amp >= 0.0, "seasonal_amp must be >= 0");
  need(seasonal_period > 0.0, "seasonal_period must be > 0");
  need(tidal_amp >= 0.0, "tidal_amp must be >= 0");
  need(tidal_period > 0.0, "tidal_period must be > 0");
  need(storm_rate >= 0.0, "storm_rate must be >= 0");
  need(storm_amp >= 0.0, "storm_amp must be >= 0");
  need(storm_decay > 0.0, "storm_decay must be > 0");
  need(noise_std >= 0.0, "noise_std must be >= 0");
}

std::vector<data::BuoyRecord> generate(const SynthConfig& cfg) {
  cfg.validate();
  Rng root(cfg.seed);
  Rng storm_rng = root.fork(1);
  Rng noise_rng = root.fork(2);
  Rng wind_rng = root.fork(3);
  Rng dir_rng = root.fork(4);

  // SWH is produced wind_lag hours past the end so wind at t can read it.
  const std::size_t total = cfg.length + cfg.wind_lag;
  std::vector<double> swh(total);

  const double p_storm = std::min(1.0, cfg.storm_rate / 1000.0);
  const double decay = std::exp(-1.0 / cfg.storm_decay);
  double storm_state = 0.0;
  for (std::size_t t = 0; t < total; ++t) {
    storm_state *= decay;
    if (storm_rng.uniform() < p_storm) {
      storm_state += cfg.storm_amp * storm_rng.uniform(0.5, 1.5);
    }
    const double td = static_cast<double>(t);
    double v = cfg.base_level +
               cfg.seasonal_amp * std::sin(kTwoPi * td / cfg.seasonal_period) +
               cfg.tidal_amp * std::sin(kTwoPi * td / cfg.tidal_period) +
               storm_state + cfg.noise_std * noise_rng.normal();
    swh[t] = std::max(0.0, v);
  }

  std::vector<data::BuoyRecord> records(cfg.length);
  for (std::size_t t = 0; t < cfg.length; ++t) {
    data::BuoyRecord& r = records[t];
    r.timestamp = cfg.start_time + static_cast<std::int64_t>(t) * kHour;

    const double future = swh[t + cfg.wind_lag];
    r.avg_wind = std::max(0.0, 2.0 + 3.0 * future + 0.2 * wind_rng.normal());
    r.max_wind = r.avg_wind * (1.15 + 0.25 * wind_rng.uniform());

    const double td = static_cast<double>(t);
    double dir = 190.0 +
                 150.0 * std::sin(kTwoPi * td / cfg.seasonal_period + 0.8) +
                 12.0 * dir_rng.normal();
    dir = std::fmod(dir, 360.0);
    if (dir < 0.0) dir += 360.0;
    if (dir >= 360.0) dir = 0.0;
    r.wind_dir = dir;
    r.swh = swh[t];
  }
  return records;
}

}  // namespace wavecast::synth
