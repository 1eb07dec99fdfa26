#pragma once

#include <cstdint>
#include <vector>

#include "wavecast/data.hpp"
#include "wavecast/error.hpp"

namespace wavecast::synth {

WAVECAST_DEFINE_ERROR(BadSynthConfig);

// Hourly sea-state generator: SWH is a base level plus a seasonal swell
// cycle, a semidiurnal tidal oscillation, exponentially decaying storm
// pulses arriving as a Bernoulli process, and Gaussian noise, clipped at
// zero. Wind is an affine, noisy function of SWH `wind_lag` hours ahead, so
// wind leads waves.
struct SynthConfig {
  std::size_t length = 8760;  // hours (one year)
  double base_level = 1.2;    // meters
  double seasonal_amp = 0.8;
  double seasonal_period = 2190.0;  // hours (quarter year)
  double tidal_amp = 0.35;
  double tidal_period = 12.42;  // hours (principal lunar semidiurnal)
  double storm_rate = 2.0;      // expected storms per 1000 hours
  double storm_amp = 2.0;       // mean pulse height, meters
  double storm_decay = 18.0;    // e-folding time, hours
  double noise_std = 0.04;
  std::size_t wind_lag = 3;   // hours wind leads SWH
  std::uint64_t seed = 42;
  std::int64_t start_time = 1704067200;  // 2024-01-01T00:00:00

  void validate() const;
};

// Deterministic for a given config: every stochastic ingredient draws from
// its own forked substream, so changing one term never shifts the others.
std::vector<data::BuoyRecord> generate(const SynthConfig& cfg);

}  // namespace wavecast::synth
