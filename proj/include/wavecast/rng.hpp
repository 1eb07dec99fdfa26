#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace wavecast {

// Deterministic 64-bit generator (splitmix64 core). Every source of
// randomness in the library goes through this class so that a given seed
// yields bitwise-identical streams on any platform and standard library.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53 random mantissa bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; caches the second deviate.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // 1 - uniform() lies in (0, 1], keeping the log argument positive.
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // Independent substream for a labelled task. Forks of the same (seed,
  // stream) pair coincide; distinct streams are decorrelated by the mixer.
  Rng fork(std::uint64_t stream) const {
    Rng mixer(state_ ^ (0xA0761D6478BD642Full * (stream + 1)));
    return Rng(mixer.next_u64());
  }

  // Fisher-Yates shuffle, biased by at most n / 2^64 per draw.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_u64() % i);
      std::swap(v[i - 1], v[j]);
    }
  }

private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace wavecast
