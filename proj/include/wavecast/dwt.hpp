#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wavecast/error.hpp"

namespace wavecast::dwt {

WAVECAST_DEFINE_ERROR(OrderOutOfRange);
WAVECAST_DEFINE_ERROR(SignalTooShort);
WAVECAST_DEFINE_ERROR(LengthMismatch);
WAVECAST_DEFINE_ERROR(TooManyLevels);
WAVECAST_DEFINE_ERROR(EmptyInput);

// How a finite signal is extended past its ends before filtering.
enum class ExtensionMode { symmetric, periodic, zero };

ExtensionMode parse_extension_mode(const std::string& name);
std::string to_string(ExtensionMode mode);

// Analysis/synthesis filter bank for one Daubechies family member.
// dec_hi[k] = (-1)^k dec_lo[2p-1-k]; rec filters are the time-reversed
// dec filters, so the bank is orthogonal and inverts exactly.
struct WaveletFilter {
  int order = 0;  // p in db-p; support length is 2p
  std::vector<double> dec_lo;
  std::vector<double> dec_hi;
  std::vector<double> rec_lo;
  std::vector<double> rec_hi;

  std::size_t length() const { return dec_lo.size(); }
};

// Filters for db1 through db10, minimum-phase convention.
WaveletFilter make_daubechies(int order);

// One analysis step: returns (approx, detail). Both outputs have length
// ceil(n/2) in periodic mode and floor((n + F - 1) / 2) in symmetric and
// zero modes, where F is the filter length; the extra boundary
// coefficients in the latter modes are what make the step exactly
// invertible for arbitrary n. Odd-length inputs are padded by one
// extension sample before downsampling.
std::pair<std::vector<double>, std::vector<double>> dwt_step(
    std::span<const double> signal, const WaveletFilter& filter,
    ExtensionMode mode);

// Inverse of dwt_step. target_len must reproduce the coefficient lengths
// under the same mode, otherwise LengthMismatch.
std::vector<double> idwt_step(std::span<const double> approx,
                              std::span<const double> detail,
                              const WaveletFilter& filter, ExtensionMode mode,
                              std::size_t target_len);

// Full-length band components of one signal: components[0] is the
// approximation band rA_L, components[1..L] are the detail bands
// rD_L ... rD_1. Each component has the original length and the
// components sum to the original signal to rounding error.
struct BandSet {
  int levels = 0;
  std::size_t original_length = 0;
  std::vector<std::vector<double>> components;

  const std::vector<double>& approx() const { return components.front(); }
  // Detail band at level k, 1 <= k <= levels.
  const std::vector<double>& detail(int k) const {
    return components[static_cast<std::size_t>(1 + levels - k)];
  }
};

BandSet band_decompose(std::span<const double> signal,
                       const WaveletFilter& filter, int levels,
                       ExtensionMode mode = ExtensionMode::symmetric);

// Decomposes each row of a channel-major matrix with shared settings.
std::vector<BandSet> band_decompose_multichannel(
    const std::vector<std::vector<double>>& channels,
    const WaveletFilter& filter, int levels,
    ExtensionMode mode = ExtensionMode::symmetric);

}  // namespace wavecast::dwt
