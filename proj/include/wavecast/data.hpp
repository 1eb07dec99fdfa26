#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wavecast/error.hpp"

namespace wavecast::data {

WAVECAST_DEFINE_ERROR(ParseError);
WAVECAST_DEFINE_ERROR(NonMonotonicTimestamps);
WAVECAST_DEFINE_ERROR(InvariantViolation);
WAVECAST_DEFINE_ERROR(DegenerateChannel);
WAVECAST_DEFINE_ERROR(TooFewRecords);
WAVECAST_DEFINE_ERROR(SplitTooShort);

// One hourly buoy observation. Invariants: avg_wind >= 0, max_wind >=
// avg_wind, wind_dir in [0, 360), swh >= 0.
struct BuoyRecord {
  std::int64_t timestamp = 0;  // seconds since the Unix epoch, hour-aligned
  double avg_wind = 0.0;       // m/s
  double max_wind = 0.0;       // m/s
  double wind_dir = 0.0;       // degrees
  double swh = 0.0;            // meters
  bool interpolated = false;   // true for gap-filled records
};

// Seconds since epoch for "YYYY-MM-DDTHH:MM:SS" (space separator accepted).
std::int64_t parse_iso8601(const std::string& text);
std::string format_iso8601(std::int64_t seconds);

// A loaded series: records plus the indices where a new contiguous segment
// begins (gaps longer than the interpolation limit split segments; windows
// never span them). segment_starts always begins with 0.
struct Series {
  std::vector<BuoyRecord> records;
  std::vector<std::size_t> segment_starts;
  std::size_t gaps_filled = 0;  // interpolated records inserted
};

// Hourly gaps of at most this many missing records are linearly
// interpolated; anything longer starts a new segment.
inline constexpr std::size_t kMaxInterpolatedGap = 6;

// Canonical schema: header `timestamp,avg_wind,max_wind,wind_dir,swh`,
// ISO-8601 timestamps. Leading lines starting with '#' are ignored, which
// lets writers stamp provenance comments.
Series load_csv(const std::string& path);

// Writes the canonical schema; comment (if nonempty) is emitted first as
// '#'-prefixed lines. Values are printed with 17 significant digits so a
// load -> write -> load round trip reproduces doubles bitwise.
void write_csv(const std::string& path, const std::vector<BuoyRecord>& records,
               const std::string& comment = "");

// Wind direction is circular; the sincos encoding replaces the raw degree
// channel with its sine and cosine.
enum class DirEncoding { degrees, sincos };
DirEncoding parse_dir_encoding(const std::string& name);
std::string to_string(DirEncoding enc);

// Channel-major view of a record list. swh is always the last channel.
struct ChannelMatrix {
  std::vector<std::string> names;
  std::vector<std::vector<double>> values;  // [channel][time]
  std::size_t swh_index = 0;

  std::size_t channels() const { return values.size(); }
  std::size_t length() const {
    return values.empty() ? 0 : values.front().size();
  }
};

ChannelMatrix build_channels(const std::vector<BuoyRecord>& records,
                             DirEncoding enc);

struct NormStats {
  std::vector<std::string> names;
  std::vector<double> mins;
  std::vector<double> maxs;
};

struct NormalizedChannels {
  ChannelMatrix matrix;  // x' = (x - min) / (max - min) per channel
  NormStats stats;
  // Entries outside [0,1] after scaling (possible outside the stats range).
  std::size_t out_of_unit = 0;
};

// Stats come from rows [stats_begin, stats_end) only; the whole matrix is
// scaled with them. Angular channels use fixed ranges (wind_dir [0,360),
// dir_sin/dir_cos [-1,1]) instead of observed extremes.
NormalizedChannels normalize(const ChannelMatrix& m, std::size_t stats_begin,
                             std::size_t stats_end);

double denormalize(const NormStats& stats, std::size_t channel, double value);

// Chronological 6:2:2 split: boundaries at floor(0.6 n) and floor(0.8 n).
struct DatasetSplits {
  std::size_t n = 0;
  std::size_t train_end = 0;
  std::size_t val_end = 0;

  std::size_t train_size() const { return train_end; }
  std::size_t val_size() const { return val_end - train_end; }
  std::size_t test_size() const { return n - val_end; }
};

DatasetSplits split_622(std::size_t n);

// One supervised sample: T steps of every channel plus the next h SWH
// values, all in the units of the matrix it was cut from.
struct Sample {
  std::size_t window_begin = 0;
  std::vector<std::vector<double>> window;  // [channel][T]
  std::vector<double> target;               // [h], SWH channel
};

// Stride-1 windows with both window and target inside [begin, end) and
// inside a single segment. Throws SplitTooShort when nothing fits.
std::vector<Sample> make_windows(const ChannelMatrix& m, std::size_t begin,
                                 std::size_t end,
                                 const std::vector<std::size_t>& segment_starts,
                                 std::size_t window_len, std::size_t horizon);

}  // namespace wavecast::data
