#include "wavecast/data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace wavecast::data {

namespace {

constexpr std::int64_t kHour = 3600;
constexpr const char* kHeader = "timestamp,avg_wind,max_wind,wind_dir,swh";

// Howard Hinnant's civil-calendar conversions; valid across the full
// proleptic Gregorian range, far beyond any buoy archive.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m,
                     unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y += m <= 2;
}

bool is_leap(std::int64_t y) {
  return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0);
}

unsigned days_in_month(std::int64_t y, unsigned m) {
  static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30,
                                       31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return kDays[m - 1];
}

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double_field(const std::string& field, const char* name,
                          std::size_t line) {
  const std::string t = trim(field);
  if (t.empty()) {
    throw ParseError("line " + std::to_string(line) + ": empty " + name +
                     " field");
  }
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &pos);
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line) + ": cannot parse " +
                     name + " value '" + t + "'");
  }
  if (pos != t.size()) {
    throw ParseError("line " + std::to_string(line) + ": trailing characters"
                     " in " + name + " value '" + t + "'");
  }
  if (!std::isfinite(v)) {
    throw ParseError("line " + std::to_string(line) + ": non-finite " + name +
                     " value");
  }
  return v;
}

void check_record(const BuoyRecord& r, std::size_t index, std::size_t line) {
  const std::string where =
      "record " + std::to_string(index) + " (line " + std::to_string(line) +
      ")";
  if (r.avg_wind < 0.0) {
    throw InvariantViolation(where + ": avg_wind must be >= 0, got " +
                             std::to_string(r.avg_wind));
  }
  if (r.max_wind < r.avg_wind) {
    throw InvariantViolation(where + ": max_wind " +
                             std::to_string(r.max_wind) +
                             " below avg_wind " + std::to_string(r.avg_wind));
  }
  if (!(r.wind_dir >= 0.0 && r.wind_dir < 360.0)) {
    throw InvariantViolation(where + ": wind_dir must lie in [0, 360), got " +
                             std::to_string(r.wind_dir));
  }
  if (r.swh < 0.0) {
    throw InvariantViolation(where + ": swh must be >= 0, got " +
                             std::to_string(r.swh));
  }
}

double wrap_degrees(double d) {
  d = std::fmod(d, 360.0);
  if (d < 0.0) d += 360.0;
  if (d >= 360.0) d = 0.0;
  return d;
}

// Interpolates along the shorter arc of the circle, so 350 -> 10 passes
// through 0 rather than 180.
double interp_direction(double a, double b, double t) {
  double delta = std::fmod(b - a + 180.0, 360.0);
  if (delta < 0.0) delta += 360.0;
  delta -= 180.0;
  return wrap_degrees(a + t * delta);
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::int64_t parse_iso8601(const std::string& text) {
  const std::string t = trim(text);
  int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  char sep = 0;
  int consumed = 0;
  const int got =
      std::sscanf(t.c_str(), "%4d-%2d-%2d%c%2d:%2d:%2d%n", &year, &month,
                  &day, &sep, &hour, &minute, &second, &consumed);
  if (got != 7 || static_cast<std::size_t>(consumed) != t.size() ||
      (sep != 'T' && sep != ' ')) {
    throw ParseError("invalid ISO-8601 timestamp '" + t + "'");
  }
  if (month < 1 || month > 12 || day < 1 ||
      day > static_cast<int>(days_in_month(year, month)) || hour > 23 ||
      minute > 59 || second > 59 || hour < 0 || minute < 0 || second < 0) {
    throw ParseError("timestamp out of range '" + t + "'");
  }
  return days_from_civil(year, month, day) * 86400 + hour * 3600 +
         minute * 60 + second;
}

std::string format_iso8601(std::int64_t seconds) {
  std::int64_t days = seconds / 86400;
  std::int64_t rem = seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  std::int64_t year = 0;
  unsigned month = 0, day = 0;
  civil_from_days(days, year, month, day);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lld",
                static_cast<long long>(year), month, day,
                static_cast<long long>(rem / 3600),
                static_cast<long long>((rem / 60) % 60),
                static_cast<long long>(rem % 60));
  return buf;
}

Series load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");

  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t != kHeader) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected header '" + std::string(kHeader) +
                       "', got '" + t + "'");
    }
    saw_header = true;
    break;
  }
  if (!saw_header) throw ParseError("'" + path + "' has no header row");

  Series series;
  series.segment_starts.push_back(0);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;

    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    if (fields.size() != 5) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 5 "
                       "fields, got " + std::to_string(fields.size()));
    }

    BuoyRecord r;
    try {
      r.timestamp = parse_iso8601(fields[0]);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
    r.avg_wind = parse_double_field(fields[1], "avg_wind", line_no);
    r.max_wind = parse_double_field(fields[2], "max_wind", line_no);
    r.wind_dir = parse_double_field(fields[3], "wind_dir", line_no);
    r.swh = parse_double_field(fields[4], "swh", line_no);
    check_record(r, series.records.size(), line_no);

    if (!series.records.empty()) {
      // By value: the fill loop below grows the vector, which would
      // invalidate a reference.
      const BuoyRecord prev = series.records.back();
      const std::int64_t dt = r.timestamp - prev.timestamp;
      if (dt <= 0) {
        throw NonMonotonicTimestamps(
            "line " + std::to_string(line_no) + ": timestamp " +
            format_iso8601(r.timestamp) + " does not advance past " +
            format_iso8601(prev.timestamp));
      }
      if (dt % kHour != 0) {
        throw InvariantViolation("line " + std::to_string(line_no) +
                                 ": timestamps must be hour-aligned; step of " +
                                 std::to_string(dt) + " s");
      }
      const std::size_t missing = static_cast<std::size_t>(dt / kHour) - 1;
      if (missing > kMaxInterpolatedGap) {
        series.segment_starts.push_back(series.records.size());
      } else if (missing > 0) {
        for (std::size_t k = 1; k <= missing; ++k) {
          const double f =
              static_cast<double>(k) / static_cast<double>(missing + 1);
          BuoyRecord fill;
          fill.timestamp = prev.timestamp + static_cast<std::int64_t>(k) *
                                                kHour;
          fill.avg_wind = prev.avg_wind + f * (r.avg_wind - prev.avg_wind);
          fill.max_wind = prev.max_wind + f * (r.max_wind - prev.max_wind);
          fill.wind_dir = interp_direction(prev.wind_dir, r.wind_dir, f);
          fill.swh = prev.swh + f * (r.swh - prev.swh);
          fill.interpolated = true;
          if (fill.max_wind < fill.avg_wind) fill.max_wind = fill.avg_wind;
          series.records.push_back(fill);
          ++series.gaps_filled;
        }
      }
    }
    series.records.push_back(r);
  }
  if (series.records.empty()) {
    throw TooFewRecords("'" + path + "' contains no data rows");
  }
  return series;
}

void write_csv(const std::string& path, const std::vector<BuoyRecord>& records,
               const std::string& comment) {
  std::ostringstream out;
  if (!comment.empty()) {
    std::stringstream cs(comment);
    std::string cl;
    while (std::getline(cs, cl)) out << "# " << cl << "\n";
  }
  out << kHeader << "\n";
  for (const BuoyRecord& r : records) {
    out << format_iso8601(r.timestamp) << ',' << format_g17(r.avg_wind) << ','
        << format_g17(r.max_wind) << ',' << format_g17(r.wind_dir) << ','
        << format_g17(r.swh) << "\n";
  }

  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::trunc);
    if (!f) throw ParseError("cannot open '" + tmp + "' for writing");
    f << out.str();
    if (!f) throw ParseError("write to '" + tmp + "' failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw ParseError("cannot move '" + tmp + "' into place");
  }
}

DirEncoding parse_dir_encoding(const std::string& name) {
  if (name == "degrees") return DirEncoding::degrees;
  if (name == "sincos") return DirEncoding::sincos;
  throw ParseError("unknown wind_dir encoding '" + name +
                   "' (expected degrees|sincos)");
}

std::string to_string(DirEncoding enc) {
  return enc == DirEncoding::degrees ? "degrees" : "sincos";
}

ChannelMatrix build_channels(const std::vector<BuoyRecord>& records,
                             DirEncoding enc) {
  if (records.empty()) throw TooFewRecords("no records to build channels");
  ChannelMatrix m;
  const std::size_t n = records.size();
  constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
  if (enc == DirEncoding::degrees) {
    m.names = {"avg_wind", "max_wind", "wind_dir", "swh"};
    m.values.assign(4, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      m.values[0][i] = records[i].avg_wind;
      m.values[1][i] = records[i].max_wind;
      m.values[2][i] = records[i].wind_dir;
      m.values[3][i] = records[i].swh;
    }
  } else {
    m.names = {"avg_wind", "max_wind", "dir_sin", "dir_cos", "swh"};
    m.values.assign(5, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      m.values[0][i] = records[i].avg_wind;
      m.values[1][i] = records[i].max_wind;
      m.values[2][i] = std::sin(records[i].wind_dir * kDegToRad);
      m.values[3][i] = std::cos(records[i].wind_dir * kDegToRad);
      m.values[4][i] = records[i].swh;
    }
  }
  m.swh_index = m.values.size() - 1;
  return m;
}

NormalizedChannels normalize(const ChannelMatrix& m, std::size_t stats_begin,
                             std::size_t stats_end) {
  if (stats_begin >= stats_end || stats_end > m.length()) {
    throw InvariantViolation("normalization range [" +
                             std::to_string(stats_begin) + ", " +
                             std::to_string(stats_end) +
                             ") invalid for length " +
                             std::to_string(m.length()));
  }
  NormalizedChannels out;
  out.matrix = m;
  out.stats.names = m.names;
  out.stats.mins.resize(m.channels());
  out.stats.maxs.resize(m.channels());

  for (std::size_t c = 0; c < m.channels(); ++c) {
    double lo, hi;
    if (m.names[c] == "wind_dir") {
      lo = 0.0;
      hi = 360.0;
    } else if (m.names[c] == "dir_sin" || m.names[c] == "dir_cos") {
      lo = -1.0;
      hi = 1.0;
    } else {
      lo = m.values[c][stats_begin];
      hi = lo;
      for (std::size_t i = stats_begin + 1; i < stats_end; ++i) {
        lo = std::min(lo, m.values[c][i]);
        hi = std::max(hi, m.values[c][i]);
      }
      if (!(hi > lo)) {
        throw DegenerateChannel("channel '" + m.names[c] +
                                "' is constant (" + format_g17(lo) +
                                ") over the normalization range");
      }
    }
    out.stats.mins[c] = lo;
    out.stats.maxs[c] = hi;
    // Plain division, not a cached reciprocal: every normalization site in
    // the library must produce bitwise-identical values for the same stats.
    const double range = hi - lo;
    for (std::size_t i = 0; i < m.length(); ++i) {
      const double v = (m.values[c][i] - lo) / range;
      out.matrix.values[c][i] = v;
      if (v < 0.0 || v > 1.0) ++out.out_of_unit;
    }
  }
  return out;
}

double denormalize(const NormStats& stats, std::size_t channel, double value) {
  if (channel >= stats.mins.size()) {
    throw InvariantViolation("channel index " + std::to_string(channel) +
                             " out of range for " +
                             std::to_string(stats.mins.size()) + " channels");
  }
  return stats.mins[channel] +
         value * (stats.maxs[channel] - stats.mins[channel]);
}

DatasetSplits split_622(std::size_t n) {
  if (n < 10) {
    throw TooFewRecords("need at least 10 records to split 6:2:2, got " +
                        std::to_string(n));
  }
  DatasetSplits s;
  s.n = n;
  s.train_end = (n * 6) / 10;
  s.val_end = (n * 8) / 10;
  return s;
}

std::vector<Sample> make_windows(const ChannelMatrix& m, std::size_t begin,
                                 std::size_t end,
                                 const std::vector<std::size_t>& segment_starts,
                                 std::size_t window_len, std::size_t horizon) {
  if (window_len < 1 || horizon < 1) {
    throw InvariantViolation("window_len and horizon must be >= 1");
  }
  if (end > m.length() || begin > end) {
    throw InvariantViolation("window range [" + std::to_string(begin) + ", " +
                             std::to_string(end) + ") invalid for length " +
                             std::to_string(m.length()));
  }
  const std::size_t span = window_len + horizon;
  std::vector<Sample> samples;
  for (std::size_t ws = begin; ws + span <= end; ++ws) {
    // Last segment start at or before ws; the sample must end before the
    // next segment begins.
    std::size_t seg_end = m.length();
    for (std::size_t s : segment_starts) {
      if (s > ws) {
        seg_end = s;
        break;
      }
    }
    if (ws + span > seg_end) continue;

    Sample sample;
    sample.window_begin = ws;
    sample.window.resize(m.channels());
    for (std::size_t c = 0; c < m.channels(); ++c) {
      sample.window[c].assign(m.values[c].begin() + ws,
                              m.values[c].begin() + ws + window_len);
    }
    sample.target.assign(m.values[m.swh_index].begin() + ws + window_len,
                         m.values[m.swh_index].begin() + ws + span);
    samples.push_back(std::move(sample));
  }
  if (samples.empty()) {
    throw SplitTooShort("no window of " + std::to_string(window_len) + "+" +
                        std::to_string(horizon) +
                        " steps fits in split of size " +
                        std::to_string(end - begin));
  }
  return samples;
}

}  // namespace wavecast::data
