#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "wavecast/data.hpp"
#include "wavecast/synth.hpp"

using namespace wavecast;
using data::BuoyRecord;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("wavecast_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::trunc);
  f << text;
}

std::string rows_csv(const std::vector<std::string>& rows) {
  std::string out = "timestamp,avg_wind,max_wind,wind_dir,swh\n";
  for (const auto& r : rows) out += r + "\n";
  return out;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// Plain-DFT power spectrum of the mean-removed signal, bins 1 .. n/2.
std::vector<double> periodogram(const std::vector<double>& x) {
  const std::size_t n = x.size();
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  const double w = 2.0 * 3.14159265358979323846 / static_cast<double>(n);
  std::vector<double> power(n / 2);
  for (std::size_t k = 1; k <= n / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = w * static_cast<double>(k) * static_cast<double>(t);
      re += (x[t] - mean) * std::cos(ang);
      im -= (x[t] - mean) * std::sin(ang);
    }
    power[k - 1] = re * re + im * im;
  }
  return power;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_CASE("iso8601 parsing matches known epochs and formats back") {
  CHECK(data::parse_iso8601("1970-01-01T00:00:00") == 0);
  CHECK(data::parse_iso8601("2024-01-01T00:00:00") == 1704067200);
  CHECK(data::parse_iso8601("2024-01-01 00:00:00") == 1704067200);
  CHECK(data::parse_iso8601("2024-02-29T12:30:05") ==
        1704067200 + (31 + 28) * 86400 + 12 * 3600 + 30 * 60 + 5);
  CHECK(data::format_iso8601(0) == "1970-01-01T00:00:00");
  CHECK(data::format_iso8601(1704067200) == "2024-01-01T00:00:00");

  for (const char* s : {"2023-06-15T07:00:00", "1999-12-31T23:59:59",
                        "2100-02-28T00:00:00", "1969-07-20T20:17:40"}) {
    CHECK(data::format_iso8601(data::parse_iso8601(s)) == s);
  }
}

TEST_CASE("iso8601 rejects malformed and impossible timestamps") {
  CHECK_THROWS_AS(data::parse_iso8601("2023-02-29T00:00:00"),
                  data::ParseError);
  CHECK_THROWS_AS(data::parse_iso8601("2023-13-01T00:00:00"),
                  data::ParseError);
  CHECK_THROWS_AS(data::parse_iso8601("2023-04-31T00:00:00"),
                  data::ParseError);
  CHECK_THROWS_AS(data::parse_iso8601("2023-01-01T24:00:00"),
                  data::ParseError);
  CHECK_THROWS_AS(data::parse_iso8601("not a time"), data::ParseError);
  CHECK_THROWS_AS(data::parse_iso8601("2023-01-01T00:00:00Z"),
                  data::ParseError);
  CHECK_THROWS_AS(data::parse_iso8601(""), data::ParseError);
}

TEST_CASE("load_csv parses well-formed rows exactly") {
  TempDir dir;
  const std::string path = dir.file("ok.csv");
  write_text(path, rows_csv({
                       "2024-01-01T00:00:00,5.5,7.25,180.5,1.125",
                       "2024-01-01T01:00:00,6,8,190,1.25",
                   }));
  const data::Series s = data::load_csv(path);
  REQUIRE(s.records.size() == 2);
  CHECK(s.records[0].timestamp == 1704067200);
  CHECK(s.records[0].avg_wind == 5.5);
  CHECK(s.records[0].max_wind == 7.25);
  CHECK(s.records[0].wind_dir == 180.5);
  CHECK(s.records[0].swh == 1.125);
  CHECK_FALSE(s.records[0].interpolated);
  CHECK(s.records[1].timestamp == 1704067200 + 3600);
  CHECK(s.gaps_filled == 0);
  REQUIRE(s.segment_starts == std::vector<std::size_t>{0});
}

TEST_CASE("load_csv skips leading comment lines") {
  TempDir dir;
  const std::string path = dir.file("comment.csv");
  write_text(path, "# config_hash=deadbeef\n# generator: test\n" +
                       rows_csv({"2024-01-01T00:00:00,5,7,180,1"}));
  const data::Series s = data::load_csv(path);
  CHECK(s.records.size() == 1);
}

TEST_CASE("load_csv reports parse failures with line numbers") {
  TempDir dir;

  const std::string bad_header = dir.file("h.csv");
  write_text(bad_header, "time,wind,gust,dir,height\n");
  CHECK_THROWS_WITH_AS(data::load_csv(bad_header),
                       doctest::Contains("line 1"), data::ParseError);

  const std::string bad_fields = dir.file("f.csv");
  write_text(bad_fields,
             rows_csv({"2024-01-01T00:00:00,5,7,180,1",
                       "2024-01-01T01:00:00,5,7,180"}));
  CHECK_THROWS_WITH_AS(data::load_csv(bad_fields),
                       doctest::Contains("line 3"), data::ParseError);

  const std::string bad_number = dir.file("n.csv");
  write_text(bad_number, rows_csv({"2024-01-01T00:00:00,5,7,abc,1"}));
  CHECK_THROWS_WITH_AS(data::load_csv(bad_number),
                       doctest::Contains("wind_dir"), data::ParseError);

  const std::string empty = dir.file("e.csv");
  write_text(empty, rows_csv({}));
  CHECK_THROWS_AS(data::load_csv(empty), data::TooFewRecords);

  CHECK_THROWS_AS(data::load_csv(dir.file("missing.csv")), data::ParseError);
}

TEST_CASE("load_csv enforces record invariants and names the offender") {
  TempDir dir;

  const std::string dir360 = dir.file("dir360.csv");
  write_text(dir360, rows_csv({"2024-01-01T00:00:00,5,7,180,1",
                               "2024-01-01T01:00:00,5,7,360.0,1"}));
  CHECK_THROWS_WITH_AS(data::load_csv(dir360), doctest::Contains("record 1"),
                       data::InvariantViolation);
  CHECK_THROWS_WITH_AS(data::load_csv(dir360),
                       doctest::Contains("wind_dir"),
                       data::InvariantViolation);

  const std::string gust = dir.file("gust.csv");
  write_text(gust, rows_csv({"2024-01-01T00:00:00,8,7.9,180,1"}));
  CHECK_THROWS_WITH_AS(data::load_csv(gust), doctest::Contains("max_wind"),
                       data::InvariantViolation);

  const std::string neg = dir.file("neg.csv");
  write_text(neg, rows_csv({"2024-01-01T00:00:00,5,7,180,-0.5"}));
  CHECK_THROWS_AS(data::load_csv(neg), data::InvariantViolation);
}

TEST_CASE("load_csv rejects non-advancing or misaligned timestamps") {
  TempDir dir;

  const std::string dup = dir.file("dup.csv");
  write_text(dup, rows_csv({"2024-01-01T00:00:00,5,7,180,1",
                            "2024-01-01T00:00:00,5,7,180,1"}));
  CHECK_THROWS_AS(data::load_csv(dup), data::NonMonotonicTimestamps);

  const std::string back = dir.file("back.csv");
  write_text(back, rows_csv({"2024-01-01T01:00:00,5,7,180,1",
                             "2024-01-01T00:00:00,5,7,180,1"}));
  CHECK_THROWS_AS(data::load_csv(back), data::NonMonotonicTimestamps);

  const std::string skew = dir.file("skew.csv");
  write_text(skew, rows_csv({"2024-01-01T00:00:00,5,7,180,1",
                             "2024-01-01T00:30:00,5,7,180,1"}));
  CHECK_THROWS_AS(data::load_csv(skew), data::InvariantViolation);
}

TEST_CASE("single missing hour is filled with the neighbour mean and flagged") {
  TempDir dir;
  const std::string path = dir.file("gap1.csv");
  write_text(path, rows_csv({"2024-01-01T00:00:00,4,6,350,1.0",
                             "2024-01-01T02:00:00,6,10,10,2.0"}));
  const data::Series s = data::load_csv(path);
  REQUIRE(s.records.size() == 3);
  const BuoyRecord& mid = s.records[1];
  CHECK(mid.interpolated);
  CHECK(mid.timestamp == 1704067200 + 3600);
  CHECK(mid.avg_wind == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(mid.max_wind == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(mid.swh == doctest::Approx(1.5).epsilon(1e-12));
  // 350 -> 10 crosses north: the short arc midpoint is 0, not 180.
  CHECK(mid.wind_dir == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(s.gaps_filled == 1);
  CHECK(s.segment_starts == std::vector<std::size_t>{0});
  CHECK_FALSE(s.records[0].interpolated);
  CHECK_FALSE(s.records[2].interpolated);
}

TEST_CASE("gaps up to six hours interpolate; longer gaps split segments") {
  TempDir dir;

  const std::string six = dir.file("gap6.csv");
  write_text(six, rows_csv({"2024-01-01T00:00:00,4,6,100,1.0",
                            "2024-01-01T07:00:00,11,13,107,8.0"}));
  const data::Series filled = data::load_csv(six);
  REQUIRE(filled.records.size() == 8);
  CHECK(filled.gaps_filled == 6);
  CHECK(filled.segment_starts == std::vector<std::size_t>{0});
  for (std::size_t k = 1; k <= 6; ++k) {
    CHECK(filled.records[k].interpolated);
    CHECK(filled.records[k].swh ==
          doctest::Approx(1.0 + static_cast<double>(k)).epsilon(1e-12));
    CHECK(filled.records[k].avg_wind ==
          doctest::Approx(4.0 + static_cast<double>(k)).epsilon(1e-12));
  }

  const std::string seven = dir.file("gap7.csv");
  write_text(seven, rows_csv({"2024-01-01T00:00:00,4,6,100,1.0",
                              "2024-01-01T01:00:00,4,6,100,1.1",
                              "2024-01-01T09:00:00,5,7,100,2.0",
                              "2024-01-01T10:00:00,5,7,100,2.1"}));
  const data::Series split = data::load_csv(seven);
  REQUIRE(split.records.size() == 4);
  CHECK(split.gaps_filled == 0);
  CHECK(split.segment_starts == std::vector<std::size_t>{0, 2});
}

TEST_CASE("load -> write -> load reproduces every value bitwise") {
  TempDir dir;
  synth::SynthConfig cfg;
  cfg.length = 200;
  cfg.seed = 7;
  const std::vector<BuoyRecord> made = synth::generate(cfg);

  const std::string first = dir.file("first.csv");
  data::write_csv(first, made, "config_hash=0011223344556677\nseed=7");
  const data::Series loaded = data::load_csv(first);
  REQUIRE(loaded.records.size() == made.size());

  const std::string second = dir.file("second.csv");
  data::write_csv(second, loaded.records);
  const data::Series again = data::load_csv(second);
  REQUIRE(again.records.size() == made.size());

  for (std::size_t i = 0; i < made.size(); ++i) {
    CHECK(again.records[i].timestamp == made[i].timestamp);
    CHECK(again.records[i].avg_wind == made[i].avg_wind);
    CHECK(again.records[i].max_wind == made[i].max_wind);
    CHECK(again.records[i].wind_dir == made[i].wind_dir);
    CHECK(again.records[i].swh == made[i].swh);
  }
}

TEST_CASE("build_channels lays out both wind direction encodings") {
  std::vector<BuoyRecord> recs(3);
  for (std::size_t i = 0; i < 3; ++i) {
    recs[i].timestamp = static_cast<std::int64_t>(i) * 3600;
    recs[i].avg_wind = 1.0 + static_cast<double>(i);
    recs[i].max_wind = 2.0 + static_cast<double>(i);
    recs[i].wind_dir = 90.0 * static_cast<double>(i);
    recs[i].swh = 0.5 * static_cast<double>(i);
  }

  const data::ChannelMatrix deg =
      data::build_channels(recs, data::DirEncoding::degrees);
  REQUIRE(deg.channels() == 4);
  CHECK(deg.names ==
        std::vector<std::string>{"avg_wind", "max_wind", "wind_dir", "swh"});
  CHECK(deg.swh_index == 3);
  CHECK(deg.values[2][1] == 90.0);
  CHECK(deg.values[3][2] == 1.0);
  CHECK(deg.length() == 3);

  const data::ChannelMatrix sc =
      data::build_channels(recs, data::DirEncoding::sincos);
  REQUIRE(sc.channels() == 5);
  CHECK(sc.swh_index == 4);
  CHECK(sc.values[2][1] == doctest::Approx(1.0).epsilon(1e-12));  // sin 90
  CHECK(sc.values[3][1] == doctest::Approx(0.0).epsilon(1e-12));  // cos 90
  CHECK(sc.values[3][2] == doctest::Approx(-1.0).epsilon(1e-12));  // cos 180

  CHECK(data::parse_dir_encoding("degrees") == data::DirEncoding::degrees);
  CHECK(data::parse_dir_encoding("sincos") == data::DirEncoding::sincos);
  CHECK_THROWS_AS(data::parse_dir_encoding("polar"), data::ParseError);
}

TEST_CASE("normalize maps the observed range onto the unit interval") {
  data::ChannelMatrix m;
  m.names = {"x"};
  m.values = {{0.0, 5.0, 10.0}};
  m.swh_index = 0;

  const data::NormalizedChannels full = data::normalize(m, 0, 3);
  CHECK(full.matrix.values[0] == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(full.stats.mins[0] == 0.0);
  CHECK(full.stats.maxs[0] == 10.0);
  CHECK(full.out_of_unit == 0);

  // Stats from the first two rows only: the third scales past 1.
  const data::NormalizedChannels train = data::normalize(m, 0, 2);
  CHECK(train.matrix.values[0] == std::vector<double>{0.0, 1.0, 2.0});
  CHECK(train.out_of_unit == 1);
}

TEST_CASE("angular channels use fixed ranges and never degenerate") {
  data::ChannelMatrix m;
  m.names = {"wind_dir", "swh"};
  m.values = {{180.0, 180.0, 180.0}, {1.0, 2.0, 3.0}};
  m.swh_index = 1;

  const data::NormalizedChannels norm = data::normalize(m, 0, 3);
  CHECK(norm.matrix.values[0][0] == 0.5);
  CHECK(norm.stats.mins[0] == 0.0);
  CHECK(norm.stats.maxs[0] == 360.0);

  data::ChannelMatrix sc;
  sc.names = {"dir_sin", "swh"};
  sc.values = {{0.0, 0.0}, {1.0, 2.0}};
  sc.swh_index = 1;
  const data::NormalizedChannels norm2 = data::normalize(sc, 0, 2);
  CHECK(norm2.matrix.values[0][0] == 0.5);  // fixed [-1, 1]
}

TEST_CASE("constant non-angular channel raises DegenerateChannel by name") {
  data::ChannelMatrix m;
  m.names = {"avg_wind", "swh"};
  m.values = {{3.0, 3.0, 4.0}, {2.0, 2.0, 2.0}};
  m.swh_index = 1;
  CHECK_THROWS_WITH_AS(data::normalize(m, 0, 3), doctest::Contains("swh"),
                       data::DegenerateChannel);
  // Constant only over the stats range counts too.
  CHECK_THROWS_WITH_AS(data::normalize(m, 0, 2),
                       doctest::Contains("avg_wind"), data::DegenerateChannel);
}

TEST_CASE("denormalize inverts normalize") {
  data::ChannelMatrix m;
  m.names = {"avg_wind", "wind_dir", "swh"};
  m.values = {{2.0, 9.5, 4.0}, {10.0, 350.0, 200.0}, {0.25, 4.0, 1.5}};
  m.swh_index = 2;
  const data::NormalizedChannels norm = data::normalize(m, 0, 3);
  for (std::size_t c = 0; c < m.channels(); ++c) {
    for (std::size_t i = 0; i < m.length(); ++i) {
      CHECK(data::denormalize(norm.stats, c, norm.matrix.values[c][i]) ==
            doctest::Approx(m.values[c][i]).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(data::denormalize(norm.stats, 3, 0.5),
                  data::InvariantViolation);
}

TEST_CASE("split_622 uses floor boundaries and covers every record") {
  const data::DatasetSplits ten = data::split_622(10);
  CHECK(ten.train_size() == 6);
  CHECK(ten.val_size() == 2);
  CHECK(ten.test_size() == 2);

  const data::DatasetSplits eleven = data::split_622(11);
  CHECK(eleven.train_size() == 6);
  CHECK(eleven.val_size() == 2);
  CHECK(eleven.test_size() == 3);

  const data::DatasetSplits big = data::split_622(13076);
  CHECK(big.train_size() == 7845);
  CHECK(big.val_size() == 2615);
  CHECK(big.test_size() == 2616);
  CHECK(big.train_size() + big.val_size() + big.test_size() == 13076);

  CHECK_THROWS_AS(data::split_622(9), data::TooFewRecords);
}

TEST_CASE("make_windows yields every in-range stride-1 sample") {
  data::ChannelMatrix m;
  m.names = {"a", "swh"};
  m.values.assign(2, std::vector<double>(100));
  for (std::size_t i = 0; i < 100; ++i) {
    m.values[0][i] = static_cast<double>(i) * 0.5;
    m.values[1][i] = static_cast<double>(i);
  }
  m.swh_index = 1;

  const std::vector<data::Sample> samples =
      data::make_windows(m, 0, 100, {0}, 24, 1);
  REQUIRE(samples.size() == 76);
  CHECK(samples.front().window_begin == 0);
  CHECK(samples.back().window_begin == 75);
  CHECK(samples[0].window[0][0] == 0.0);
  CHECK(samples[0].window[1][23] == 23.0);
  REQUIRE(samples[0].target.size() == 1);
  CHECK(samples[0].target[0] == 24.0);
  CHECK(samples[75].target[0] == 99.0);

  const std::vector<data::Sample> offset =
      data::make_windows(m, 10, 50, {0}, 24, 2);
  CHECK(offset.size() == 50 - 10 - 24 - 2 + 1);
  CHECK(offset.front().window_begin == 10);
  CHECK(offset.front().window[1][0] == 10.0);
}

TEST_CASE("make_windows never spans a segment boundary") {
  data::ChannelMatrix m;
  m.names = {"swh"};
  m.values.assign(1, std::vector<double>(60));
  for (std::size_t i = 0; i < 60; ++i) {
    m.values[0][i] = static_cast<double>(i);
  }
  m.swh_index = 0;

  const std::vector<std::size_t> segs = {0, 30};
  const std::vector<data::Sample> samples =
      data::make_windows(m, 0, 60, segs, 10, 2);
  CHECK(samples.size() == 19 + 19);
  for (const data::Sample& s : samples) {
    const bool in_first = s.window_begin + 12 <= 30;
    const bool in_second = s.window_begin >= 30;
    CHECK((in_first || in_second));
  }
}

TEST_CASE("make_windows raises SplitTooShort when nothing fits") {
  data::ChannelMatrix m;
  m.names = {"swh"};
  m.values.assign(1, std::vector<double>(30, 1.0));
  m.swh_index = 0;

  CHECK_THROWS_AS(data::make_windows(m, 0, 20, {0}, 24, 1),
                  data::SplitTooShort);
  // Fits in the range but every candidate straddles the segment boundary.
  CHECK_THROWS_AS(data::make_windows(m, 10, 25, {0, 15}, 10, 1),
                  data::SplitTooShort);
  CHECK_THROWS_AS(data::make_windows(m, 0, 10, {0}, 0, 1),
                  data::InvariantViolation);
}

TEST_CASE("generator is bitwise deterministic per seed") {
  synth::SynthConfig cfg;
  cfg.length = 300;
  cfg.seed = 99;
  const std::vector<BuoyRecord> a = synth::generate(cfg);
  const std::vector<BuoyRecord> b = synth::generate(cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].timestamp == b[i].timestamp);
    CHECK(a[i].avg_wind == b[i].avg_wind);
    CHECK(a[i].max_wind == b[i].max_wind);
    CHECK(a[i].wind_dir == b[i].wind_dir);
    CHECK(a[i].swh == b[i].swh);
  }

  cfg.seed = 100;
  const std::vector<BuoyRecord> c = synth::generate(cfg);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].swh != c[i].swh) any_diff = true;
  }
  CHECK(any_diff);
}

TEST_CASE("generated records satisfy every buoy invariant") {
  synth::SynthConfig cfg;
  cfg.length = 2000;
  cfg.seed = 5;
  cfg.storm_rate = 10.0;  // plenty of pulses
  const std::vector<BuoyRecord> recs = synth::generate(cfg);
  REQUIRE(recs.size() == 2000);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(recs[i].swh >= 0.0);
    CHECK(recs[i].avg_wind >= 0.0);
    CHECK(recs[i].max_wind >= recs[i].avg_wind);
    CHECK(recs[i].wind_dir >= 0.0);
    CHECK(recs[i].wind_dir < 360.0);
    if (i > 0) CHECK(recs[i].timestamp - recs[i - 1].timestamp == 3600);
  }
}

TEST_CASE("storm pulses raise the sea state above the calm-weather bound") {
  synth::SynthConfig calm;
  calm.length = 3000;
  calm.seed = 11;
  calm.storm_rate = 0.0;
  double calm_max = 0.0;
  for (const BuoyRecord& r : synth::generate(calm)) {
    calm_max = std::max(calm_max, r.swh);
  }
  // Without storms SWH stays near base + amplitudes + noise tails.
  CHECK(calm_max < calm.base_level + calm.seasonal_amp + calm.tidal_amp +
                       6.0 * calm.noise_std);

  synth::SynthConfig stormy = calm;
  stormy.storm_rate = 10.0;
  double stormy_max = 0.0;
  for (const BuoyRecord& r : synth::generate(stormy)) {
    stormy_max = std::max(stormy_max, r.swh);
  }
  CHECK(stormy_max > calm_max + 0.5 * stormy.storm_amp);
}

TEST_CASE("wind correlates best with the sea state it leads") {
  synth::SynthConfig cfg;
  cfg.length = 1500;
  cfg.seed = 21;
  cfg.wind_lag = 3;
  const std::vector<BuoyRecord> recs = synth::generate(cfg);

  const std::size_t max_lag = 6;
  const std::size_t n = recs.size() - max_lag;
  std::vector<double> wind(n);
  for (std::size_t i = 0; i < n; ++i) wind[i] = recs[i].avg_wind;

  double best = -2.0;
  std::size_t best_lag = 99;
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    std::vector<double> future(n);
    for (std::size_t i = 0; i < n; ++i) future[i] = recs[i + lag].swh;
    const double r = pearson(wind, future);
    if (r > best) {
      best = r;
      best_lag = lag;
    }
  }
  CHECK(best_lag == 3);
  CHECK(best > 0.95);
}

TEST_CASE("periodogram oracle isolates a pure tone") {
  synth::SynthConfig cfg;
  cfg.length = 1024;
  cfg.seasonal_amp = 1.0;
  cfg.seasonal_period = 256.0;  // bin 4 exactly
  cfg.tidal_amp = 0.0;
  cfg.storm_rate = 0.0;
  cfg.noise_std = 0.0;
  const std::vector<BuoyRecord> recs = synth::generate(cfg);
  std::vector<double> swh(recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) swh[i] = recs[i].swh;

  const std::vector<double> power = periodogram(swh);
  std::size_t peak = 0;
  for (std::size_t k = 1; k < power.size(); ++k) {
    if (power[k] > power[peak]) peak = k;
  }
  CHECK(peak + 1 == 4);
  CHECK(power[peak] > 1e6 * median(power));
}

TEST_CASE("default config concentrates power at the tidal and seasonal lines") {
  const synth::SynthConfig cfg;  // full defaults: one year, all terms on
  const std::vector<data::BuoyRecord> recs = synth::generate(cfg);
  REQUIRE(recs.size() == 8760);
  std::vector<double> swh(recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) swh[i] = recs[i].swh;

  const std::vector<double> power = periodogram(swh);
  const double floor_power = median(power);
  const double n = static_cast<double>(swh.size());

  auto band_peak = [&](double period) {
    const double center = n / period;
    const std::size_t lo =
        static_cast<std::size_t>(std::max(1.0, std::floor(center - 3.0)));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(center + 3.0));
    double best = 0.0;
    for (std::size_t k = lo; k <= hi && k <= power.size(); ++k) {
      best = std::max(best, power[k - 1]);
    }
    return best;
  };

  CHECK(band_peak(cfg.tidal_period) > 5.0 * floor_power);
  CHECK(band_peak(cfg.seasonal_period) > 5.0 * floor_power);
}

TEST_CASE("generator rejects invalid configurations") {
  synth::SynthConfig cfg;
  cfg.length = 1;
  CHECK_THROWS_AS(synth::generate(cfg), synth::BadSynthConfig);
  cfg = synth::SynthConfig{};
  cfg.noise_std = -0.1;
  CHECK_THROWS_AS(synth::generate(cfg), synth::BadSynthConfig);
  cfg = synth::SynthConfig{};
  cfg.storm_decay = 0.0;
  CHECK_THROWS_AS(synth::generate(cfg), synth::BadSynthConfig);
  cfg = synth::SynthConfig{};
  cfg.seasonal_period = -2.0;
  CHECK_THROWS_AS(synth::generate(cfg), synth::BadSynthConfig);
}
