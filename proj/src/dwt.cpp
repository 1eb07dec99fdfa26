#include "wavecast/dwt.hpp"

#include <algorithm>
#include <cstdint>

namespace wavecast::dwt {

namespace {

// Lowpass analysis filters for db1..db10, minimum-phase convention,
// descending power order. Row p-1 holds the 2p taps of db-p.
const std::vector<std::vector<double>> kDaubechiesLowpass = {
    {0.70710678118654752, 0.70710678118654752},
    {0.48296291314453414, 0.83651630373780791, 0.22414386804201338,
     -0.12940952255126038},
    {0.33267055295008262, 0.80689150931109258, 0.45987750211849157,
     -0.13501102001025459, -0.085441273882026662, 0.035226291885709537},
    {0.23037781330889650, 0.71484657055291565, 0.63088076792985891,
     -0.027983769416859854, -0.18703481171909308, 0.030841381835560764,
     0.032883011666885200, -0.010597401785069032},
    {0.16010239797419291, 0.60382926979718967, 0.72430852843777293,
     0.13842814590132073, -0.24229488706638203, -0.032244869584638375,
     0.077571493840045714, -0.0062414902127982743, -0.012580751999081999,
     0.0033357252854737713},
    {0.11154074335010946, 0.49462389039845309, 0.75113390802109535,
     0.31525035170919763, -0.22626469396543982, -0.12976686756726194,
     0.097501605587323049, 0.027522865530305729, -0.031582039317486030,
     0.00055384220116149614, 0.0047772575109455106, -0.0010773010853084796},
    {0.077852054085009179, 0.39653931948191731, 0.72913209084623512,
     0.46978228740519312, -0.14390600392856498, -0.22403618499387498,
     0.071309219266830265, 0.080612609151083072, -0.038029936935014414,
     -0.016574541630666881, 0.012550998556099841, 0.00042957797292136652,
     -0.0018016407040474909, 0.00035371379997452025},
    {0.054415842243104010, 0.31287159091429997, 0.67563073629728981,
     0.58535468365420671, -0.015829105256349306, -0.28401554296154693,
     0.00047248457391328277, 0.12874742662047846, -0.017369301001807546,
     -0.044088253930794752, 0.013981027917398282, 0.0087460940474057767,
     -0.0048703529934515743, -0.00039174037337694705, 0.00067544940645056937,
     -0.00011747678412476953},
    {0.038077947363878347, 0.24383467461259035, 0.60482312369011111,
     0.65728807805130054, 0.13319738582500758, -0.29327378327917491,
     -0.096840783222976461, 0.14854074933810638, 0.030725681479333379,
     -0.067632829061329974, 0.00025094711483145196, 0.022361662123679097,
     -0.0047232047577513973, -0.0042815036824634298, 0.0018476468830562265,
     0.00023038576352319597, -0.00025196318894271014, 3.9347320316271599e-5},
    {0.026670057900555554, 0.18817680007769149, 0.52720118893172559,
     0.68845903945360357, 0.28117234366057746, -0.24984642432731538,
     -0.19594627437737704, 0.12736934033579326, 0.093057364603572351,
     -0.071394147166397087, -0.029457536821875813, 0.033212674059341002,
     0.0036065535669561697, -0.010733175483330575, 0.0013953517470529012,
     0.0019924052951850561, -0.00068585669495971163, -0.00011646685512928545,
     9.3588670320069591e-5, -1.3264202894521245e-5},
};

// Reads the virtually extended padded signal. m is the padded even length;
// pad supplies position m-1 when the original length was odd.
struct Extended {
  std::span<const double> x;
  std::size_t m;
  double pad;
  ExtensionMode mode;

  double value_at(long long i) const {
    auto u = static_cast<std::size_t>(i);
    return u < x.size() ? x[u] : pad;
  }

  double at(long long t) const {
    const auto mm = static_cast<long long>(m);
    switch (mode) {
      case ExtensionMode::periodic: {
        long long r = t % mm;
        if (r < 0) r += mm;
        return value_at(r);
      }
      case ExtensionMode::zero:
        return (t < 0 || t >= mm) ? 0.0 : value_at(t);
      case ExtensionMode::symmetric: {
        // Half-sample reflection has period 2m: [x0..x_{m-1} x_{m-1}..x0].
        long long r = t % (2 * mm);
        if (r < 0) r += 2 * mm;
        if (r >= mm) r = 2 * mm - 1 - r;
        return value_at(r);
      }
    }
    return 0.0;
  }
};

double pad_value(std::span<const double> signal, ExtensionMode mode) {
  switch (mode) {
    case ExtensionMode::periodic:
      return signal.front();
    case ExtensionMode::symmetric:
      return signal.back();
    case ExtensionMode::zero:
      return 0.0;
  }
  return 0.0;
}

std::size_t coeff_count(std::size_t padded_len, std::size_t filter_len,
                        ExtensionMode mode) {
  if (mode == ExtensionMode::periodic) return padded_len / 2;
  // Every window that overlaps [0, m) is kept; this is what makes the
  // symmetric and zero modes exactly invertible for any filter length.
  return (padded_len + filter_len - 2) / 2;
}

long long window_offset(std::size_t filter_len, ExtensionMode mode) {
  if (mode == ExtensionMode::periodic) return 0;
  return -static_cast<long long>(filter_len - 2);
}

}  // namespace

ExtensionMode parse_extension_mode(const std::string& name) {
  if (name == "symmetric") return ExtensionMode::symmetric;
  if (name == "periodic") return ExtensionMode::periodic;
  if (name == "zero") return ExtensionMode::zero;
  throw Error("unknown extension mode '" + name +
              "' (expected symmetric, periodic or zero)");
}

std::string to_string(ExtensionMode mode) {
  switch (mode) {
    case ExtensionMode::symmetric:
      return "symmetric";
    case ExtensionMode::periodic:
      return "periodic";
    case ExtensionMode::zero:
      return "zero";
  }
  return "?";
}

WaveletFilter make_daubechies(int order) {
  if (order < 1 || order > 10)
    throw OrderOutOfRange("db order must be in [1, 10], got " +
                          std::to_string(order));
  WaveletFilter f;
  f.order = order;
  f.dec_lo = kDaubechiesLowpass[static_cast<std::size_t>(order - 1)];
  const std::size_t F = f.dec_lo.size();
  f.dec_hi.resize(F);
  for (std::size_t k = 0; k < F; ++k) {
    double v = f.dec_lo[F - 1 - k];
    f.dec_hi[k] = (k % 2 == 0) ? v : -v;
  }
  f.rec_lo.assign(f.dec_lo.rbegin(), f.dec_lo.rend());
  f.rec_hi.assign(f.dec_hi.rbegin(), f.dec_hi.rend());
  return f;
}

std::pair<std::vector<double>, std::vector<double>> dwt_step(
    std::span<const double> signal, const WaveletFilter& filter,
    ExtensionMode mode) {
  const std::size_t n = signal.size();
  if (n < 2)
    throw SignalTooShort("dwt_step: need at least 2 samples, got " +
                         std::to_string(n));
  const std::size_t F = filter.length();
  const std::size_t m = n + (n % 2);
  const Extended ext{signal, m, pad_value(signal, mode), mode};
  const std::size_t L = coeff_count(m, F, mode);
  const long long offset = window_offset(F, mode);

  std::vector<double> approx(L), detail(L);
  for (std::size_t i = 0; i < L; ++i) {
    const long long base = 2 * static_cast<long long>(i) + offset;
    double a = 0.0, d = 0.0;
    for (std::size_t j = 0; j < F; ++j) {
      const double v = ext.at(base + static_cast<long long>(j));
      a += filter.dec_lo[j] * v;
      d += filter.dec_hi[j] * v;
    }
    approx[i] = a;
    detail[i] = d;
  }
  return {std::move(approx), std::move(detail)};
}

std::vector<double> idwt_step(std::span<const double> approx,
                              std::span<const double> detail,
                              const WaveletFilter& filter, ExtensionMode mode,
                              std::size_t target_len) {
  if (approx.size() != detail.size())
    throw LengthMismatch("idwt_step: approx has " +
                         std::to_string(approx.size()) + " samples, detail " +
                         std::to_string(detail.size()));
  if (approx.empty()) throw EmptyInput("idwt_step: empty coefficient arrays");
  if (target_len < 1)
    throw LengthMismatch("idwt_step: target_len must be positive");

  const std::size_t F = filter.length();
  const std::size_t m = target_len + (target_len % 2);
  const std::size_t expected = coeff_count(m, F, mode);
  if (approx.size() != expected)
    throw LengthMismatch(
        "idwt_step: got " + std::to_string(approx.size()) +
        " coefficients, target_len " + std::to_string(target_len) +
        " requires " + std::to_string(expected) + " in " + to_string(mode) +
        " mode");

  // Synthesis is the adjoint of analysis: each kept window scatters its
  // coefficients back through the same taps. This equals upsampling by two
  // and convolving with rec_lo / rec_hi.
  const auto& h = filter.dec_lo;
  const auto& g = filter.dec_hi;
  const long long offset = window_offset(F, mode);
  const auto mm = static_cast<long long>(m);

  std::vector<double> out(m, 0.0);
  for (std::size_t i = 0; i < approx.size(); ++i) {
    const long long base = 2 * static_cast<long long>(i) + offset;
    const double a = approx[i];
    const double d = detail[i];
    for (std::size_t j = 0; j < F; ++j) {
      long long t = base + static_cast<long long>(j);
      if (mode == ExtensionMode::periodic) {
        t %= mm;
        if (t < 0) t += mm;
      } else if (t < 0 || t >= mm) {
        continue;
      }
      out[static_cast<std::size_t>(t)] += a * h[j] + d * g[j];
    }
  }
  out.resize(target_len);
  return out;
}

BandSet band_decompose(std::span<const double> signal,
                       const WaveletFilter& filter, int levels,
                       ExtensionMode mode) {
  if (signal.empty()) throw EmptyInput("band_decompose: empty signal");
  if (levels < 1) throw Error("band_decompose: levels must be >= 1");
  if (levels >= 63 || signal.size() < (std::uint64_t{1} << levels))
    throw TooManyLevels("band_decompose: " + std::to_string(signal.size()) +
                        " samples cannot support " + std::to_string(levels) +
                        " levels");

  const auto depth = static_cast<std::size_t>(levels);
  std::vector<std::vector<double>> details(depth + 1);
  std::vector<std::size_t> in_len(depth + 1);
  std::vector<double> cur(signal.begin(), signal.end());
  for (std::size_t l = 1; l <= depth; ++l) {
    in_len[l] = cur.size();
    auto [a, d] = dwt_step(cur, filter, mode);
    details[l] = std::move(d);
    cur = std::move(a);
  }

  // Inverts level by level with the sibling band zeroed, yielding the
  // full-length contribution of a single coefficient array.
  auto invert_chain = [&](std::vector<double> c, std::size_t from_level) {
    for (std::size_t l = from_level; l >= 1; --l) {
      const std::vector<double> zero(details[l].size(), 0.0);
      c = idwt_step(c, zero, filter, mode, in_len[l]);
    }
    return c;
  };

  BandSet out;
  out.levels = levels;
  out.original_length = signal.size();
  out.components.reserve(depth + 1);
  out.components.push_back(invert_chain(cur, depth));
  for (std::size_t k = depth; k >= 1; --k) {
    const std::vector<double> zero(details[k].size(), 0.0);
    auto c = idwt_step(zero, details[k], filter, mode, in_len[k]);
    if (k > 1) c = invert_chain(std::move(c), k - 1);
    out.components.push_back(std::move(c));
  }
  return out;
}

std::vector<BandSet> band_decompose_multichannel(
    const std::vector<std::vector<double>>& channels,
    const WaveletFilter& filter, int levels, ExtensionMode mode) {
  if (channels.empty())
    throw EmptyInput("band_decompose_multichannel: no channels");
  for (const auto& ch : channels)
    if (ch.size() != channels.front().size())
      throw LengthMismatch(
          "band_decompose_multichannel: channels differ in length");
  std::vector<BandSet> out;
  out.reserve(channels.size());
  for (std::size_t c = 0; c < channels.size(); ++c) {
    try {
      out.push_back(band_decompose(channels[c], filter, levels, mode));
    } catch (const Error& e) {
      throw Error("channel " + std::to_string(c) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace wavecast::dwt
