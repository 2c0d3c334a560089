#pragma once

// Welch power spectral density estimation and band-power computation for
// the five canonical EEG bands (delta through gamma).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "eegemo/core.hpp"

namespace eegemo {

enum class Band : int { Delta = 0, Theta = 1, Alpha = 2, Beta = 3, Gamma = 4 };

inline constexpr std::size_t kNumBands = 5;
inline constexpr std::array<Band, kNumBands> kBandOrder = {
    Band::Delta, Band::Theta, Band::Alpha, Band::Beta, Band::Gamma};

inline const char* band_name(Band b) {
  switch (b) {
    case Band::Delta: return "delta";
    case Band::Theta: return "theta";
    case Band::Alpha: return "alpha";
    case Band::Beta: return "beta";
    case Band::Gamma: return "gamma";
  }
  throw ValidationError("unknown band");
}

struct SpectralConfig {
  std::size_t segment_length = 256;   // Welch segment, power of two
  double overlap_fraction = 0.5;      // in [0, 1)
  double window_seconds = 1.0;        // correlation analysis window
  double hop_seconds = 0.5;           // correlation window stride
  double gamma_hi = 44.0;             // closed upper edge of the gamma band
};

// [lo, hi) band edges in Hz. Gamma's open upper bound is closed at
// cfg.gamma_hi, below Nyquist and mains interference.
inline std::pair<double, double> band_range(Band b, double gamma_hi = 44.0) {
  switch (b) {
    case Band::Delta: return {1.0, 4.0};
    case Band::Theta: return {4.0, 8.0};
    case Band::Alpha: return {8.0, 13.0};
    case Band::Beta: return {13.0, 30.0};
    case Band::Gamma: return {30.0, gamma_hi};
  }
  throw ValidationError("unknown band");
}

// One-sided PSD on a uniform frequency grid from 0 to sample_rate/2.
struct PsdEstimate {
  std::vector<double> frequencies;    // Hz, ascending
  std::vector<double> power_density;  // uV^2/Hz, same length
};

// Mean band power per (electrode, band), uV^2. Rows follow kElectrodeOrder,
// columns kBandOrder.
struct BandPowerMatrix {
  std::array<std::array<double, kNumBands>, kNumElectrodes> values{};

  double at(Electrode e, Band b) const {
    return values[static_cast<std::size_t>(e)][static_cast<std::size_t>(b)];
  }
  double& at(Electrode e, Band b) {
    return values[static_cast<std::size_t>(e)][static_cast<std::size_t>(b)];
  }
};

// Per (electrode, band): band power of each analysis window, all series
// equal length.
struct BandPowerSeries {
  std::array<std::array<std::vector<double>, kNumBands>, kNumElectrodes> series;

  const std::vector<double>& at(Electrode e, Band b) const {
    return series[static_cast<std::size_t>(e)][static_cast<std::size_t>(b)];
  }
  std::size_t num_windows() const { return series[0][0].size(); }
};

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 FFT; size must be a power of two.
inline void fft_radix2(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const auto u = a[i + k];
        const auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

inline std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n));
  return w;
}

// Piecewise-linear integral of a uniformly gridded function over [lo, hi].
inline double trapz_range(const std::vector<double>& x, const std::vector<double>& y,
                          double lo, double hi) {
  if (hi <= lo || x.size() < 2) return 0.0;
  const double df = x[1] - x[0];
  auto value_at = [&](double f) {
    const double t = (f - x[0]) / df;
    const auto i = static_cast<std::size_t>(std::clamp(
        std::floor(t), 0.0, static_cast<double>(x.size() - 2)));
    const double frac = t - static_cast<double>(i);
    return y[i] + frac * (y[i + 1] - y[i]);
  };
  lo = std::max(lo, x.front());
  hi = std::min(hi, x.back());
  if (hi <= lo) return 0.0;

  double acc = 0.0;
  double f = lo;
  double vf = value_at(lo);
  // advance to each interior grid point, then the band edge
  auto next_grid = static_cast<std::size_t>(std::ceil((lo - x[0]) / df));
  if (x[0] + static_cast<double>(next_grid) * df <= lo + 1e-12) ++next_grid;
  for (; next_grid < x.size(); ++next_grid) {
    const double g = x[0] + static_cast<double>(next_grid) * df;
    if (g >= hi) break;
    acc += 0.5 * (vf + y[next_grid]) * (g - f);
    f = g;
    vf = y[next_grid];
  }
  acc += 0.5 * (vf + value_at(hi)) * (hi - f);
  return acc;
}

}  // namespace detail

// Averaged modified periodogram with Hann weighting; one-sided density
// normalized so its integral over frequency approximates the signal's
// mean-square value.
inline PsdEstimate welch_psd(const std::vector<double>& signal, double sample_rate,
                             std::size_t segment_length, double overlap_fraction) {
  if (!detail::is_power_of_two(segment_length))
    throw ValidationError("segment_length must be a power of two");
  if (signal.size() < segment_length)
    throw ValidationError("signal shorter than one segment (" +
                          std::to_string(signal.size()) + " < " +
                          std::to_string(segment_length) + ")");
  if (overlap_fraction < 0.0 || overlap_fraction >= 1.0)
    throw ValidationError("overlap_fraction must be in [0, 1)");
  for (double v : signal)
    if (!std::isfinite(v)) throw ValidationError("non-finite sample in signal");

  const std::size_t hop = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(
             static_cast<double>(segment_length) * (1.0 - overlap_fraction))));
  const auto window = detail::hann_window(segment_length);
  double win_power = 0.0;
  for (double w : window) win_power += w * w;

  const std::size_t nbins = segment_length / 2 + 1;
  std::vector<double> psd(nbins, 0.0);
  std::size_t nseg = 0;
  std::vector<std::complex<double>> buf(segment_length);
  for (std::size_t start = 0; start + segment_length <= signal.size(); start += hop) {
    for (std::size_t i = 0; i < segment_length; ++i)
      buf[i] = signal[start + i] * window[i];
    detail::fft_radix2(buf);
    for (std::size_t k = 0; k < nbins; ++k) {
      double p = std::norm(buf[k]) / (sample_rate * win_power);
      if (k != 0 && k != segment_length / 2) p *= 2.0;  // one-sided fold
      psd[k] += p;
    }
    ++nseg;
  }
  for (double& p : psd) p /= static_cast<double>(nseg);

  PsdEstimate out;
  out.power_density = std::move(psd);
  out.frequencies.resize(nbins);
  for (std::size_t k = 0; k < nbins; ++k)
    out.frequencies[k] = static_cast<double>(k) * sample_rate /
                         static_cast<double>(segment_length);
  return out;
}

// Trapezoidal integral of the PSD over the band's [lo, hi) range.
inline double band_power(const PsdEstimate& psd, Band band, double gamma_hi = 44.0) {
  const auto [lo, hi] = band_range(band, gamma_hi);
  if (hi > psd.frequencies.back() + 1e-9)
    throw ValidationError(std::string("band ") + band_name(band) +
                          " exceeds Nyquist frequency");
  return detail::trapz_range(psd.frequencies, psd.power_density, lo, hi);
}

// Full-recording PSD per electrode, integrated into the five bands.
inline BandPowerMatrix band_power_matrix(const EegRecording& rec,
                                         const SpectralConfig& cfg = {}) {
  BandPowerMatrix m;
  for (std::size_t c = 0; c < kNumElectrodes; ++c) {
    const auto psd = welch_psd(rec.channel(kElectrodeOrder[c]), rec.sample_rate(),
                               cfg.segment_length, cfg.overlap_fraction);
    for (std::size_t b = 0; b < kNumBands; ++b)
      m.values[c][b] = band_power(psd, kBandOrder[b], cfg.gamma_hi);
  }
  return m;
}

// Deterministic window count for a recording split into analysis windows.
inline std::size_t window_count(std::size_t num_samples, double sample_rate,
                                double window_seconds, double hop_seconds) {
  const auto win = static_cast<std::size_t>(std::lround(window_seconds * sample_rate));
  const auto hop = static_cast<std::size_t>(std::lround(hop_seconds * sample_rate));
  if (win == 0 || hop == 0 || num_samples < win) return 0;
  return (num_samples - win) / hop + 1;
}

// Sliding-window band powers per electrode. Each window gets a single
// Hann periodogram sized to the largest power of two that fits.
inline BandPowerSeries band_power_series(const EegRecording& rec,
                                         const SpectralConfig& cfg = {}) {
  const auto win = static_cast<std::size_t>(
      std::lround(cfg.window_seconds * rec.sample_rate()));
  const auto hop = static_cast<std::size_t>(
      std::lround(cfg.hop_seconds * rec.sample_rate()));
  const std::size_t w = window_count(rec.num_samples(), rec.sample_rate(),
                                     cfg.window_seconds, cfg.hop_seconds);
  if (w < 2)
    throw ValidationError("recording too short for two analysis windows");

  std::size_t seg = 1;
  while (seg * 2 <= std::min(win, cfg.segment_length)) seg *= 2;

  BandPowerSeries out;
  std::vector<double> chunk(win);
  for (std::size_t c = 0; c < kNumElectrodes; ++c) {
    const auto& ch = rec.channel(kElectrodeOrder[c]);
    for (std::size_t b = 0; b < kNumBands; ++b)
      out.series[c][b].reserve(w);
    for (std::size_t i = 0; i < w; ++i) {
      const std::size_t start = i * hop;
      chunk.assign(ch.begin() + static_cast<std::ptrdiff_t>(start),
                   ch.begin() + static_cast<std::ptrdiff_t>(start + win));
      const auto psd = welch_psd(chunk, rec.sample_rate(), seg, 0.5);
      for (std::size_t b = 0; b < kNumBands; ++b)
        out.series[c][b].push_back(band_power(psd, kBandOrder[b], cfg.gamma_hi));
    }
  }
  return out;
}

}  // namespace eegemo
