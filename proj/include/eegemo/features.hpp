#pragma once

// The three spectral feature families and the 30-element feature vector:
// 10 rational asymmetries, 10 differential asymmetries, 10 left/right
// band-power correlations. Layout is pair-major, band-minor, with pairs
// (TP9,TP10) then (AF7,AF8) and bands delta through gamma.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "eegemo/core.hpp"
#include "eegemo/spectral.hpp"

namespace eegemo {

inline constexpr std::size_t kFeaturesPerFamily = kNumPairs * kNumBands;  // 10
inline constexpr std::size_t kFeatureDim = 3 * kFeaturesPerFamily;        // 30

// Denominator floor for the asymmetry ratio; keeps dead channels finite.
inline constexpr double kRasmEpsilon = 1e-12;

struct FeatureVector {
  std::array<double, kFeatureDim> values{};

  double rasm(std::size_t pair, std::size_t band) const {
    return values[pair * kNumBands + band];
  }
  double dasm(std::size_t pair, std::size_t band) const {
    return values[kFeaturesPerFamily + pair * kNumBands + band];
  }
  double corr(std::size_t pair, std::size_t band) const {
    return values[2 * kFeaturesPerFamily + pair * kNumBands + band];
  }
};

enum class FeatureFamily { Rasm, Dasm, Corr, All };

inline const char* family_name(FeatureFamily f) {
  switch (f) {
    case FeatureFamily::Rasm: return "RASM";
    case FeatureFamily::Dasm: return "DASM";
    case FeatureFamily::Corr: return "Correlation";
    case FeatureFamily::All: return "All";
  }
  throw ValidationError("unknown feature family");
}

// Column names in vector layout order, e.g. "rasm_tp_alpha".
inline std::vector<std::string> feature_names() {
  std::vector<std::string> names;
  const std::array<std::string, 3> fams = {"rasm", "dasm", "corr"};
  const std::array<std::string, kNumPairs> pairs = {"tp", "af"};
  for (const auto& fam : fams)
    for (const auto& pair : pairs)
      for (auto b : kBandOrder)
        names.push_back(fam + "_" + pair + "_" + band_name(b));
  return names;
}

// Indices into the 30-vector selected by a family.
inline std::vector<std::size_t> family_indices(FeatureFamily f) {
  std::vector<std::size_t> idx;
  const auto push_range = [&](std::size_t from) {
    for (std::size_t i = 0; i < kFeaturesPerFamily; ++i) idx.push_back(from + i);
  };
  switch (f) {
    case FeatureFamily::Rasm: push_range(0); break;
    case FeatureFamily::Dasm: push_range(kFeaturesPerFamily); break;
    case FeatureFamily::Corr: push_range(2 * kFeaturesPerFamily); break;
    case FeatureFamily::All:
      push_range(0);
      push_range(kFeaturesPerFamily);
      push_range(2 * kFeaturesPerFamily);
      break;
  }
  return idx;
}

// RASM_B = P_R / max(P_L, eps) per symmetric pair and band.
inline std::array<double, kFeaturesPerFamily> rasm(const BandPowerMatrix& bp) {
  std::array<double, kFeaturesPerFamily> out{};
  for (std::size_t p = 0; p < kNumPairs; ++p)
    for (std::size_t b = 0; b < kNumBands; ++b)
      out[p * kNumBands + b] =
          bp.at(kSymmetricPairs[p].right, kBandOrder[b]) /
          std::max(bp.at(kSymmetricPairs[p].left, kBandOrder[b]), kRasmEpsilon);
  return out;
}

// DASM_B = P_R - P_L per symmetric pair and band.
inline std::array<double, kFeaturesPerFamily> dasm(const BandPowerMatrix& bp) {
  std::array<double, kFeaturesPerFamily> out{};
  for (std::size_t p = 0; p < kNumPairs; ++p)
    for (std::size_t b = 0; b < kNumBands; ++b)
      out[p * kNumBands + b] = bp.at(kSymmetricPairs[p].right, kBandOrder[b]) -
                               bp.at(kSymmetricPairs[p].left, kBandOrder[b]);
  return out;
}

// Pearson correlation coefficient. Zero-variance input yields 0; the
// result is clamped to [-1, 1] against rounding.
inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw ValidationError("pearson: length mismatch");
  if (a.size() < 2)
    throw ValidationError("pearson: need at least 2 points");
  const auto n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

// Left/right window band-power correlation per symmetric pair and band.
inline std::array<double, kFeaturesPerFamily> band_correlation(
    const BandPowerSeries& series) {
  std::array<double, kFeaturesPerFamily> out{};
  for (std::size_t p = 0; p < kNumPairs; ++p)
    for (std::size_t b = 0; b < kNumBands; ++b)
      out[p * kNumBands + b] = pearson(
          series.at(kSymmetricPairs[p].left, kBandOrder[b]),
          series.at(kSymmetricPairs[p].right, kBandOrder[b]));
  return out;
}

// Full 30-element vector: [rasm | dasm | corr].
inline FeatureVector extract_features(const EegRecording& rec,
                                      const SpectralConfig& cfg = {}) {
  const auto bp = band_power_matrix(rec, cfg);
  const auto r = rasm(bp);
  const auto d = dasm(bp);
  const auto c = band_correlation(band_power_series(rec, cfg));
  FeatureVector fv;
  std::copy(r.begin(), r.end(), fv.values.begin());
  std::copy(d.begin(), d.end(), fv.values.begin() + kFeaturesPerFamily);
  std::copy(c.begin(), c.end(), fv.values.begin() + 2 * kFeaturesPerFamily);
  return fv;
}

}  // namespace eegemo
