#pragma once

// Deterministic synthetic-EEG session generator. Channels are sums of
// amplitude-modulated band-limited sinusoids whose left/right power
// ratios and envelope correlations follow per-class profiles, so the
// downstream features carry a controllable ground truth.

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "eegemo/core.hpp"
#include "eegemo/dataset.hpp"
#include "eegemo/rng.hpp"
#include "eegemo/spectral.hpp"

namespace eegemo {

// Target right/left band-power ratios per (pair, band) and envelope
// correlation per pair.
struct ClassProfile {
  std::array<std::array<double, kNumBands>, kNumPairs> power_ratio;
  std::array<double, kNumPairs> correlation;
};

struct SynthSpec {
  std::size_t participants = 21;
  double sample_rate = 256.0;
  std::map<ClipId, double> clip_seconds = {{ClipId::ColdAir, 58.0},
                                           {ClipId::HotAir, 21.0}};
  std::array<ClassProfile, kNumClasses> class_profiles = default_profiles();
  double noise_level = 0.05;  // noise sd relative to base tone amplitude
  std::uint64_t seed = 42;

  static std::array<ClassProfile, kNumClasses> default_profiles() {
    auto uniform = [](double ratio, double corr) {
      ClassProfile p;
      for (auto& pair : p.power_ratio) pair.fill(ratio);
      p.correlation.fill(corr);
      return p;
    };
    return {
        uniform(4.00, 0.9),   // Happy: strong right dominance
        uniform(0.25, 0.9),   // Relaxed: strong left dominance
        uniform(1.75, -0.6),  // Sad: mild right, anticorrelated envelopes
        uniform(0.55, -0.6),  // Angry: mild left, anticorrelated envelopes
    };
  }

  void validate() const {
    for (const auto& prof : class_profiles) {
      for (const auto& pair : prof.power_ratio)
        for (double r : pair)
          if (!(r > 0.0))
            throw ValidationError("infeasible profile: power ratio must be > 0");
      for (double c : prof.correlation)
        if (c < -1.0 || c > 1.0)
          throw ValidationError("correlation target outside [-1, 1]");
    }
    for (const auto& [clip, secs] : clip_seconds)
      if (secs <= 2.0)
        throw ValidationError(std::string("clip ") + clip_name(clip) +
                              " duration must exceed 2 s");
    if (sample_rate <= 0.0) throw ValidationError("sample_rate must be positive");
    if (noise_level < 0.0) throw ValidationError("noise_level must be >= 0");
  }
};

// Quadrant-consistent non-midpoint SAM rating for a class.
inline SamRating sam_for_label(EmotionLabel l) {
  switch (l) {
    case EmotionLabel::Happy: return SamRating(7, 7);
    case EmotionLabel::Relaxed: return SamRating(7, 3);
    case EmotionLabel::Sad: return SamRating(3, 3);
    case EmotionLabel::Angry: return SamRating(3, 7);
  }
  throw ValidationError("unknown label");
}

namespace detail {

// Band carrier frequencies, kept clear of the band edges.
inline constexpr std::array<double, kNumBands> kCarrierHz = {2.5, 6.0, 10.5,
                                                             21.0, 37.0};

// Slow zero-mean unit-variance envelope driver: three sub-hertz sinusoids.
// Phases are fixed constants so the realized envelope correlation is the
// same for every recording of a class, keeping intra-class feature
// scatter well below the inter-class profile gaps.
struct SlowSignal {
  std::array<double, 3> phase;
  static constexpr std::array<double, 3> kFreq = {0.13, 0.21, 0.34};

  explicit SlowSignal(const std::array<double, 3>& fixed_phase)
      : phase(fixed_phase) {}
  double at(double t) const {
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      s += std::sin(2.0 * std::numbers::pi * kFreq[i] * t + phase[i]);
    return s / std::sqrt(1.5);
  }
};

}  // namespace detail

struct SynthEntry {
  EegRecording recording;
  SamRating rating;
  EmotionLabel assigned_label;
};

// Generates one recording for (participant, clip, class profile).
inline EegRecording synth_recording(const SynthSpec& spec, std::size_t participant,
                                    ClipId clip, EmotionLabel label) {
  const auto& prof = spec.class_profiles[static_cast<std::size_t>(label)];
  const double secs = spec.clip_seconds.at(clip);
  const auto n = static_cast<std::size_t>(std::lround(secs * spec.sample_rate));

  Rng rng(derive_seed(spec.seed,
                      participant * 2 + (clip == ClipId::HotAir ? 1 : 0)));
  constexpr double kBaseAmp = 10.0;  // uV
  constexpr double kModDepth = 0.35;

  std::array<std::vector<double>, kNumElectrodes> channels;
  for (auto& ch : channels) ch.assign(n, 0.0);

  for (std::size_t p = 0; p < kNumPairs; ++p) {
    const double rho = prof.correlation[p];
    const detail::SlowSignal shared({0.7, 2.1, 4.0});
    const detail::SlowSignal indep({1.3, 3.3, 5.1});
    auto& left = channels[static_cast<std::size_t>(kSymmetricPairs[p].left)];
    auto& right = channels[static_cast<std::size_t>(kSymmetricPairs[p].right)];

    for (std::size_t b = 0; b < kNumBands; ++b) {
      const double amp_l = kBaseAmp;
      const double amp_r = kBaseAmp * std::sqrt(prof.power_ratio[p][b]);
      const double ph_l = rng.uniform() * 2.0 * std::numbers::pi;
      const double ph_r = rng.uniform() * 2.0 * std::numbers::pi;
      const double w = 2.0 * std::numbers::pi * detail::kCarrierHz[b];
      const double mix = std::sqrt(std::max(0.0, 1.0 - rho * rho));
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / spec.sample_rate;
        const double env_l = 1.0 + kModDepth * shared.at(t);
        const double env_r =
            1.0 + kModDepth * (rho * shared.at(t) + mix * indep.at(t));
        left[i] += amp_l * env_l * std::sin(w * t + ph_l);
        right[i] += amp_r * env_r * std::sin(w * t + ph_r);
      }
    }
  }
  if (spec.noise_level > 0.0) {
    const double sd = spec.noise_level * kBaseAmp;
    for (auto& ch : channels)
      for (auto& v : ch) v += sd * rng.normal();
  }

  std::string pid = "p" + std::to_string(participant + 1);
  return EegRecording(pid + "_" + clip_name(clip), pid, clip, spec.sample_rate,
                      std::move(channels));
}

// Full session: per participant, one cold and one hot clip; classes are
// assigned round-robin over recordings so all four appear for any
// participant count >= 2.
inline std::vector<SynthEntry> generate_session(const SynthSpec& spec) {
  spec.validate();
  std::vector<SynthEntry> out;
  std::size_t counter = 0;
  for (std::size_t p = 0; p < spec.participants; ++p) {
    for (ClipId clip : {ClipId::ColdAir, ClipId::HotAir}) {
      const EmotionLabel label = kLabelOrder[counter % kNumClasses];
      ++counter;
      out.push_back(
          {synth_recording(spec, p, clip, label), sam_for_label(label), label});
    }
  }
  return out;
}

// Writes recording CSVs plus a manifest into out_dir; returns the
// manifest path. Files flow through the same parser as real data.
inline std::string write_session(const SynthSpec& spec,
                                 const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  {
    std::ofstream probe(out_dir + "/.write_probe");
    if (!probe) throw IoError("output directory '" + out_dir + "' is not writable");
  }
  fs::remove(out_dir + "/.write_probe", ec);

  const auto session = generate_session(spec);
  nlohmann::json manifest;
  manifest["recordings"] = nlohmann::json::array();
  for (const auto& e : session) {
    const std::string fname = e.recording.recording_id() + ".csv";
    std::ofstream f(out_dir + "/" + fname);
    if (!f) throw IoError("cannot write '" + out_dir + "/" + fname + "'");
    f << serialize_recording(e.recording);
    manifest["recordings"].push_back(
        {{"path", fname},
         {"recording_id", e.recording.recording_id()},
         {"participant_id", e.recording.participant_id()},
         {"clip_id", clip_name(e.recording.clip_id())},
         {"sample_rate", e.recording.sample_rate()},
         {"valence", e.rating.valence},
         {"arousal", e.rating.arousal}});
  }
  const std::string manifest_path = out_dir + "/manifest.json";
  std::ofstream mf(manifest_path);
  if (!mf) throw IoError("cannot write manifest");
  mf << manifest.dump(2) << '\n';
  return manifest_path;
}

}  // namespace eegemo
