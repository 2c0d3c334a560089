#pragma once

// Domain types and file ingestion for four-channel EEG recordings with
// self-assessment (SAM) ratings. Recording files are plain CSV; session
// manifests are JSON. All types are immutable after construction.

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace eegemo {

// Thrown on malformed input data or configuration.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when an iterative solver fails to reach its tolerance.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown on filesystem trouble.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Electrode : int { TP9 = 0, AF7 = 1, AF8 = 2, TP10 = 3 };

inline constexpr std::size_t kNumElectrodes = 4;
inline constexpr std::array<Electrode, kNumElectrodes> kElectrodeOrder = {
    Electrode::TP9, Electrode::AF7, Electrode::AF8, Electrode::TP10};

inline const char* electrode_name(Electrode e) {
  switch (e) {
    case Electrode::TP9: return "TP9";
    case Electrode::AF7: return "AF7";
    case Electrode::AF8: return "AF8";
    case Electrode::TP10: return "TP10";
  }
  throw ValidationError("unknown electrode");
}

// Hemispherically symmetric pairs as (left, right).
struct ElectrodePair {
  Electrode left;
  Electrode right;
};

inline constexpr std::size_t kNumPairs = 2;
inline constexpr std::array<ElectrodePair, kNumPairs> kSymmetricPairs = {{
    {Electrode::TP9, Electrode::TP10},
    {Electrode::AF7, Electrode::AF8},
}};

enum class ClipId { ColdAir, HotAir };

inline const char* clip_name(ClipId c) {
  return c == ClipId::ColdAir ? "cold_air" : "hot_air";
}

inline ClipId clip_from_name(const std::string& s) {
  if (s == "cold_air") return ClipId::ColdAir;
  if (s == "hot_air") return ClipId::HotAir;
  throw ValidationError("unknown clip_id '" + s + "' (expected cold_air or hot_air)");
}

// One participant-clip session: four channels of raw microvolt samples
// at a fixed rate. Channel column order follows kElectrodeOrder.
class EegRecording {
 public:
  EegRecording(std::string recording_id, std::string participant_id,
               ClipId clip_id, double sample_rate,
               std::array<std::vector<double>, kNumElectrodes> channels)
      : recording_id_(std::move(recording_id)),
        participant_id_(std::move(participant_id)),
        clip_id_(clip_id),
        sample_rate_(sample_rate),
        channels_(std::move(channels)) {
    if (sample_rate_ <= 0.0)
      throw ValidationError("sample_rate must be positive");
    const std::size_t n = channels_[0].size();
    for (std::size_t c = 1; c < kNumElectrodes; ++c) {
      if (channels_[c].size() != n)
        throw ValidationError("channel length mismatch: " +
                              std::string(electrode_name(kElectrodeOrder[c])));
    }
    if (static_cast<double>(n) < 2.0 * sample_rate_)
      throw ValidationError("recording '" + recording_id_ + "' too short: " +
                            std::to_string(n) + " samples, need at least " +
                            std::to_string(2.0 * sample_rate_));
    for (std::size_t c = 0; c < kNumElectrodes; ++c)
      for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(channels_[c][i]))
          throw ValidationError("non-finite sample at row " + std::to_string(i) +
                                ", " + electrode_name(kElectrodeOrder[c]));
  }

  const std::string& recording_id() const { return recording_id_; }
  const std::string& participant_id() const { return participant_id_; }
  ClipId clip_id() const { return clip_id_; }
  double sample_rate() const { return sample_rate_; }
  std::size_t num_samples() const { return channels_[0].size(); }
  const std::vector<double>& channel(Electrode e) const {
    return channels_[static_cast<std::size_t>(e)];
  }

 private:
  std::string recording_id_;
  std::string participant_id_;
  ClipId clip_id_;
  double sample_rate_;
  std::array<std::vector<double>, kNumElectrodes> channels_;
};

// 9-point self-assessment manikin rating.
struct SamRating {
  int valence;
  int arousal;

  SamRating(int v, int a) : valence(v), arousal(a) {
    if (v < 1 || v > 9) throw ValidationError("SAM valence " + std::to_string(v) + " outside [1,9]");
    if (a < 1 || a > 9) throw ValidationError("SAM arousal " + std::to_string(a) + " outside [1,9]");
  }
};

enum class EmotionLabel : int { Happy = 0, Relaxed = 1, Sad = 2, Angry = 3 };

inline constexpr std::size_t kNumClasses = 4;
inline constexpr std::array<EmotionLabel, kNumClasses> kLabelOrder = {
    EmotionLabel::Happy, EmotionLabel::Relaxed, EmotionLabel::Sad,
    EmotionLabel::Angry};

inline const char* label_name(EmotionLabel l) {
  switch (l) {
    case EmotionLabel::Happy: return "Happy";
    case EmotionLabel::Relaxed: return "Relaxed";
    case EmotionLabel::Sad: return "Sad";
    case EmotionLabel::Angry: return "Angry";
  }
  throw ValidationError("unknown label");
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // trim surrounding whitespace
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace detail

// Metadata accompanying a recording CSV (the CSV itself holds samples only).
struct RecordingMeta {
  std::string recording_id;
  std::string participant_id;
  ClipId clip_id = ClipId::ColdAir;
  double sample_rate = 256.0;
};

// Parses a recording CSV: header row `TP9,AF7,AF8,TP10`, one row of
// decimal-point floats per sample. Errors carry row/column locations.
inline EegRecording parse_recording(const std::string& csv_text,
                                    const RecordingMeta& meta) {
  std::stringstream ss(csv_text);
  std::string line;
  if (!std::getline(ss, line))
    throw ValidationError("empty recording file");
  const auto header = detail::split_csv_line(line);
  std::array<std::size_t, kNumElectrodes> col{};
  for (std::size_t c = 0; c < kNumElectrodes; ++c) {
    const std::string want = electrode_name(kElectrodeOrder[c]);
    bool found = false;
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] == want) {
        col[c] = j;
        found = true;
        break;
      }
    }
    if (!found)
      throw ValidationError("missing channel column " + want);
  }

  std::array<std::vector<double>, kNumElectrodes> channels;
  std::size_t row = 0;
  while (std::getline(ss, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = detail::split_csv_line(line);
    for (std::size_t c = 0; c < kNumElectrodes; ++c) {
      const char* chan = electrode_name(kElectrodeOrder[c]);
      if (col[c] >= cells.size())
        throw ValidationError("row " + std::to_string(row) + ": missing value for " + chan);
      double v;
      try {
        std::size_t pos = 0;
        v = std::stod(cells[col[c]], &pos);
        if (pos != cells[col[c]].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ValidationError("row " + std::to_string(row) + ", " + chan +
                              ": non-numeric cell '" + cells[col[c]] + "'");
      }
      if (!std::isfinite(v))
        throw ValidationError("row " + std::to_string(row) + ", " + chan +
                              ": non-finite value");
      channels[c].push_back(v);
    }
    ++row;
  }
  return EegRecording(meta.recording_id, meta.participant_id, meta.clip_id,
                      meta.sample_rate, std::move(channels));
}

// Writes the CSV form read back by parse_recording. Round-trips samples
// bit-exactly via max_digits10 formatting.
inline std::string serialize_recording(const EegRecording& rec) {
  std::ostringstream out;
  out.precision(17);
  out << "TP9,AF7,AF8,TP10\n";
  for (std::size_t i = 0; i < rec.num_samples(); ++i) {
    for (std::size_t c = 0; c < kNumElectrodes; ++c) {
      if (c) out << ',';
      out << rec.channel(kElectrodeOrder[c])[i];
    }
    out << '\n';
  }
  return out.str();
}

struct SessionEntry {
  EegRecording recording;
  SamRating rating;
};

// Manifest: JSON object with a "recordings" array; each element carries
// path, recording_id, participant_id, clip_id, sample_rate, valence, arousal.
// Relative paths are resolved against base_dir.
inline std::vector<SessionEntry> load_session(const std::string& manifest_text,
                                              const std::string& base_dir = ".") {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(manifest_text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("manifest parse error: ") + e.what());
  }
  if (!j.contains("recordings") || !j["recordings"].is_array())
    throw ValidationError("manifest missing 'recordings' array");

  std::vector<SessionEntry> out;
  std::map<std::string, bool> seen_ids;
  for (const auto& e : j["recordings"]) {
    RecordingMeta meta;
    meta.recording_id = e.at("recording_id").get<std::string>();
    meta.participant_id = e.at("participant_id").get<std::string>();
    meta.clip_id = clip_from_name(e.at("clip_id").get<std::string>());
    meta.sample_rate = e.at("sample_rate").get<double>();
    if (seen_ids.count(meta.recording_id))
      throw ValidationError("duplicate recording_id '" + meta.recording_id + "'");
    seen_ids[meta.recording_id] = true;

    std::string path = e.at("path").get<std::string>();
    if (!path.empty() && path[0] != '/') path = base_dir + "/" + path;
    std::ifstream f(path);
    if (!f) throw IoError("cannot open recording file '" + path + "'");
    std::stringstream buf;
    buf << f.rdbuf();

    SamRating rating(e.at("valence").get<int>(), e.at("arousal").get<int>());
    out.push_back({parse_recording(buf.str(), meta), rating});
  }
  return out;
}

}  // namespace eegemo
