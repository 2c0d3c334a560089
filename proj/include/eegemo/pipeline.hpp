#pragma once

// Run configuration and the end-to-end commands behind the CLI:
// synth (write a synthetic session), extract (feature table), and
// evaluate (cross-validated reports). Everything is driven by one JSON
// config file; each run writes a config echo sufficient to reproduce it.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "eegemo/core.hpp"
#include "eegemo/dataset.hpp"
#include "eegemo/eval.hpp"
#include "eegemo/features.hpp"
#include "eegemo/spectral.hpp"
#include "eegemo/svm.hpp"
#include "eegemo/synth.hpp"

namespace eegemo {

enum class Selector { Rasm, Dasm, Corr, All, EachPlusAll };

inline const char* selector_name(Selector s) {
  switch (s) {
    case Selector::Rasm: return "rasm";
    case Selector::Dasm: return "dasm";
    case Selector::Corr: return "corr";
    case Selector::All: return "all";
    case Selector::EachPlusAll: return "each+all";
  }
  throw ValidationError("unknown selector");
}

inline Selector selector_from_name(const std::string& s) {
  if (s == "rasm") return Selector::Rasm;
  if (s == "dasm") return Selector::Dasm;
  if (s == "corr") return Selector::Corr;
  if (s == "all") return Selector::All;
  if (s == "each+all") return Selector::EachPlusAll;
  throw ValidationError("unknown feature selector '" + s + "'");
}

inline std::vector<FeatureFamily> selector_families(Selector s) {
  switch (s) {
    case Selector::Rasm: return {FeatureFamily::Rasm};
    case Selector::Dasm: return {FeatureFamily::Dasm};
    case Selector::Corr: return {FeatureFamily::Corr};
    case Selector::All: return {FeatureFamily::All};
    case Selector::EachPlusAll:
      return {FeatureFamily::Rasm, FeatureFamily::Dasm, FeatureFamily::Corr,
              FeatureFamily::All};
  }
  throw ValidationError("unknown selector");
}

struct RunConfig {
  std::string manifest_path;  // empty when running on a synth spec
  bool has_synth = false;
  SynthSpec synth;
  SpectralConfig spectral;
  Selector selector = Selector::EachPlusAll;
  SvmConfig svm;
  std::size_t folds = 10;
  std::uint64_t seed = 7;
  CvMode mode = CvMode::PaperFaithful;
  MidpointPolicy midpoint_policy = MidpointPolicy::Reject;
  std::string output_dir = "out";
};

inline RunConfig parse_run_config(const nlohmann::json& j) {
  RunConfig cfg;
  if (j.contains("input")) {
    const auto& in = j["input"];
    if (in.contains("manifest")) cfg.manifest_path = in["manifest"].get<std::string>();
    if (in.contains("synth")) {
      cfg.has_synth = true;
      const auto& s = in["synth"];
      if (s.contains("participants")) cfg.synth.participants = s["participants"].get<std::size_t>();
      if (s.contains("sample_rate")) cfg.synth.sample_rate = s["sample_rate"].get<double>();
      if (s.contains("noise_level")) cfg.synth.noise_level = s["noise_level"].get<double>();
      if (s.contains("seed")) cfg.synth.seed = s["seed"].get<std::uint64_t>();
      if (s.contains("clip_seconds")) {
        cfg.synth.clip_seconds[ClipId::ColdAir] = s["clip_seconds"].at("cold_air").get<double>();
        cfg.synth.clip_seconds[ClipId::HotAir] = s["clip_seconds"].at("hot_air").get<double>();
      }
    }
  }
  if (cfg.manifest_path.empty() && !cfg.has_synth)
    throw ValidationError("config needs input.manifest or input.synth");
  if (j.contains("spectral")) {
    const auto& s = j["spectral"];
    if (s.contains("segment_length")) cfg.spectral.segment_length = s["segment_length"].get<std::size_t>();
    if (s.contains("overlap_fraction")) cfg.spectral.overlap_fraction = s["overlap_fraction"].get<double>();
    if (s.contains("window_seconds")) cfg.spectral.window_seconds = s["window_seconds"].get<double>();
    if (s.contains("hop_seconds")) cfg.spectral.hop_seconds = s["hop_seconds"].get<double>();
    if (s.contains("gamma_hi")) cfg.spectral.gamma_hi = s["gamma_hi"].get<double>();
  }
  if (j.contains("features") && j["features"].contains("selector"))
    cfg.selector = selector_from_name(j["features"]["selector"].get<std::string>());
  if (j.contains("svm")) {
    const auto& s = j["svm"];
    if (s.contains("C")) cfg.svm.c_bound = s["C"].get<double>();
    if (s.contains("degree")) cfg.svm.kernel.degree = s["degree"].get<int>();
    if (s.contains("coef0")) cfg.svm.kernel.coef0 = s["coef0"].get<double>();
    if (s.contains("tol")) cfg.svm.tol = s["tol"].get<double>();
  }
  if (j.contains("eval")) {
    const auto& e = j["eval"];
    if (e.contains("folds")) cfg.folds = e["folds"].get<std::size_t>();
    if (e.contains("seed")) cfg.seed = e["seed"].get<std::uint64_t>();
    if (e.contains("mode")) cfg.mode = cv_mode_from_name(e["mode"].get<std::string>());
    if (e.contains("midpoint_policy"))
      cfg.midpoint_policy = midpoint_policy_from_name(e["midpoint_policy"].get<std::string>());
  }
  if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
  if (cfg.folds < 2) throw ValidationError("eval.folds must be >= 2");
  return cfg;
}

// Fully resolved settings, written next to every run's outputs.
inline nlohmann::json config_echo(const RunConfig& cfg) {
  nlohmann::json j;
  if (!cfg.manifest_path.empty()) j["input"]["manifest"] = cfg.manifest_path;
  if (cfg.has_synth) {
    j["input"]["synth"] = {
        {"participants", cfg.synth.participants},
        {"sample_rate", cfg.synth.sample_rate},
        {"noise_level", cfg.synth.noise_level},
        {"seed", cfg.synth.seed},
        {"clip_seconds",
         {{"cold_air", cfg.synth.clip_seconds.at(ClipId::ColdAir)},
          {"hot_air", cfg.synth.clip_seconds.at(ClipId::HotAir)}}}};
  }
  j["spectral"] = {{"segment_length", cfg.spectral.segment_length},
                   {"overlap_fraction", cfg.spectral.overlap_fraction},
                   {"window_seconds", cfg.spectral.window_seconds},
                   {"hop_seconds", cfg.spectral.hop_seconds},
                   {"gamma_hi", cfg.spectral.gamma_hi}};
  j["features"] = {{"selector", selector_name(cfg.selector)}};
  j["svm"] = {{"C", cfg.svm.c_bound},
              {"degree", cfg.svm.kernel.degree},
              {"coef0", cfg.svm.kernel.coef0},
              {"tol", cfg.svm.tol}};
  j["eval"] = {{"folds", cfg.folds},
               {"seed", cfg.seed},
               {"mode", cv_mode_name(cfg.mode)},
               {"midpoint_policy", midpoint_policy_name(cfg.midpoint_policy)}};
  j["output_dir"] = cfg.output_dir;
  return j;
}

struct LabelWarning {
  std::string recording_id;
  int valence;
  int arousal;
  std::string reason;
};

struct BuiltDataset {
  Dataset dataset;
  std::vector<LabelWarning> warnings;
};

// Feature extraction plus SAM labeling over a loaded session. Midpoint
// ratings excluded by policy become warning records, not errors.
inline BuiltDataset build_dataset(const std::vector<SessionEntry>& session,
                                  const SpectralConfig& spectral,
                                  MidpointPolicy policy) {
  BuiltDataset out;
  for (const auto& entry : session) {
    const auto label = label_from_sam(entry.rating, policy);
    if (!label) {
      out.warnings.push_back({entry.recording.recording_id(),
                              entry.rating.valence, entry.rating.arousal,
                              "midpoint SAM rating excluded"});
      continue;
    }
    out.dataset.instances.push_back({extract_features(entry.recording, spectral),
                                     *label, entry.recording.recording_id()});
  }
  return out;
}

inline std::vector<SessionEntry> load_input_session(const RunConfig& cfg) {
  if (!cfg.manifest_path.empty()) {
    std::ifstream f(cfg.manifest_path);
    if (!f) throw IoError("cannot open manifest '" + cfg.manifest_path + "'");
    std::stringstream buf;
    buf << f.rdbuf();
    const auto dir = std::filesystem::path(cfg.manifest_path).parent_path();
    return load_session(buf.str(), dir.empty() ? "." : dir.string());
  }
  const auto synth = generate_session(cfg.synth);
  std::vector<SessionEntry> session;
  session.reserve(synth.size());
  for (const auto& e : synth) session.push_back({e.recording, e.rating});
  return session;
}

namespace detail {

inline void write_text(const std::string& path, const std::string& text) {
  std::filesystem::create_directories(
      std::filesystem::path(path).parent_path().empty()
          ? "."
          : std::filesystem::path(path).parent_path().string());
  std::ofstream f(path);
  if (!f) throw IoError("cannot write '" + path + "'");
  f << text;
}

inline void write_config_echo(const RunConfig& cfg) {
  write_text(cfg.output_dir + "/config_echo.json", config_echo(cfg).dump(2) + "\n");
}

}  // namespace detail

// `synth`: writes recording CSVs and a manifest; returns the manifest path.
inline std::string cmd_synth(const RunConfig& cfg) {
  if (!cfg.has_synth) throw ValidationError("synth command needs input.synth");
  const auto path = write_session(cfg.synth, cfg.output_dir);
  detail::write_config_echo(cfg);
  return path;
}

// `extract`: one CSV row per recording with the selected feature columns
// and the label; returns the table path.
inline std::string cmd_extract(const RunConfig& cfg) {
  const auto session = load_input_session(cfg);
  if (session.empty()) throw ValidationError("input session is empty");
  const auto built = build_dataset(session, cfg.spectral, cfg.midpoint_policy);

  // each+all exports the full 30-column table
  const auto idx = family_indices(cfg.selector == Selector::EachPlusAll
                                      ? FeatureFamily::All
                                      : selector_families(cfg.selector).front());
  const auto names = feature_names();

  std::ostringstream out;
  out.precision(17);
  out << "recording_id";
  for (std::size_t j : idx) out << ',' << names[j];
  out << ",label\n";
  for (const auto& inst : built.dataset.instances) {
    out << inst.recording_id;
    for (std::size_t j : idx) out << ',' << inst.features.values[j];
    out << ',' << label_name(inst.label) << '\n';
  }
  const std::string path = cfg.output_dir + "/features.csv";
  detail::write_text(path, out.str());
  detail::write_config_echo(cfg);
  return path;
}

struct EvaluateResult {
  std::vector<EvalReport> reports;  // one per feature family in selector order
  std::vector<LabelWarning> warnings;
  std::string json_path;
  std::string table_path;
};

// `evaluate`: label -> balance -> folds -> train -> predict -> metrics,
// one report row per selected feature family.
inline EvaluateResult cmd_evaluate(const RunConfig& cfg) {
  const auto session = load_input_session(cfg);
  if (session.empty()) throw ValidationError("input session is empty");
  auto built = build_dataset(session, cfg.spectral, cfg.midpoint_policy);

  EvaluateResult res;
  res.warnings = built.warnings;
  for (auto fam : selector_families(cfg.selector)) {
    auto rep = cross_validate(built.dataset, cfg.folds, cfg.svm, cfg.seed,
                              cfg.mode, fam);
    rep.config_echo = config_echo(cfg);
    res.reports.push_back(std::move(rep));
  }

  nlohmann::json j;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : res.reports) j["rows"].push_back(to_json(r));
  j["warnings"] = nlohmann::json::array();
  for (const auto& w : res.warnings)
    j["warnings"].push_back({{"recording_id", w.recording_id},
                             {"valence", w.valence},
                             {"arousal", w.arousal},
                             {"reason", w.reason}});
  j["config"] = config_echo(cfg);

  res.json_path = cfg.output_dir + "/report.json";
  res.table_path = cfg.output_dir + "/report.txt";
  detail::write_text(res.json_path, j.dump(2) + "\n");
  detail::write_text(res.table_path, format_report_table(res.reports));
  detail::write_config_echo(cfg);
  return res;
}

}  // namespace eegemo
