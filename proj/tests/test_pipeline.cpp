#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "eegemo/pipeline.hpp"

using namespace eegemo;

namespace {

namespace fs = std::filesystem;

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  std::stringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

RunConfig small_synth_config(const std::string& out_dir) {
  nlohmann::json j;
  j["input"]["synth"] = {{"participants", 6}, {"seed", 5}, {"noise_level", 0.02},
                         {"clip_seconds", {{"cold_air", 8.0}, {"hot_air", 6.0}}}};
  j["eval"] = {{"folds", 3}, {"seed", 2}, {"mode", "paper_faithful"}};
  j["output_dir"] = out_dir;
  return parse_run_config(j);
}

}  // namespace

TEST_CASE("run config parsing applies defaults and validates") {
  nlohmann::json j;
  j["input"]["manifest"] = "m.json";
  const auto cfg = parse_run_config(j);
  REQUIRE(cfg.folds == 10);
  REQUIRE(cfg.selector == Selector::EachPlusAll);
  REQUIRE(cfg.svm.kernel.degree == 3);
  REQUIRE(cfg.spectral.segment_length == 256);
  REQUIRE(cfg.midpoint_policy == MidpointPolicy::Reject);

  REQUIRE_THROWS_AS(parse_run_config(nlohmann::json::object()), ValidationError);
  j["eval"]["folds"] = 1;
  REQUIRE_THROWS_AS(parse_run_config(j), ValidationError);
  j["eval"]["folds"] = 10;
  j["features"]["selector"] = "bogus";
  REQUIRE_THROWS_AS(parse_run_config(j), ValidationError);
}

TEST_CASE("extract writes the selected feature columns") {
  const auto dir = (fs::temp_directory_path() / "eegemo_pipe_extract").string();
  fs::remove_all(dir);
  auto cfg = small_synth_config(dir);

  SECTION("selector all gives 30 feature columns") {
    cfg.selector = Selector::All;
    const auto path = cmd_extract(cfg);
    std::istringstream table(slurp(path));
    std::string header;
    std::getline(table, header);
    REQUIRE(std::count(header.begin(), header.end(), ',') == 31);  // id + 30 + label
    std::string row;
    std::size_t rows = 0;
    while (std::getline(table, row)) ++rows;
    REQUIRE(rows == 12);
    REQUIRE(fs::exists(fs::path(dir) / "config_echo.json"));
  }
  SECTION("selector rasm gives 10 feature columns") {
    cfg.selector = Selector::Rasm;
    std::istringstream table(slurp(cmd_extract(cfg)));
    std::string header;
    std::getline(table, header);
    REQUIRE(std::count(header.begin(), header.end(), ',') == 11);
    REQUIRE(header.find("rasm_tp_delta") != std::string::npos);
    REQUIRE(header.find("dasm") == std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("extract on an empty manifest fails without output") {
  const auto dir = (fs::temp_directory_path() / "eegemo_pipe_empty").string();
  fs::remove_all(dir);
  nlohmann::json j;
  j["input"]["manifest"] = dir + "/manifest.json";
  j["output_dir"] = dir + "/out";
  fs::create_directories(dir);
  {
    std::ofstream f(dir + "/manifest.json");
    f << R"({"recordings":[]})";
  }
  const auto cfg = parse_run_config(j);
  REQUIRE_THROWS_AS(cmd_extract(cfg), ValidationError);
  REQUIRE_FALSE(fs::exists(dir + "/out/features.csv"));
  fs::remove_all(dir);
}

TEST_CASE("evaluate produces the four-row report with config echo") {
  const auto dir = (fs::temp_directory_path() / "eegemo_pipe_eval").string();
  fs::remove_all(dir);
  const auto cfg = small_synth_config(dir);
  const auto res = cmd_evaluate(cfg);
  REQUIRE(res.reports.size() == 4);
  REQUIRE(res.reports[0].family == FeatureFamily::Rasm);
  REQUIRE(res.reports[3].family == FeatureFamily::All);

  const auto j = nlohmann::json::parse(slurp(res.json_path));
  REQUIRE(j["rows"].size() == 4);
  REQUIRE(j["rows"][3]["feature_set"] == "All");
  REQUIRE(j["config"]["eval"]["mode"] == "paper_faithful");

  const auto table = slurp(res.table_path);
  REQUIRE(table.find("RASM") != std::string::npos);
  REQUIRE(table.find("All") != std::string::npos);

  SECTION("reruns are byte-identical") {
    const auto first_json = slurp(res.json_path);
    const auto first_table = slurp(res.table_path);
    const auto res2 = cmd_evaluate(cfg);
    REQUIRE(slurp(res2.json_path) == first_json);
    REQUIRE(slurp(res2.table_path) == first_table);
  }
  fs::remove_all(dir);
}

TEST_CASE("midpoint ratings become warnings, not errors") {
  const auto dir = (fs::temp_directory_path() / "eegemo_pipe_warn").string();
  fs::remove_all(dir);
  SynthSpec spec;
  spec.participants = 6;
  spec.clip_seconds = {{ClipId::ColdAir, 8.0}, {ClipId::HotAir, 6.0}};
  auto session = generate_session(spec);
  std::vector<SessionEntry> entries;
  for (const auto& e : session) entries.push_back({e.recording, e.rating});
  entries[0].rating = SamRating(5, 7);  // midpoint valence

  const auto built =
      build_dataset(entries, SpectralConfig{}, MidpointPolicy::Reject);
  REQUIRE(built.warnings.size() == 1);
  REQUIRE(built.warnings[0].valence == 5);
  REQUIRE(built.dataset.size() == entries.size() - 1);

  const auto kept =
      build_dataset(entries, SpectralConfig{}, MidpointPolicy::AssignPositive);
  REQUIRE(kept.warnings.empty());
  REQUIRE(kept.dataset.size() == entries.size());
  fs::remove_all(dir);
}

TEST_CASE("synth command writes a session and the config echo") {
  const auto dir = (fs::temp_directory_path() / "eegemo_pipe_synth").string();
  fs::remove_all(dir);
  auto cfg = small_synth_config(dir);
  const auto manifest = cmd_synth(cfg);
  REQUIRE(fs::exists(manifest));
  std::size_t csvs = 0;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".csv") ++csvs;
  REQUIRE(csvs == 12);
  REQUIRE(fs::exists(fs::path(dir) / "config_echo.json"));
  fs::remove_all(dir);
}
