// Command-line front end: `synth`, `extract`, and `evaluate`, all driven
// by a single JSON configuration file (see configs/example.json).
//
// Exit codes: 0 success, 2 validation error, 3 solver convergence
// failure, 4 I/O error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "eegemo/pipeline.hpp"

namespace {

eegemo::RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw eegemo::IoError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  nlohmann::json j;
  try {
    // last arg allows // and /* */ comments in config files
    j = nlohmann::json::parse(buf.str(), nullptr, true, true);
  } catch (const nlohmann::json::exception& e) {
    throw eegemo::ValidationError(std::string("config parse error: ") + e.what());
  }
  return eegemo::parse_run_config(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EEG emotion-recognition pipeline: spectral asymmetry "
               "features, polynomial-kernel SVM, cross-validated metrics"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir_override;
  std::string selector_override;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path, "JSON run configuration")
        ->required();
    cmd->add_option("--output-dir", output_dir_override,
                    "override output_dir from the config");
  };

  auto* synth = app.add_subcommand("synth", "generate a synthetic session");
  add_common(synth);
  auto* extract = app.add_subcommand("extract", "write the feature table");
  add_common(extract);
  extract->add_option("--selector", selector_override,
                      "override features.selector");
  auto* evaluate = app.add_subcommand("evaluate",
                                      "cross-validated evaluation reports");
  add_common(evaluate);
  evaluate->add_option("--selector", selector_override,
                       "override features.selector");

  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = load_config(config_path);
    if (!output_dir_override.empty()) cfg.output_dir = output_dir_override;
    if (!selector_override.empty())
      cfg.selector = eegemo::selector_from_name(selector_override);

    if (synth->parsed()) {
      const auto manifest = eegemo::cmd_synth(cfg);
      std::cout << manifest << '\n';
    } else if (extract->parsed()) {
      const auto path = eegemo::cmd_extract(cfg);
      std::cout << path << '\n';
    } else {
      const auto res = eegemo::cmd_evaluate(cfg);
      std::cout << eegemo::format_report_table(res.reports);
      for (const auto& w : res.warnings)
        std::cerr << "warning: " << w.recording_id << ": " << w.reason
                  << " (valence=" << w.valence << ", arousal=" << w.arousal
                  << ")\n";
      std::cout << "report: " << res.json_path << '\n';
    }
    return 0;
  } catch (const eegemo::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const eegemo::ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << '\n';
    return 3;
  } catch (const eegemo::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
