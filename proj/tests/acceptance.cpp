// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// fail. Optional argv[1] is the CLI binary path, used by the determinism
// criterion to compare whole-process output bytes.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "eegemo/pipeline.hpp"
#include "eegemo/rng.hpp"
#include "qp_oracle.hpp"

using namespace eegemo;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;
std::string g_cli_path;

void check(bool ok, const std::string& detail) {
  if (!ok) throw std::runtime_error(detail);
}

void criterion(int number, const std::string& name,
               const std::function<void()>& body) {
  try {
    body();
    std::cout << "[PASS] criterion " << number << ": " << name << '\n';
  } catch (const std::exception& e) {
    ++g_failures;
    std::cout << "[FAIL] criterion " << number << ": " << name << " — "
              << e.what() << '\n';
  }
}

double elapsed_seconds(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::vector<double> sinusoid(double freq, double rate, std::size_t n) {
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i)
    s[i] = std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / rate);
  return s;
}

EegRecording same_four(const std::vector<double>& ch, double rate = 256.0) {
  return EegRecording("r", "p", ClipId::ColdAir, rate, {ch, ch, ch, ch});
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  check(f.good(), "cannot read " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

// --- criterion bodies ---

void spectral_identities() {
  const auto start = std::chrono::steady_clock::now();

  // Parseval on white noise within 5%
  Rng rng(101);
  std::vector<double> noise(16384);
  for (auto& v : noise) v = rng.normal();
  double mean = 0.0;
  for (double v : noise) mean += v;
  mean /= static_cast<double>(noise.size());
  double var = 0.0;
  for (double v : noise) var += (v - mean) * (v - mean);
  var /= static_cast<double>(noise.size());
  const auto psd = welch_psd(noise, 256.0, 256, 0.5);
  double integral = 0.0;
  for (std::size_t i = 1; i < psd.power_density.size(); ++i)
    integral += 0.5 * (psd.power_density[i - 1] + psd.power_density[i]) *
                (psd.frequencies[i] - psd.frequencies[i - 1]);
  check(std::abs(integral - var) <= 0.05 * var,
        "Parseval mismatch: integral " + std::to_string(integral) +
            " vs variance " + std::to_string(var));

  // 10 Hz tone: >= 90% of 1-44 Hz power in alpha
  const auto tone_psd = welch_psd(sinusoid(10.0, 256.0, 4096), 256.0, 256, 0.5);
  double all = 0.0;
  for (auto b : kBandOrder) all += band_power(tone_psd, b);
  check(band_power(tone_psd, Band::Alpha) >= 0.90 * all,
        "alpha fraction below 90%");

  // amplitude doubling quadruples every band power within 1e-9 relative
  auto doubled = noise;
  for (auto& v : doubled) v *= 2.0;
  const auto m1 = band_power_matrix(same_four(noise));
  const auto m2 = band_power_matrix(same_four(doubled));
  for (std::size_t c = 0; c < kNumElectrodes; ++c)
    for (std::size_t b = 0; b < kNumBands; ++b)
      check(std::abs(m2.values[c][b] - 4.0 * m1.values[c][b]) <=
                1e-9 * std::abs(4.0 * m1.values[c][b]),
            "amplitude scaling not quadratic");

  check(elapsed_seconds(start) < 5.0, "spectral checks exceeded 5 s");
}

void feature_oracles() {
  Rng rng(102);
  for (int trial = 0; trial < 100; ++trial) {
    BandPowerMatrix m;
    for (auto& row : m.values)
      for (auto& v : row) v = std::exp(rng.normal());
    const auto r = rasm(m);
    const auto d = dasm(m);
    for (std::size_t p = 0; p < kNumPairs; ++p)
      for (std::size_t b = 0; b < kNumBands; ++b) {
        const double pr = m.at(kSymmetricPairs[p].right, kBandOrder[b]);
        const double pl = m.at(kSymmetricPairs[p].left, kBandOrder[b]);
        check(std::abs(r[p * kNumBands + b] - pr / pl) <=
                  1e-12 * std::abs(pr / pl),
              "RASM deviates from direct ratio");
        check(std::abs(d[p * kNumBands + b] - (pr - pl)) <=
                  1e-12 * (std::abs(pr) + std::abs(pl)),
              "DASM deviates from direct difference");
      }

    // independent two-pass Pearson evaluation
    std::vector<double> a(40), b(40);
    for (auto& v : a) v = rng.normal();
    for (auto& v : b) v = rng.normal();
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      ma += a[i];
      mb += b[i];
    }
    ma /= static_cast<double>(a.size());
    mb /= static_cast<double>(b.size());
    double num = 0.0, da = 0.0, db = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      num += (a[i] - ma) * (b[i] - mb);
      da += (a[i] - ma) * (a[i] - ma);
      db += (b[i] - mb) * (b[i] - mb);
    }
    check(std::abs(pearson(a, b) - num / std::sqrt(da * db)) <= 1e-12,
          "Pearson deviates from long-hand evaluation");
  }

  // full-symmetry recording: amplitude-modulated tone on all channels
  std::vector<double> ch(8 * 256);
  for (std::size_t i = 0; i < ch.size(); ++i) {
    const double t = static_cast<double>(i) / 256.0;
    ch[i] = (1.0 + 0.5 * std::sin(2.0 * std::numbers::pi * 0.3 * t)) *
            std::sin(2.0 * std::numbers::pi * 10.0 * t);
  }
  const auto fv = extract_features(same_four(ch));
  check(fv.values.size() == 30, "feature vector length != 30");
  check(family_indices(FeatureFamily::Rasm).size() == 10 &&
            family_indices(FeatureFamily::Dasm).size() == 10 &&
            family_indices(FeatureFamily::Corr).size() == 10,
        "family split is not 10/10/10");
  for (std::size_t i = 0; i < 10; ++i)
    check(std::abs(fv.values[i] - 1.0) <= 1e-9, "symmetric RASM != 1");
  for (std::size_t i = 10; i < 20; ++i)
    check(std::abs(fv.values[i]) <= 1e-9, "symmetric DASM != 0");
  for (std::size_t i = 20; i < 30; ++i)
    check(fv.values[i] == 1.0, "symmetric corr != 1");
}

void labeling_totality() {
  std::array<int, kNumClasses> per_class{};
  for (int v = 1; v <= 9; ++v)
    for (int a = 1; a <= 9; ++a) {
      if (v == 5 || a == 5) continue;
      const auto l = label_from_sam(SamRating(v, a));
      check(l.has_value(), "non-midpoint rating failed to label");
      ++per_class[static_cast<std::size_t>(*l)];
      const bool pv = v > 5, pa = a > 5;
      const EmotionLabel want = pv && pa    ? EmotionLabel::Happy
                                : pv && !pa ? EmotionLabel::Relaxed
                                : !pv && !pa ? EmotionLabel::Sad
                                             : EmotionLabel::Angry;
      check(*l == want, "quadrant rule violated");
    }
  for (int c : per_class) check(c == 16, "class does not cover 16 grid points");

  check(!label_from_sam(SamRating(5, 7)).has_value(), "midpoint not rejected");
  check(label_from_sam(SamRating(5, 5), MidpointPolicy::AssignPositive) ==
            EmotionLabel::Happy,
        "assign_positive policy wrong");
  check(label_from_sam(SamRating(5, 5), MidpointPolicy::AssignNegative) ==
            EmotionLabel::Sad,
        "assign_negative policy wrong");
}

Dataset dataset_with_counts(const std::array<std::size_t, kNumClasses>& counts) {
  Dataset ds;
  for (std::size_t k = 0; k < kNumClasses; ++k)
    for (std::size_t i = 0; i < counts[k]; ++i) {
      LabeledInstance inst;
      inst.features.values.fill(static_cast<double>(k));
      inst.label = kLabelOrder[k];
      inst.recording_id = std::to_string(k) + "_" + std::to_string(i);
      ds.instances.push_back(inst);
    }
  return ds;
}

void balancing_and_folding() {
  Rng rng(104);
  for (int trial = 0; trial < 1000; ++trial) {
    std::array<std::size_t, kNumClasses> counts;
    for (auto& c : counts) c = 1 + rng.below(9);
    const auto ds = dataset_with_counts(counts);
    const auto out = resample_balance(ds, rng.next());
    check(out.size() == ds.size(), "resample changed dataset size");
    check(out.class_counts() == balanced_targets(ds.size()),
          "resample counts break the floor/ceil rule");
  }

  for (int trial = 0; trial < 1000; ++trial) {
    std::array<std::size_t, kNumClasses> counts;
    for (auto& c : counts) c = 2 + rng.below(10);
    const auto ds = dataset_with_counts(counts);
    const std::size_t k = 2 + rng.below(std::min<std::size_t>(8, ds.size() - 1));
    const auto folds = stratified_folds(ds, k, rng.next());
    std::vector<bool> seen(ds.size(), false);
    std::size_t lo = ds.size(), hi = 0;
    for (const auto& f : folds) {
      lo = std::min(lo, f.size());
      hi = std::max(hi, f.size());
      for (std::size_t i : f) {
        check(!seen[i], "folds overlap");
        seen[i] = true;
      }
    }
    for (bool s : seen) check(s, "folds do not cover the dataset");
    check(hi - lo <= 1, "fold sizes differ by more than 1");
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      std::size_t clo = ds.size(), chi = 0;
      for (const auto& f : folds) {
        std::size_t n = 0;
        for (std::size_t i : f)
          if (ds.instances[i].label == kLabelOrder[c]) ++n;
        clo = std::min(clo, n);
        chi = std::max(chi, n);
      }
      check(chi - clo <= 1, "stratification broken");
    }
  }

  const auto folds42 = stratified_folds(dataset_with_counts({11, 11, 10, 10}),
                                        10, 5);
  std::size_t fours = 0, fives = 0;
  for (const auto& f : folds42) {
    if (f.size() == 4) ++fours;
    if (f.size() == 5) ++fives;
  }
  check(fours == 8 && fives == 2, "N=42 k=10 fold sizes not {4x8, 5x2}");
}

void svm_correctness() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(105);
  KernelParams kp;
  kp.coef0 = 1.0;
  kp.degree = 2;

  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 6 + rng.below(15);
    std::vector<std::vector<double>> x(n, std::vector<double>(3));
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = i % 2 == 0 ? 1.0 : -1.0;
      for (auto& v : x[i]) v = rng.uniform() + (y[i] > 0 ? 0.3 : -0.3);
    }
    const double c_bound = 1.0 + rng.uniform() * 4.0;
    const auto res = train_binary_smo(x, y, c_bound, kp, 1e-3, rng.next());
    check(kkt_max_violation(res.model, x, y, res.alphas_full, c_bound, 1e-3) <=
              1e-6,
          "KKT verifier failed");

    std::vector<std::vector<double>> gram(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) gram[i][j] = poly_kernel(x[i], x[j], kp);
    const auto ref = oracle::solve_dual(gram, y, c_bound);
    check(std::abs(res.dual_objective - ref.objective) <=
              1e-3 * (1.0 + std::abs(ref.objective)),
          "dual objective deviates from QP oracle by " +
              std::to_string(std::abs(res.dual_objective - ref.objective)));
  }

  // XOR with the degree-2 kernel reaches 100% training accuracy
  const std::vector<std::vector<double>> xorx = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
  const std::vector<double> xory = {1, 1, -1, -1};
  const auto xres = train_binary_smo(xorx, xory, 10.0, kp, 1e-3, 9);
  for (std::size_t i = 0; i < 4; ++i)
    check(xres.model.decision(xorx[i]) * xory[i] > 0.0, "XOR misclassified");

  // Gram PSD: Rayleigh quotient of the most-negative eigendirection
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 8;
    std::vector<std::vector<double>> pts(n, std::vector<double>(4));
    for (auto& row : pts)
      for (auto& v : row) v = rng.uniform();
    std::vector<std::vector<double>> g(n, std::vector<double>(n));
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) g[i][j] = poly_kernel(pts[i], pts[j], kp);
    for (std::size_t i = 0; i < n; ++i) trace += g[i][i];
    std::vector<double> v(n, 1.0);
    for (int it = 0; it < 400; ++it) {
      std::vector<double> w(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          w[i] += ((i == j ? trace + 1.0 : 0.0) - g[i][j]) * v[j];
      double norm = 0.0;
      for (double wi : w) norm += wi * wi;
      norm = std::sqrt(norm);
      for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
    }
    double rayleigh = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) rayleigh += v[i] * g[i][j] * v[j];
    check(rayleigh >= -1e-8, "Gram matrix not PSD");
  }

  check(elapsed_seconds(start) < 60.0, "SVM checks exceeded 60 s");
}

void metric_correctness() {
  ConfusionMatrix cm;
  cm.counts[0][0] = 20;
  cm.counts[0][1] = 5;
  cm.counts[1][0] = 10;
  cm.counts[1][1] = 15;
  check(std::abs(kappa(cm) - 0.4) <= 1e-12, "kappa hand case not 0.4");

  Rng rng(106);
  ConfusionMatrix chance;
  const std::array<double, 4> marginal = {0.4, 0.3, 0.2, 0.1};
  auto draw = [&]() {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      acc += marginal[k];
      if (u < acc) return k;
    }
    return std::size_t{3};
  };
  for (int i = 0; i < 10000; ++i) ++chance.counts[draw()][draw()];
  check(std::abs(kappa(chance)) < 0.05, "chance kappa outside +/-0.05");

  // hard predictions: MAE identity and weighted recall == accuracy
  std::vector<std::array<double, 4>> dists;
  std::vector<EmotionLabel> truths;
  ConfusionMatrix hard;
  std::size_t correct = 0;
  for (int i = 0; i < 500; ++i) {
    const auto t = kLabelOrder[rng.below(4)];
    const auto p = kLabelOrder[rng.below(4)];
    std::array<double, 4> d{};
    d[static_cast<std::size_t>(p)] = 1.0;
    dists.push_back(d);
    truths.push_back(t);
    hard.add(t, p);
    if (t == p) ++correct;
  }
  const double acc = static_cast<double>(correct) / 500.0;
  const auto em = error_metrics(dists, truths, {0.25, 0.25, 0.25, 0.25});
  check(std::abs(em.mae - 2.0 * (1.0 - acc) / 4.0) <= 1e-15,
        "MAE identity violated");
  const auto prf = precision_recall_f(hard);
  check(std::abs(prf.weighted.recall - acc) <= 1e-12,
        "weighted recall != accuracy");

  // baseline predictions score RAE = RRSE = 100 exactly
  const std::array<double, 4> base = {0.4, 0.3, 0.2, 0.1};
  std::vector<std::array<double, 4>> bd(20, base);
  std::vector<EmotionLabel> bt;
  for (int i = 0; i < 20; ++i) bt.push_back(kLabelOrder[i % 4]);
  const auto bm = error_metrics(bd, bt, base);
  check(std::abs(bm.rae - 100.0) <= 1e-9 && std::abs(bm.rrse - 100.0) <= 1e-9,
        "baseline RAE/RRSE != 100");

  check(round2(100.0 * 32.0 / 42.0) == 76.19, "32/42 does not format to 76.19");
}

void end_to_end_synthetic() {
  const auto start = std::chrono::steady_clock::now();
  const auto dir = (fs::temp_directory_path() / "eegemo_accept_e2e").string();
  fs::remove_all(dir);

  nlohmann::json j;
  j["input"]["synth"] = {{"participants", 21}, {"seed", 42}, {"noise_level", 0.05}};
  j["features"]["selector"] = "each+all";
  j["eval"] = {{"folds", 10}, {"seed", 7}, {"mode", "paper_faithful"}};
  j["output_dir"] = dir;
  const auto cfg = parse_run_config(j);
  const auto res = cmd_evaluate(cfg);

  check(res.reports.size() == 4, "report does not have four rows");
  check(res.reports[0].family == FeatureFamily::Rasm &&
            res.reports[1].family == FeatureFamily::Dasm &&
            res.reports[2].family == FeatureFamily::Corr &&
            res.reports[3].family == FeatureFamily::All,
        "row order is not RASM/DASM/Correlation/All");
  const auto& all = res.reports[3];
  check(all.confusion.total() == 42, "pooled confusion total != 42");
  check(family_indices(all.family).size() == 30, "All row feature length != 30");
  check(all.accuracy >= 0.90,
        "pooled CV accuracy " + std::to_string(all.accuracy) + " below 0.90");
  check(all.kappa >= 0.80, "kappa " + std::to_string(all.kappa) + " below 0.80");
  check(std::string(cv_mode_name(all.mode)) == "paper_faithful", "wrong mode");

  fs::remove_all(dir);
  check(elapsed_seconds(start) < 120.0, "end-to-end run exceeded 2 min");
}

void determinism() {
  const auto dir = (fs::temp_directory_path() / "eegemo_accept_det").string();
  fs::remove_all(dir);
  nlohmann::json j;
  j["input"]["synth"] = {{"participants", 6},
                         {"seed", 11},
                         {"noise_level", 0.05},
                         {"clip_seconds", {{"cold_air", 8.0}, {"hot_air", 6.0}}}};
  j["features"]["selector"] = "each+all";
  j["eval"] = {{"folds", 3}, {"seed", 4}, {"mode", "leakage_safe"}};
  j["output_dir"] = dir;
  const auto cfg = parse_run_config(j);

  cmd_evaluate(cfg);
  const auto report1 = slurp(dir + "/report.json");
  const auto table1 = slurp(dir + "/report.txt");
  cmd_extract(cfg);
  const auto features1 = slurp(dir + "/features.csv");
  cmd_synth(cfg);
  const auto manifest1 = slurp(dir + "/manifest.json");
  const auto csv1 = slurp(dir + "/p1_cold_air.csv");

  cmd_evaluate(cfg);
  check(slurp(dir + "/report.json") == report1, "report.json bytes differ");
  check(slurp(dir + "/report.txt") == table1, "report.txt bytes differ");
  cmd_extract(cfg);
  check(slurp(dir + "/features.csv") == features1, "features.csv bytes differ");
  cmd_synth(cfg);
  check(slurp(dir + "/manifest.json") == manifest1, "manifest bytes differ");
  check(slurp(dir + "/p1_cold_air.csv") == csv1, "recording bytes differ");

  if (!g_cli_path.empty()) {
    const auto cfg_path = dir + "/config.json";
    {
      std::ofstream f(cfg_path);
      f << j.dump(2);
    }
    const std::string out = dir + "/cli_out";
    auto run = [&]() {
      const std::string cmd = g_cli_path + " evaluate -c " + cfg_path +
                              " --output-dir " + out + " > " + out +
                              "_stdout 2>/dev/null";
      check(std::system(cmd.c_str()) == 0, "CLI run failed: " + cmd);
      return slurp(out + "/report.json") + slurp(out + "/report.txt") +
             slurp(out + "_stdout");
    };
    const auto a = run();
    const auto b = run();
    check(a == b, "CLI reruns produced different bytes");
  }
  fs::remove_all(dir);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_cli_path = argv[1];

  criterion(1, "spectral identities", spectral_identities);
  criterion(2, "feature oracles", feature_oracles);
  criterion(3, "labeling totality", labeling_totality);
  criterion(4, "balancing and folding", balancing_and_folding);
  criterion(5, "SVM correctness", svm_correctness);
  criterion(6, "metric correctness", metric_correctness);
  criterion(7, "end-to-end synthetic", end_to_end_synthetic);
  criterion(8, "determinism", determinism);

  if (g_failures > 0) {
    std::cout << g_failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all criteria passed\n";
  return 0;
}
