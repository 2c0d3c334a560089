#pragma once

// Cross-validation driver and metric suite: confusion matrix, accuracy,
// Cohen's kappa, absolute/squared error rates against a prior baseline,
// and per-class precision/recall/F-measure.

#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "eegemo/dataset.hpp"
#include "eegemo/svm.hpp"

namespace eegemo {

struct ConfusionMatrix {
  // rows = true class, columns = predicted class
  std::array<std::array<std::size_t, kNumClasses>, kNumClasses> counts{};

  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& row : counts)
      for (auto c : row) n += c;
    return n;
  }
  std::size_t trace() const {
    std::size_t t = 0;
    for (std::size_t k = 0; k < kNumClasses; ++k) t += counts[k][k];
    return t;
  }
  std::size_t row_sum(std::size_t k) const {
    std::size_t s = 0;
    for (auto c : counts[k]) s += c;
    return s;
  }
  std::size_t col_sum(std::size_t k) const {
    std::size_t s = 0;
    for (const auto& row : counts) s += row[k];
    return s;
  }
  void add(EmotionLabel truth, EmotionLabel predicted) {
    ++counts[static_cast<std::size_t>(truth)][static_cast<std::size_t>(predicted)];
  }
};

// Cohen's kappa (p_o - p_e) / (1 - p_e). When chance agreement is total
// (p_e = 1), returns 1 for perfect agreement and 0 otherwise.
inline double kappa(const ConfusionMatrix& cm) {
  const auto n = static_cast<double>(cm.total());
  if (n == 0.0) throw ValidationError("kappa: empty confusion matrix");
  const double po = static_cast<double>(cm.trace()) / n;
  double pe = 0.0;
  for (std::size_t k = 0; k < kNumClasses; ++k)
    pe += static_cast<double>(cm.row_sum(k)) * static_cast<double>(cm.col_sum(k)) /
          (n * n);
  if (pe >= 1.0 - 1e-15) return po >= 1.0 - 1e-15 ? 1.0 : 0.0;
  return (po - pe) / (1.0 - pe);
}

struct ErrorMetrics {
  double mae = 0.0;
  double rmse = 0.0;
  double rae = 0.0;   // percent
  double rrse = 0.0;  // percent
};

// Per-instance distribution errors against one-hot truths, with the
// relative variants normalized by a constant prior-baseline predictor.
inline ErrorMetrics error_metrics(
    const std::vector<std::array<double, kNumClasses>>& dists,
    const std::vector<EmotionLabel>& truths,
    const std::array<double, kNumClasses>& baseline) {
  if (dists.size() != truths.size() || dists.empty())
    throw ValidationError("error_metrics: size mismatch or empty input");
  double bsum = 0.0;
  for (double b : baseline) bsum += b;
  if (std::abs(bsum - 1.0) > 1e-9)
    throw ValidationError("error_metrics: baseline is not a distribution");
  for (const auto& d : dists) {
    double s = 0.0;
    for (double v : d) s += v;
    if (std::abs(s - 1.0) > 1e-9)
      throw ValidationError("error_metrics: prediction is not a distribution");
  }

  const auto n = static_cast<double>(dists.size());
  double abs_err = 0.0, sq_err = 0.0, abs_base = 0.0, sq_base = 0.0;
  for (std::size_t i = 0; i < dists.size(); ++i) {
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      const double y = static_cast<std::size_t>(truths[i]) == k ? 1.0 : 0.0;
      const double dp = dists[i][k] - y;
      const double db = baseline[k] - y;
      abs_err += std::abs(dp);
      sq_err += dp * dp;
      abs_base += std::abs(db);
      sq_base += db * db;
    }
  }
  ErrorMetrics m;
  m.mae = abs_err / (n * kNumClasses);
  m.rmse = std::sqrt(sq_err / (n * kNumClasses));
  m.rae = 100.0 * abs_err / abs_base;
  m.rrse = 100.0 * std::sqrt(sq_err / sq_base);
  return m;
}

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
};

struct PrfMetrics {
  std::array<ClassMetrics, kNumClasses> per_class;
  ClassMetrics weighted;  // support-weighted averages
};

inline PrfMetrics precision_recall_f(const ConfusionMatrix& cm) {
  const auto n = static_cast<double>(cm.total());
  if (n == 0.0) throw ValidationError("precision_recall_f: empty matrix");
  PrfMetrics m;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const double tp = static_cast<double>(cm.counts[k][k]);
    const double col = static_cast<double>(cm.col_sum(k));
    const double row = static_cast<double>(cm.row_sum(k));
    auto& c = m.per_class[k];
    c.precision = col > 0.0 ? tp / col : 0.0;
    c.recall = row > 0.0 ? tp / row : 0.0;
    c.f_measure = (c.precision + c.recall) > 0.0
                      ? 2.0 * c.precision * c.recall / (c.precision + c.recall)
                      : 0.0;
    const double w = row / n;
    m.weighted.precision += w * c.precision;
    m.weighted.recall += w * c.recall;
    m.weighted.f_measure += w * c.f_measure;
  }
  return m;
}

enum class CvMode { PaperFaithful, LeakageSafe };

inline const char* cv_mode_name(CvMode m) {
  return m == CvMode::PaperFaithful ? "paper_faithful" : "leakage_safe";
}

inline CvMode cv_mode_from_name(const std::string& s) {
  if (s == "paper_faithful") return CvMode::PaperFaithful;
  if (s == "leakage_safe") return CvMode::LeakageSafe;
  throw ValidationError("unknown cv mode '" + s + "'");
}

struct EvalReport {
  FeatureFamily family = FeatureFamily::All;
  ConfusionMatrix confusion;
  double accuracy = 0.0;  // fraction
  double kappa = 0.0;
  ErrorMetrics errors;
  PrfMetrics prf;
  CvMode mode = CvMode::PaperFaithful;
  nlohmann::json config_echo;
};

namespace detail {

using eegemo::derive_seed;

inline std::vector<std::vector<double>> select_features(
    const Dataset& ds, const std::vector<std::size_t>& idx) {
  std::vector<std::vector<double>> rows(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    rows[i].reserve(idx.size());
    for (std::size_t j : idx) rows[i].push_back(ds.instances[i].features.values[j]);
  }
  return rows;
}

}  // namespace detail

// k-fold cross-validation with pooled confusion matrix and prediction
// distributions. PaperFaithful resamples the whole dataset to balance
// before folding; LeakageSafe folds first and resamples only each
// training split.
inline EvalReport cross_validate(const Dataset& ds, std::size_t k,
                                 const SvmConfig& svm_cfg, std::uint64_t seed,
                                 CvMode mode,
                                 FeatureFamily family = FeatureFamily::All) {
  const auto idx = family_indices(family);

  Dataset work = mode == CvMode::PaperFaithful
                     ? resample_balance(ds, detail::derive_seed(seed, 1))
                     : ds;
  const auto folds = stratified_folds(work, k, detail::derive_seed(seed, 2));
  const auto rows = detail::select_features(work, idx);

  // baseline priors of the evaluated dataset
  std::array<double, kNumClasses> baseline{};
  for (const auto& inst : work.instances)
    baseline[static_cast<std::size_t>(inst.label)] += 1.0;
  for (double& b : baseline) b /= static_cast<double>(work.size());

  ConfusionMatrix cm;
  std::vector<std::array<double, kNumClasses>> dists;
  std::vector<EmotionLabel> truths;
  dists.reserve(work.size());

  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<bool> held(work.size(), false);
    for (std::size_t i : folds[f]) held[i] = true;

    Dataset train_ds;
    for (std::size_t i = 0; i < work.size(); ++i)
      if (!held[i]) train_ds.instances.push_back(work.instances[i]);
    if (mode == CvMode::LeakageSafe)
      train_ds = resample_balance(train_ds, detail::derive_seed(seed, 100 + f));

    const auto counts = train_ds.class_counts();
    for (std::size_t c = 0; c < kNumClasses; ++c)
      if (counts[c] == 0)
        throw ValidationError(
            std::string("fold ") + std::to_string(f) +
            " training split is missing class " + label_name(kLabelOrder[c]) +
            "; use a smaller k or rebalance the dataset");

    std::vector<std::vector<double>> train_x =
        detail::select_features(train_ds, idx);
    std::vector<EmotionLabel> train_y;
    for (const auto& inst : train_ds.instances) train_y.push_back(inst.label);

    const auto model = train_multiclass(train_x, train_y, svm_cfg,
                                        detail::derive_seed(seed, 200 + f));
    for (std::size_t i : folds[f]) {
      const auto pred = predict(model, rows[i]);
      cm.add(work.instances[i].label, pred.label);
      dists.push_back(pred.distribution);
      truths.push_back(work.instances[i].label);
    }
  }

  EvalReport rep;
  rep.family = family;
  rep.confusion = cm;
  rep.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(cm.total());
  rep.kappa = kappa(cm);
  rep.errors = error_metrics(dists, truths, baseline);
  rep.prf = precision_recall_f(cm);
  rep.mode = mode;
  rep.config_echo = {
      {"k", k},
      {"seed", seed},
      {"mode", cv_mode_name(mode)},
      {"feature_family", family_name(family)},
      {"svm", {{"C", svm_cfg.c_bound},
               {"degree", svm_cfg.kernel.degree},
               {"coef0", svm_cfg.kernel.coef0},
               {"tol", svm_cfg.tol}}},
  };
  return rep;
}

// Round half up to two decimals, e.g. 32/42 -> 76.19.
inline double round2(double percent) {
  return std::floor(percent * 100.0 + 0.5) / 100.0;
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j;
  j["feature_set"] = family_name(r.family);
  j["accuracy_percent"] = round2(100.0 * r.accuracy);
  j["mae"] = r.errors.mae;
  j["rmse"] = r.errors.rmse;
  j["rae_percent"] = r.errors.rae;
  j["rrse_percent"] = r.errors.rrse;
  j["kappa"] = r.kappa;
  j["confusion"] = nlohmann::json::array();
  for (std::size_t t = 0; t < kNumClasses; ++t)
    j["confusion"].push_back(r.confusion.counts[t]);
  j["classes"] = nlohmann::json::array();
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    j["classes"].push_back({{"label", label_name(kLabelOrder[c])},
                            {"precision", r.prf.per_class[c].precision},
                            {"recall", r.prf.per_class[c].recall},
                            {"f_measure", r.prf.per_class[c].f_measure}});
  }
  j["weighted"] = {{"precision", r.prf.weighted.precision},
                   {"recall", r.prf.weighted.recall},
                   {"f_measure", r.prf.weighted.f_measure}};
  j["config"] = r.config_echo;
  return j;
}

// Aligned plain-text table, one row per report.
inline std::string format_report_table(const std::vector<EvalReport>& reports) {
  std::ostringstream out;
  out << std::left << std::setw(13) << "Feature set" << std::right
      << std::setw(12) << "Accuracy(%)" << std::setw(9) << "MAE"
      << std::setw(9) << "RMSE" << std::setw(10) << "RAE" << std::setw(10)
      << "RRSE" << std::setw(9) << "Kappa" << '\n';
  out << std::string(72, '-') << '\n';
  out << std::fixed;
  for (const auto& r : reports) {
    out << std::left << std::setw(13) << family_name(r.family) << std::right
        << std::setw(12) << std::setprecision(2) << round2(100.0 * r.accuracy)
        << std::setw(9) << std::setprecision(3) << r.errors.mae
        << std::setw(9) << std::setprecision(3) << r.errors.rmse
        << std::setw(10) << std::setprecision(2) << r.errors.rae
        << std::setw(10) << std::setprecision(2) << r.errors.rrse
        << std::setw(9) << std::setprecision(3) << r.kappa << '\n';
  }
  return out.str();
}

}  // namespace eegemo
