#pragma once

// Soft-margin kernel SVM with a polynomial kernel, trained by sequential
// minimal optimization. Multiclass is one-vs-one over the four emotion
// classes with hard voting.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "eegemo/core.hpp"
#include "eegemo/rng.hpp"

namespace eegemo {

struct KernelParams {
  double coef0 = 1.0;  // additive constant c
  int degree = 3;

  void validate() const {
    if (degree < 1) throw ValidationError("kernel degree must be >= 1");
    if (coef0 < 0.0) throw ValidationError("kernel constant must be >= 0");
  }
};

// (a.b + c)^deg, exact integer power by repeated multiplication.
inline double poly_kernel(const std::vector<double>& a,
                          const std::vector<double>& b,
                          const KernelParams& p) {
  if (a.size() != b.size())
    throw ValidationError("poly_kernel: dimension mismatch");
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  const double base = dot + p.coef0;
  double r = 1.0;
  for (int d = 0; d < p.degree; ++d) r *= base;
  return r;
}

// Per-feature min-max scaling to [0,1], fitted on training data only.
// Constant features map to 0; apply clamps unseen values into range.
struct NormalizationParams {
  std::vector<double> min;
  std::vector<double> max;

  static NormalizationParams fit(const std::vector<std::vector<double>>& rows) {
    if (rows.empty())
      throw ValidationError("normalize_fit: need at least one vector");
    NormalizationParams p;
    p.min = rows[0];
    p.max = rows[0];
    for (const auto& r : rows)
      for (std::size_t j = 0; j < r.size(); ++j) {
        p.min[j] = std::min(p.min[j], r[j]);
        p.max[j] = std::max(p.max[j], r[j]);
      }
    return p;
  }

  std::vector<double> apply(const std::vector<double>& x) const {
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double range = max[j] - min[j];
      out[j] = range > 0.0 ? std::clamp((x[j] - min[j]) / range, 0.0, 1.0) : 0.0;
    }
    return out;
  }
};

struct BinaryModel {
  std::vector<std::vector<double>> support_vectors;
  std::vector<double> alphas;  // in [0, C]
  std::vector<double> signs;   // +1 / -1 per support vector
  double bias = 0.0;
  KernelParams kernel;

  double decision(const std::vector<double>& x) const {
    double f = bias;
    for (std::size_t i = 0; i < support_vectors.size(); ++i)
      f += alphas[i] * signs[i] * poly_kernel(support_vectors[i], x, kernel);
    return f;
  }
};

namespace detail {

// Platt-style SMO working state over a precomputed Gram matrix.
struct SmoState {
  const std::vector<double>* y;
  const std::vector<std::vector<double>>* gram;
  double c_bound;
  double tol;
  std::vector<double> alpha;
  std::vector<double> error;  // u(x_i) - y_i, with u = sum(alpha y K) - bias
  double bias = 0.0;          // Platt threshold convention

  bool take_step(std::size_t i1, std::size_t i2) {
    if (i1 == i2) return false;
    const double a1 = alpha[i1], a2 = alpha[i2];
    const double y1 = (*y)[i1], y2 = (*y)[i2];
    const double e1 = error[i1], e2 = error[i2];
    const double s = y1 * y2;

    double lo, hi;
    if (s < 0.0) {
      lo = std::max(0.0, a2 - a1);
      hi = std::min(c_bound, c_bound + a2 - a1);
    } else {
      lo = std::max(0.0, a1 + a2 - c_bound);
      hi = std::min(c_bound, a1 + a2);
    }
    if (lo >= hi) return false;

    const double k11 = (*gram)[i1][i1], k22 = (*gram)[i2][i2], k12 = (*gram)[i1][i2];
    const double eta = k11 + k22 - 2.0 * k12;
    double a2new;
    if (eta > 0.0) {
      a2new = std::clamp(a2 + y2 * (e1 - e2) / eta, lo, hi);
    } else {
      // objective is linear or concave along the constraint; test both ends
      const double f1 = y1 * (e1 + bias) - a1 * k11 - s * a2 * k12;
      const double f2 = y2 * (e2 + bias) - s * a1 * k12 - a2 * k22;
      const double l1 = a1 + s * (a2 - lo);
      const double h1 = a1 + s * (a2 - hi);
      const double obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 +
                            0.5 * lo * lo * k22 + s * lo * l1 * k12;
      const double obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 +
                            0.5 * hi * hi * k22 + s * hi * h1 * k12;
      if (obj_lo < obj_hi - 1e-12) a2new = lo;
      else if (obj_lo > obj_hi + 1e-12) a2new = hi;
      else a2new = a2;
    }
    if (std::abs(a2new - a2) < 1e-12 * (a2new + a2 + 1e-12)) return false;

    const double a1new = a1 + s * (a2 - a2new);
    const double b1 = e1 + y1 * (a1new - a1) * k11 + y2 * (a2new - a2) * k12 + bias;
    const double b2 = e2 + y1 * (a1new - a1) * k12 + y2 * (a2new - a2) * k22 + bias;
    double bnew;
    if (a1new > 0.0 && a1new < c_bound) bnew = b1;
    else if (a2new > 0.0 && a2new < c_bound) bnew = b2;
    else bnew = 0.5 * (b1 + b2);

    const double db = bnew - bias;
    for (std::size_t i = 0; i < error.size(); ++i)
      error[i] += y1 * (a1new - a1) * (*gram)[i1][i] +
                  y2 * (a2new - a2) * (*gram)[i2][i] - db;
    alpha[i1] = a1new;
    alpha[i2] = a2new;
    bias = bnew;
    return true;
  }

  bool examine(std::size_t i2, Rng& rng) {
    const double y2 = (*y)[i2], a2 = alpha[i2], e2 = error[i2];
    const double r2 = e2 * y2;
    if (!((r2 < -tol && a2 < c_bound) || (r2 > tol && a2 > 0.0))) return false;

    // second choice: maximize |E1 - E2| over non-bound points
    std::size_t best = i2;
    double best_gap = -1.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      if (alpha[i] > 0.0 && alpha[i] < c_bound) {
        const double gap = std::abs(error[i] - e2);
        if (gap > best_gap) {
          best_gap = gap;
          best = i;
        }
      }
    }
    if (best != i2 && take_step(best, i2)) return true;

    const std::size_t n = alpha.size();
    std::size_t start = static_cast<std::size_t>(rng.below(n));
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = (start + k) % n;
      if (alpha[i] > 0.0 && alpha[i] < c_bound && take_step(i, i2)) return true;
    }
    start = static_cast<std::size_t>(rng.below(n));
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = (start + k) % n;
      if (take_step(i, i2)) return true;
    }
    return false;
  }
};

}  // namespace detail

// Maximum excess of the tol-relaxed KKT conditions over a training set;
// independent of the solver's own stopping test in that it recomputes
// every decision value from scratch.
inline double kkt_max_violation(const BinaryModel& model,
                                const std::vector<std::vector<double>>& x,
                                const std::vector<double>& y,
                                const std::vector<double>& alphas_full,
                                double c_bound, double tol) {
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = y[i] * model.decision(x[i]);
    const double a = alphas_full[i];
    double viol = 0.0;
    if (a < 1e-9) viol = (1.0 - tol) - u;
    else if (a > c_bound - 1e-9) viol = u - (1.0 + tol);
    else viol = std::abs(u - 1.0) - tol;
    worst = std::max(worst, viol);
  }
  return worst;
}

// Dual objective sum(alpha) - 0.5 * sum_ij alpha_i alpha_j y_i y_j K_ij.
inline double dual_objective(const std::vector<double>& alpha,
                             const std::vector<double>& y,
                             const std::vector<std::vector<double>>& gram) {
  double obj = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    obj += alpha[i];
    for (std::size_t j = 0; j < alpha.size(); ++j)
      obj -= 0.5 * alpha[i] * alpha[j] * y[i] * y[j] * gram[i][j];
  }
  return obj;
}

struct BinaryTrainResult {
  BinaryModel model;
  std::vector<double> alphas_full;  // per training point, incl. zeros
  double dual_objective = 0.0;
};

// Trains a binary soft-margin SVM by SMO. y entries must be +1 or -1;
// terminates when no tol-level KKT violation remains.
inline BinaryTrainResult train_binary_smo(const std::vector<std::vector<double>>& x,
                                          const std::vector<double>& y,
                                          double c_bound, const KernelParams& p,
                                          double tol, std::uint64_t seed) {
  p.validate();
  if (c_bound <= 0.0) throw ValidationError("C must be positive");
  if (tol <= 0.0) throw ValidationError("tol must be positive");
  if (x.size() != y.size() || x.empty())
    throw ValidationError("train_binary_smo: bad input sizes");
  bool has_pos = false, has_neg = false;
  for (double yi : y) {
    if (yi == 1.0) has_pos = true;
    else if (yi == -1.0) has_neg = true;
    else throw ValidationError("labels must be +1 or -1");
  }
  if (!has_pos || !has_neg)
    throw ValidationError("train_binary_smo: single-class input");
  for (const auto& row : x)
    for (double v : row)
      if (!std::isfinite(v)) throw ValidationError("non-finite feature value");

  const std::size_t n = x.size();
  std::vector<std::vector<double>> gram(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      gram[i][j] = gram[j][i] = poly_kernel(x[i], x[j], p);

  detail::SmoState st;
  st.y = &y;
  st.gram = &gram;
  st.c_bound = c_bound;
  st.tol = tol;
  st.alpha.assign(n, 0.0);
  st.error.resize(n);
  for (std::size_t i = 0; i < n; ++i) st.error[i] = -y[i];  // f = 0 initially

  Rng rng(seed);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  constexpr std::size_t kMaxPasses = 100000;
  std::size_t passes = 0;
  bool examine_all = true;
  std::size_t num_changed = 1;
  while (num_changed > 0 || examine_all) {
    if (++passes > kMaxPasses) {
      BinaryModel probe;
      probe.kernel = p;
      probe.bias = -st.bias;
      for (std::size_t i = 0; i < n; ++i)
        if (st.alpha[i] > 1e-9) {
          probe.support_vectors.push_back(x[i]);
          probe.alphas.push_back(st.alpha[i]);
          probe.signs.push_back(y[i]);
        }
      throw ConvergenceError(
          "SMO exceeded pass cap; max KKT violation = " +
          std::to_string(kkt_max_violation(probe, x, y, st.alpha, c_bound, tol)));
    }
    num_changed = 0;
    rng.shuffle(order);
    for (std::size_t i : order) {
      if (examine_all || (st.alpha[i] > 0.0 && st.alpha[i] < c_bound))
        num_changed += st.examine(i, rng) ? 1 : 0;
    }
    if (examine_all) examine_all = false;
    else if (num_changed == 0) examine_all = true;
  }

  // Recompute the threshold from the final alphas. When the last update
  // leaves no free alphas, the running midpoint threshold can land
  // outside the interval the KKT conditions allow, and no further pair
  // step exists that would move it back.
  {
    double b_lo = -std::numeric_limits<double>::infinity();
    double b_hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      double g = 0.0;
      for (std::size_t j = 0; j < n; ++j) g += st.alpha[j] * y[j] * gram[i][j];
      // target u_i = g - b with y_i * u_i in the tol-relaxed KKT range
      const double a = st.alpha[i];
      double lo_u, hi_u;  // allowed range for y_i * u_i
      if (a < 1e-9) {
        lo_u = 1.0 - tol;
        hi_u = std::numeric_limits<double>::infinity();
      } else if (a > c_bound - 1e-9) {
        lo_u = -std::numeric_limits<double>::infinity();
        hi_u = 1.0 + tol;
      } else {
        lo_u = 1.0 - tol;
        hi_u = 1.0 + tol;
      }
      if (y[i] > 0.0) {
        // g - b in [lo_u, hi_u]
        b_lo = std::max(b_lo, g - hi_u);
        b_hi = std::min(b_hi, g - lo_u);
      } else {
        // b - g in [lo_u, hi_u]
        b_lo = std::max(b_lo, g + lo_u);
        b_hi = std::min(b_hi, g + hi_u);
      }
    }
    st.bias = 0.5 * (b_lo + b_hi);
  }

  BinaryTrainResult res;
  res.model.kernel = p;
  res.model.bias = -st.bias;  // error cache uses f = sum - b convention
  for (std::size_t i = 0; i < n; ++i)
    if (st.alpha[i] > 1e-9) {
      res.model.support_vectors.push_back(x[i]);
      res.model.alphas.push_back(st.alpha[i]);
      res.model.signs.push_back(y[i]);
    }
  res.alphas_full = st.alpha;
  res.dual_objective = dual_objective(st.alpha, y, gram);
  return res;
}

struct SvmModel {
  // pair order: (0,1) (0,2) (0,3) (1,2) (1,3) (2,3) over class indices
  struct Pair {
    int first;
    int second;
    BinaryModel model;
  };
  std::vector<Pair> pairwise;
  NormalizationParams norm;
  KernelParams kernel;
};

inline constexpr std::size_t kNumPairModels = kNumClasses * (kNumClasses - 1) / 2;

struct SvmConfig {
  double c_bound = 1.0;
  KernelParams kernel{};
  double tol = 1e-3;
};

// One-vs-one training: fits normalization on the full training set, then
// one binary model per unordered class pair on that pair's instances.
inline SvmModel train_multiclass(const std::vector<std::vector<double>>& x,
                                 const std::vector<EmotionLabel>& labels,
                                 const SvmConfig& cfg, std::uint64_t seed) {
  if (x.size() != labels.size() || x.empty())
    throw ValidationError("train_multiclass: bad input sizes");
  std::array<std::size_t, kNumClasses> counts{};
  for (auto l : labels) ++counts[static_cast<std::size_t>(l)];
  for (std::size_t k = 0; k < kNumClasses; ++k)
    if (counts[k] == 0)
      throw ValidationError(std::string("training set missing class ") +
                            label_name(kLabelOrder[k]));

  SvmModel model;
  model.norm = NormalizationParams::fit(x);
  model.kernel = cfg.kernel;
  std::vector<std::vector<double>> xn(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xn[i] = model.norm.apply(x[i]);

  std::uint64_t pair_seed = seed;
  for (int a = 0; a < static_cast<int>(kNumClasses); ++a) {
    for (int b = a + 1; b < static_cast<int>(kNumClasses); ++b) {
      std::vector<std::vector<double>> px;
      std::vector<double> py;
      for (std::size_t i = 0; i < xn.size(); ++i) {
        const int l = static_cast<int>(labels[i]);
        if (l == a) {
          px.push_back(xn[i]);
          py.push_back(1.0);
        } else if (l == b) {
          px.push_back(xn[i]);
          py.push_back(-1.0);
        }
      }
      auto res = train_binary_smo(px, py, cfg.c_bound, cfg.kernel, cfg.tol,
                                  ++pair_seed);
      model.pairwise.push_back({a, b, std::move(res.model)});
    }
  }
  return model;
}

struct Prediction {
  EmotionLabel label;
  std::array<double, kNumClasses> distribution;  // votes / 6, sums to 1
};

// Hard one-vs-one voting; ties go to the lowest class index.
inline Prediction predict(const SvmModel& model, const std::vector<double>& x) {
  const auto xn = model.norm.apply(x);
  std::array<int, kNumClasses> votes{};
  for (const auto& p : model.pairwise) {
    const double f = p.model.decision(xn);
    ++votes[static_cast<std::size_t>(f > 0.0 ? p.first : p.second)];
  }
  Prediction pred{};
  int best = -1;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    pred.distribution[k] =
        static_cast<double>(votes[k]) / static_cast<double>(kNumPairModels);
    if (votes[k] > best) {
      best = votes[k];
      pred.label = kLabelOrder[k];
    }
  }
  return pred;
}

// --- model serialization (JSON) ---

inline nlohmann::json to_json(const SvmModel& m) {
  nlohmann::json j;
  j["kernel"] = {{"coef0", m.kernel.coef0}, {"degree", m.kernel.degree}};
  j["norm"] = {{"min", m.norm.min}, {"max", m.norm.max}};
  j["pairwise"] = nlohmann::json::array();
  for (const auto& p : m.pairwise) {
    nlohmann::json pj;
    pj["first"] = p.first;
    pj["second"] = p.second;
    pj["bias"] = p.model.bias;
    pj["alphas"] = p.model.alphas;
    pj["signs"] = p.model.signs;
    pj["support_vectors"] = p.model.support_vectors;
    j["pairwise"].push_back(std::move(pj));
  }
  return j;
}

inline SvmModel svm_model_from_json(const nlohmann::json& j) {
  SvmModel m;
  m.kernel.coef0 = j.at("kernel").at("coef0").get<double>();
  m.kernel.degree = j.at("kernel").at("degree").get<int>();
  m.norm.min = j.at("norm").at("min").get<std::vector<double>>();
  m.norm.max = j.at("norm").at("max").get<std::vector<double>>();
  for (const auto& pj : j.at("pairwise")) {
    SvmModel::Pair p;
    p.first = pj.at("first").get<int>();
    p.second = pj.at("second").get<int>();
    p.model.bias = pj.at("bias").get<double>();
    p.model.alphas = pj.at("alphas").get<std::vector<double>>();
    p.model.signs = pj.at("signs").get<std::vector<double>>();
    p.model.support_vectors =
        pj.at("support_vectors").get<std::vector<std::vector<double>>>();
    p.model.kernel = m.kernel;
    m.pairwise.push_back(std::move(p));
  }
  if (m.pairwise.size() != kNumPairModels)
    throw ValidationError("model must contain 6 pairwise classifiers");
  return m;
}

}  // namespace eegemo
