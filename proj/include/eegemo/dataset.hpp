#pragma once

// SAM-quadrant labeling, class balancing by seeded resampling, and
// stratified fold construction for cross-validation.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eegemo/core.hpp"
#include "eegemo/features.hpp"
#include "eegemo/rng.hpp"

namespace eegemo {

struct LabeledInstance {
  FeatureVector features;
  EmotionLabel label;
  std::string recording_id;
};

struct Dataset {
  std::vector<LabeledInstance> instances;

  std::array<std::size_t, kNumClasses> class_counts() const {
    std::array<std::size_t, kNumClasses> counts{};
    for (const auto& inst : instances)
      ++counts[static_cast<std::size_t>(inst.label)];
    return counts;
  }
  std::size_t size() const { return instances.size(); }
};

// How to treat a SAM rating sitting exactly on the 9-point midpoint (5).
enum class MidpointPolicy { Reject, AssignPositive, AssignNegative };

inline const char* midpoint_policy_name(MidpointPolicy p) {
  switch (p) {
    case MidpointPolicy::Reject: return "reject";
    case MidpointPolicy::AssignPositive: return "assign_positive";
    case MidpointPolicy::AssignNegative: return "assign_negative";
  }
  throw ValidationError("unknown midpoint policy");
}

inline MidpointPolicy midpoint_policy_from_name(const std::string& s) {
  if (s == "reject") return MidpointPolicy::Reject;
  if (s == "assign_positive") return MidpointPolicy::AssignPositive;
  if (s == "assign_negative") return MidpointPolicy::AssignNegative;
  throw ValidationError("unknown midpoint_policy '" + s + "'");
}

// Quadrant rule on the 9-point scale: >5 positive, <5 negative;
// (+,+) Happy, (+,-) Relaxed, (-,-) Sad, (-,+) Angry. Returns nullopt
// when a midpoint rating is rejected by policy.
inline std::optional<EmotionLabel> label_from_sam(
    const SamRating& rating, MidpointPolicy policy = MidpointPolicy::Reject) {
  auto sign_of = [&](int v) -> std::optional<bool> {
    if (v > 5) return true;
    if (v < 5) return false;
    switch (policy) {
      case MidpointPolicy::Reject: return std::nullopt;
      case MidpointPolicy::AssignPositive: return true;
      case MidpointPolicy::AssignNegative: return false;
    }
    return std::nullopt;
  };
  const auto v = sign_of(rating.valence);
  const auto a = sign_of(rating.arousal);
  if (!v || !a) return std::nullopt;
  if (*v && *a) return EmotionLabel::Happy;
  if (*v && !*a) return EmotionLabel::Relaxed;
  if (!*v && !*a) return EmotionLabel::Sad;
  return EmotionLabel::Angry;
}

// Per-class target sizes for a balanced resample of N instances:
// floor(N/4) each, remainder handed out in label order.
inline std::array<std::size_t, kNumClasses> balanced_targets(std::size_t n) {
  std::array<std::size_t, kNumClasses> t{};
  for (std::size_t k = 0; k < kNumClasses; ++k)
    t[k] = n / kNumClasses + (k < n % kNumClasses ? 1 : 0);
  return t;
}

// Resamples with replacement to uniform class proportions. Output size
// equals input size; class counts depend only on N.
inline Dataset resample_balance(const Dataset& ds, std::uint64_t seed) {
  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < ds.instances.size(); ++i)
    by_class[static_cast<std::size_t>(ds.instances[i].label)].push_back(i);
  for (std::size_t k = 0; k < kNumClasses; ++k)
    if (by_class[k].empty())
      throw ValidationError(std::string("cannot balance: class ") +
                            label_name(kLabelOrder[k]) + " has no instances");

  const auto targets = balanced_targets(ds.size());
  Rng rng(seed);
  Dataset out;
  out.instances.reserve(ds.size());
  for (std::size_t k = 0; k < kNumClasses; ++k)
    for (std::size_t j = 0; j < targets[k]; ++j)
      out.instances.push_back(
          ds.instances[by_class[k][rng.below(by_class[k].size())]]);
  return out;
}

// Stratified k-fold index sets: a partition of 0..N-1 with fold sizes and
// per-class fold counts each differing by at most one.
inline std::vector<std::vector<std::size_t>> stratified_folds(
    const Dataset& ds, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("need k >= 2 folds");
  if (k > ds.size())
    throw ValidationError("k = " + std::to_string(k) + " exceeds dataset size " +
                          std::to_string(ds.size()));

  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < ds.instances.size(); ++i)
    by_class[static_cast<std::size_t>(ds.instances[i].label)].push_back(i);

  Rng rng(seed);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t cursor = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    rng.shuffle(by_class[c]);
    for (std::size_t idx : by_class[c]) {
      folds[cursor % k].push_back(idx);
      ++cursor;
    }
  }
  return folds;
}

}  // namespace eegemo
