#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "fairlens/lexicon.hpp"

namespace fairlens {

// Multinomial bag-of-tokens gender classifier with additive smoothing.
// The leakage metric is classifier-parametric; this closed-form model
// keeps results deterministic and desk-scale testable. Index 0 = male,
// 1 = female.
struct ClassifierModel {
  std::unordered_map<std::string, std::size_t> vocabulary;
  std::array<double, 2> class_log_priors{};
  std::array<std::vector<double>, 2> token_log_likelihoods;
  double smoothing = 1.0;
  std::array<std::size_t, 2> balanced_counts{};  // captions per class after downsampling
};

struct Classification {
  GenderLabel label = GenderLabel::Female;  // Male or Female only
  double confidence = 0.5;                  // posterior of the returned label
};

// Fits the model on gendered masked captions. Classes are balanced by
// seeded downsampling of the majority class before fitting; deterministic
// for a fixed (input, seed).
ClassifierModel train_classifier(const std::vector<MaskedCaption>& masked,
                                 std::uint64_t seed, double smoothing = 1.0);

// Posterior over {male, female}. Tokens outside the vocabulary are
// ignored; ties break toward female.
Classification classify(const ClassifierModel& model, const MaskedCaption& caption);

struct LicResult {
  double lic_d = 0.0;  // confidence-weighted accuracy, ground-truth side
  double lic_m = 0.0;  // same, generated side
  double lic = 0.0;    // lic_m - lic_d
  std::size_t n_train_d = 0;
  std::size_t n_train_m = 0;
  std::size_t n_eval_d = 0;
  std::size_t n_eval_m = 0;
  std::uint64_t seed = 0;
  double eval_fraction = 0.0;
};

// Trains one classifier per corpus on a seeded stratified train split and
// scores confidence-weighted accuracy on the held-out split. Neutral
// captions are excluded; each corpus's split derives from the seed and
// the corpus content, so swapping the arguments negates the score
// exactly. Positive values mean the generated corpus leaks more gender
// than the ground truth.
LicResult lic_score(const std::vector<MaskedCaption>& ground_truth,
                    const std::vector<MaskedCaption>& generated, std::uint64_t seed,
                    double eval_fraction = 0.2, double smoothing = 1.0);

}  // namespace fairlens
