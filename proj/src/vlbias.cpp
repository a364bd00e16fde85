#include "fairlens/vlbias.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace fairlens {

std::optional<double> pair_bias(const VlBiasRecord& rec, GenderLabel a, double delta) {
  if (delta <= 0.0) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
  if (a == GenderLabel::Neutral) {
    throw Error(ErrorCode::InvalidArgument, "pair bias is defined for male and female only");
  }
  const ProbabilityPair& p_a = a == GenderLabel::Male ? rec.p_a_male : rec.p_a_female;
  const double denominator = p_a.counterfactual - p_a.factual;
  if (std::abs(denominator) < delta) return std::nullopt;
  const double numerator = rec.p_t.counterfactual - rec.p_t.factual;
  return numerator / denominator;
}

TargetBias target_bias(const std::vector<VlBiasRecord>& records, double delta) {
  TargetBias result;
  double sum = 0.0;
  for (const auto& rec : records) {
    auto male = pair_bias(rec, GenderLabel::Male, delta);
    auto female = pair_bias(rec, GenderLabel::Female, delta);
    if (male && female) {
      sum += *male - *female;
      ++result.pairs_used;
    } else {
      ++result.pairs_skipped;
    }
  }
  if (result.pairs_used > 0) {
    result.value = sum / static_cast<double>(result.pairs_used);
  }
  return result;
}

VlBiasResult dataset_bias(const std::vector<VlBiasRecord>& records, double delta) {
  if (records.empty()) {
    throw Error(ErrorCode::InvalidArgument, "no records to evaluate");
  }
  std::map<std::string, std::vector<VlBiasRecord>> by_target;
  for (const auto& rec : records) {
    std::string target = rec.target;
    std::transform(target.begin(), target.end(), target.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    by_target[target].push_back(rec);
  }

  VlBiasResult result;
  result.delta = delta;
  double sum = 0.0;
  for (const auto& [target, group] : by_target) {
    TargetBias tb = target_bias(group, delta);
    if (tb.pairs_skipped > 0) result.skipped_pairs[target] = tb.pairs_skipped;
    if (tb.value) {
      result.per_target[target] = *tb.value;
      sum += *tb.value;
    } else {
      result.undefined_targets.push_back(target);
    }
  }
  if (result.per_target.empty()) {
    throw Error(ErrorCode::UndefinedMetric,
                "dataset bias undefined: every target had all pairs skipped");
  }
  result.dataset_bias = sum / static_cast<double>(result.per_target.size());
  return result;
}

}  // namespace fairlens
