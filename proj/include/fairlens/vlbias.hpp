#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fairlens/corpus.hpp"

namespace fairlens {

// Per-pair counterfactual bias toward gender a: the shift in the masked
// target probability divided by the shift in the masked gender-word
// probability. Pairs whose denominator is within delta of zero are
// skipped (the ratio is unbounded there) and accounted for by the caller.
std::optional<double> pair_bias(const VlBiasRecord& rec, GenderLabel a, double delta);

struct TargetBias {
  std::optional<double> value;  // absent when no pair was usable
  std::size_t pairs_used = 0;
  std::size_t pairs_skipped = 0;  // denominator guard tripped for either gender
};

// Mean over usable pairs of bias(male) - bias(female). A pair is usable
// only when both gender terms pass the guard. Positive values lean male.
TargetBias target_bias(const std::vector<VlBiasRecord>& records, double delta);

struct VlBiasResult {
  std::map<std::string, double> per_target;  // case-normalized target -> B value
  std::map<std::string, std::size_t> skipped_pairs;
  std::vector<std::string> undefined_targets;  // all pairs skipped
  double dataset_bias = 0.0;  // unweighted mean over defined targets
  double delta = 0.0;
};

VlBiasResult dataset_bias(const std::vector<VlBiasRecord>& records, double delta = 1e-3);

}  // namespace fairlens
