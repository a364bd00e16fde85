#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fairlens/corpus.hpp"

namespace fairlens {

// Desired proportion of gender attributes in a ranking. Attributes with
// zero desired proportion are excluded from skew.
struct DesiredDistribution {
  double male = 0.5;
  double female = 0.5;

  void validate() const;
};

// (N_m - N_f) / (N_m + N_f) over the top-k, 0 when no gendered image
// appears. Neutral images are ignored; k beyond the ranking length
// truncates to the full list.
double bias_at_k(const RankedRetrieval& r, const GenderCatalog& catalog, std::size_t k);

// max over genders with positive desired proportion of
// ln(actual proportion / desired proportion) in the top-k, where actual
// proportions are taken over gendered items only. A gender absent from
// the top-k yields -infinity for its term; with no gendered item at all
// the metric is undefined.
double max_skew_at_k(const RankedRetrieval& r, const GenderCatalog& catalog,
                     const DesiredDistribution& desired, std::size_t k);

// Discount-weighted KL divergence (natural log) of each prefix's gender
// distribution from the desired one, normalized by the discount mass.
// Both distributions get additive epsilon smoothing and renormalization,
// since the divergence is undefined at zero counts.
double ndkl(const RankedRetrieval& r, const GenderCatalog& catalog,
            const DesiredDistribution& desired, double epsilon = 1e-6);

// Fraction of queries whose relevant set intersects the top-k.
double recall_at_k(const std::vector<RankedRetrieval>& rankings, std::size_t k);

struct Aggregate {
  double mean = 0.0;
  double sigma = 0.0;  // population standard deviation
};

// Mean and population sigma, summed in sorted query-id order.
Aggregate aggregate(std::vector<std::pair<std::string, double>> per_query);

struct OccupationResolution {
  std::array<std::size_t, 2> total{};    // [male, female] instance counts
  std::array<std::size_t, 2> correct{};
  std::optional<double> ra_male;
  std::optional<double> ra_female;
  std::optional<double> delta;  // ra_male - ra_female when both defined
};

struct ResolutionMetrics {
  double accuracy = 0.0;  // over all instances
  // scenario -> mean of per-occupation accuracy gaps, occupations missing
  // a gender excluded (and listed below)
  std::map<Scenario, double> delta_ra;
  std::map<Scenario, std::vector<std::string>> excluded_occupations;
  std::map<Scenario, std::map<std::string, OccupationResolution>> per_occupation;
};

ResolutionMetrics resolution_metrics(const std::vector<ResolutionInstance>& instances);

enum class DesiredMode { Uniform, FromCandidates, Explicit };

struct RetrievalOptions {
  std::vector<std::size_t> ks{1, 5, 10};
  double epsilon = 1e-6;
  DesiredMode desired_mode = DesiredMode::Uniform;
  DesiredDistribution explicit_desired;  // used when desired_mode == Explicit
  bool with_recall = true;
};

struct RetrievalMetrics {
  // metric name ("bias@5", "maxskew@10", "ndkl") -> query -> value
  std::map<std::string, std::map<std::string, double>> per_query;
  std::map<std::string, Aggregate> aggregates;
  std::map<std::string, double> recall;  // "recall@k" -> value
  std::vector<std::string> warnings;
};

// Full per-query evaluation plus mean/sigma aggregation. Queries whose
// ranking is shorter than a requested k are truncated with a warning;
// per-query skew values of -infinity are excluded from aggregation (and
// noted), since a mean over them is meaningless.
RetrievalMetrics evaluate_rankings(const std::vector<RankedRetrieval>& rankings,
                                   const GenderCatalog& catalog,
                                   const RetrievalOptions& options);

}  // namespace fairlens
