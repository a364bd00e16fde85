#include "fairlens/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fairlens {

namespace {

GenderLabel label_of(const GenderCatalog& catalog, const std::string& image_id) {
  auto it = catalog.labels.find(image_id);
  if (it == catalog.labels.end()) {
    throw Error(ErrorCode::MissingCatalogEntry,
                "image '" + image_id + "' has no catalog gender label");
  }
  return it->second;
}

struct PrefixCounts {
  std::size_t male = 0;
  std::size_t female = 0;
  std::size_t gendered() const { return male + female; }
};

PrefixCounts count_prefix(const RankedRetrieval& r, const GenderCatalog& catalog,
                          std::size_t k) {
  PrefixCounts counts;
  const std::size_t depth = std::min(k, r.ranking.size());
  for (std::size_t i = 0; i < depth; ++i) {
    switch (label_of(catalog, r.ranking[i])) {
      case GenderLabel::Male: ++counts.male; break;
      case GenderLabel::Female: ++counts.female; break;
      case GenderLabel::Neutral: break;
    }
  }
  return counts;
}

}  // namespace

void DesiredDistribution::validate() const {
  if (male < 0.0 || female < 0.0 || std::abs(male + female - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument,
                "desired distribution must be non-negative and sum to 1");
  }
}

double bias_at_k(const RankedRetrieval& r, const GenderCatalog& catalog, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  PrefixCounts counts = count_prefix(r, catalog, k);
  if (counts.gendered() == 0) return 0.0;
  return (static_cast<double>(counts.male) - static_cast<double>(counts.female)) /
         static_cast<double>(counts.gendered());
}

double max_skew_at_k(const RankedRetrieval& r, const GenderCatalog& catalog,
                     const DesiredDistribution& desired, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  desired.validate();
  PrefixCounts counts = count_prefix(r, catalog, k);
  if (counts.gendered() == 0) {
    throw Error(ErrorCode::UndefinedMetric,
                "skew undefined for query '" + r.query_id + "': no gendered image in top-" +
                    std::to_string(k));
  }
  double best = -std::numeric_limits<double>::infinity();
  const double total = static_cast<double>(counts.gendered());
  const std::pair<double, double> attrs[] = {
      {static_cast<double>(counts.male), desired.male},
      {static_cast<double>(counts.female), desired.female},
  };
  for (const auto& [actual_count, desired_p] : attrs) {
    if (desired_p <= 0.0) continue;  // excluded attribute
    double actual = actual_count / total;
    double skew = actual > 0.0 ? std::log(actual / desired_p)
                               : -std::numeric_limits<double>::infinity();
    best = std::max(best, skew);
  }
  return best;
}

double ndkl(const RankedRetrieval& r, const GenderCatalog& catalog,
            const DesiredDistribution& desired, double epsilon) {
  if (epsilon <= 0.0) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  desired.validate();
  if (r.ranking.empty()) {
    throw Error(ErrorCode::InvalidQuery, "ndkl undefined for empty ranking '" + r.query_id + "'");
  }
  const double q_male = (desired.male + epsilon) / (1.0 + 2.0 * epsilon);
  const double q_female = (desired.female + epsilon) / (1.0 + 2.0 * epsilon);

  double z = 0.0;
  double sum = 0.0;
  PrefixCounts counts;
  for (std::size_t k = 1; k <= r.ranking.size(); ++k) {
    switch (label_of(catalog, r.ranking[k - 1])) {
      case GenderLabel::Male: ++counts.male; break;
      case GenderLabel::Female: ++counts.female; break;
      case GenderLabel::Neutral: break;
    }
    const double discount = 1.0 / std::log2(static_cast<double>(k) + 1.0);
    z += discount;
    const double denom = static_cast<double>(counts.gendered()) + 2.0 * epsilon;
    const double d_male = (static_cast<double>(counts.male) + epsilon) / denom;
    const double d_female = (static_cast<double>(counts.female) + epsilon) / denom;
    const double kl = d_male * std::log(d_male / q_male) +
                      d_female * std::log(d_female / q_female);
    sum += discount * kl;
  }
  return sum / z;
}

double recall_at_k(const std::vector<RankedRetrieval>& rankings, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  if (rankings.empty()) {
    throw Error(ErrorCode::UndefinedMetric, "recall undefined without queries");
  }
  std::size_t hits = 0;
  for (const auto& r : rankings) {
    if (r.relevant.empty()) {
      throw Error(ErrorCode::InvalidQuery,
                  "query '" + r.query_id + "' has an empty relevant set");
    }
    const std::size_t depth = std::min(k, r.ranking.size());
    for (std::size_t i = 0; i < depth; ++i) {
      if (r.relevant.count(r.ranking[i])) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(rankings.size());
}

Aggregate aggregate(std::vector<std::pair<std::string, double>> per_query) {
  if (per_query.empty()) {
    throw Error(ErrorCode::UndefinedMetric, "cannot aggregate zero per-query values");
  }
  std::sort(per_query.begin(), per_query.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  double sum = 0.0;
  for (const auto& [id, v] : per_query) sum += v;
  const double n = static_cast<double>(per_query.size());
  Aggregate agg;
  agg.mean = sum / n;
  double sq = 0.0;
  for (const auto& [id, v] : per_query) sq += (v - agg.mean) * (v - agg.mean);
  agg.sigma = std::sqrt(sq / n);
  return agg;
}

ResolutionMetrics resolution_metrics(const std::vector<ResolutionInstance>& instances) {
  if (instances.empty()) {
    throw Error(ErrorCode::InvalidArgument, "resolution metrics require at least one instance");
  }
  ResolutionMetrics metrics;
  std::size_t correct_total = 0;
  for (const auto& inst : instances) {
    auto& occ = metrics.per_occupation[inst.scenario][inst.occupation];
    const std::size_t g = inst.true_gender == GenderLabel::Male ? 0 : 1;
    ++occ.total[g];
    if (inst.predicted_gender == inst.true_gender) {
      ++occ.correct[g];
      ++correct_total;
    }
  }
  metrics.accuracy = static_cast<double>(correct_total) / static_cast<double>(instances.size());

  for (auto& [scenario, occupations] : metrics.per_occupation) {
    double sum = 0.0;
    std::size_t counted = 0;
    for (auto& [name, occ] : occupations) {
      if (occ.total[0] > 0) {
        occ.ra_male = static_cast<double>(occ.correct[0]) / static_cast<double>(occ.total[0]);
      }
      if (occ.total[1] > 0) {
        occ.ra_female = static_cast<double>(occ.correct[1]) / static_cast<double>(occ.total[1]);
      }
      if (occ.ra_male && occ.ra_female) {
        occ.delta = *occ.ra_male - *occ.ra_female;
        sum += *occ.delta;
        ++counted;
      } else {
        metrics.excluded_occupations[scenario].push_back(name);
      }
    }
    if (counted > 0) {
      metrics.delta_ra[scenario] = sum / static_cast<double>(counted);
    }
  }
  return metrics;
}

namespace {

DesiredDistribution desired_for_query(const RankedRetrieval& r, const GenderCatalog& catalog,
                                      const RetrievalOptions& options) {
  switch (options.desired_mode) {
    case DesiredMode::Uniform:
      return DesiredDistribution{0.5, 0.5};
    case DesiredMode::Explicit:
      return options.explicit_desired;
    case DesiredMode::FromCandidates: {
      // gendered proportions over the query's full candidate list
      PrefixCounts counts = count_prefix(r, catalog, r.ranking.size());
      if (counts.gendered() == 0) {
        throw Error(ErrorCode::UndefinedMetric,
                    "cannot derive a desired distribution for query '" + r.query_id +
                        "': no gendered candidate");
      }
      const double total = static_cast<double>(counts.gendered());
      return DesiredDistribution{static_cast<double>(counts.male) / total,
                                 static_cast<double>(counts.female) / total};
    }
  }
  return DesiredDistribution{};
}

}  // namespace

RetrievalMetrics evaluate_rankings(const std::vector<RankedRetrieval>& rankings,
                                   const GenderCatalog& catalog,
                                   const RetrievalOptions& options) {
  if (rankings.empty()) {
    throw Error(ErrorCode::InvalidArgument, "no rankings to evaluate");
  }
  RetrievalMetrics metrics;
  std::size_t truncated = 0;
  std::size_t skew_undefined = 0;
  std::size_t skew_infinite = 0;

  for (const auto& r : rankings) {
    DesiredDistribution desired = desired_for_query(r, catalog, options);
    for (std::size_t k : options.ks) {
      if (k > r.ranking.size()) ++truncated;
      metrics.per_query["bias@" + std::to_string(k)][r.query_id] = bias_at_k(r, catalog, k);
      try {
        double skew = max_skew_at_k(r, catalog, desired, k);
        if (std::isinf(skew)) {
          ++skew_infinite;
        } else {
          metrics.per_query["maxskew@" + std::to_string(k)][r.query_id] = skew;
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::UndefinedMetric) throw;
        ++skew_undefined;
      }
    }
    metrics.per_query["ndkl"][r.query_id] = ndkl(r, catalog, desired, options.epsilon);
  }

  for (const auto& [name, values] : metrics.per_query) {
    metrics.aggregates[name] =
        aggregate({values.begin(), values.end()});
  }

  if (options.with_recall) {
    bool all_have_relevant =
        std::all_of(rankings.begin(), rankings.end(),
                    [](const RankedRetrieval& r) { return !r.relevant.empty(); });
    if (all_have_relevant) {
      for (std::size_t k : options.ks) {
        metrics.recall["recall@" + std::to_string(k)] = recall_at_k(rankings, k);
      }
    } else {
      metrics.warnings.push_back("recall skipped: some queries have no relevant set");
    }
  }

  if (truncated > 0) {
    metrics.warnings.push_back(std::to_string(truncated) +
                               " query/k pairs truncated to the ranking length");
  }
  if (skew_undefined > 0) {
    metrics.warnings.push_back(std::to_string(skew_undefined) +
                               " skew values undefined (no gendered image in prefix), excluded");
  }
  if (skew_infinite > 0) {
    metrics.warnings.push_back(std::to_string(skew_infinite) +
                               " skew values were -inf (an attribute absent), excluded");
  }
  return metrics;
}

}  // namespace fairlens
