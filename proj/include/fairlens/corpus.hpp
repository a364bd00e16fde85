#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "fairlens/lexicon.hpp"

namespace fairlens {

// All corpora are JSON-Lines: one UTF-8 JSON object per line, so parse
// failures carry a line number and fixtures diff cleanly. Ids are opaque
// strings throughout.

enum class Split { Train, Dev, Test };
const char* split_name(Split s);

struct CaptionRecord {
  std::string image_id;
  std::vector<std::string> captions;  // non-empty
  Split split = Split::Train;
};

struct PredictionRecord {
  std::string image_id;
  std::string caption;
};

struct ObjectAnnotation {
  std::string image_id;
  std::set<std::string> objects;  // canonical names
};

struct RankedRetrieval {
  std::string query_id;
  std::vector<std::string> ranking;  // no duplicates
  std::set<std::string> relevant;    // may be empty for bias-only runs
};

struct GenderCatalog {
  std::unordered_map<std::string, GenderLabel> labels;
};

enum class Scenario { OO, OP };
const char* scenario_name(Scenario s);

struct ResolutionInstance {
  std::string occupation;
  Scenario scenario = Scenario::OO;
  GenderLabel true_gender = GenderLabel::Male;       // binary
  GenderLabel predicted_gender = GenderLabel::Male;  // binary
};

struct ProbabilityPair {
  double factual = 0.0;
  double counterfactual = 0.0;
};

struct VlBiasRecord {
  std::string pair_id;
  std::string target;
  ProbabilityPair p_t;         // masked target word
  ProbabilityPair p_a_male;    // masked gender word, predicted "male"
  ProbabilityPair p_a_female;  // masked gender word, predicted "female"
};

// Readers. Each validates its type's invariants and reports the offending
// line on failure: malformed records, duplicate ids, unknown enum values,
// probabilities outside [0,1], captions containing the reserved [GENDER]
// sentinel.
std::vector<CaptionRecord> read_captions(const std::string& path);
std::vector<PredictionRecord> read_predictions(const std::string& path);
std::vector<ObjectAnnotation> read_annotations(const std::string& path);
std::vector<RankedRetrieval> read_rankings(const std::string& path);
GenderCatalog read_catalog(const std::string& path);
std::vector<ResolutionInstance> read_resolution(const std::string& path);
std::vector<VlBiasRecord> read_vlbias(const std::string& path);

// Writers, inverse of the readers (schema field order preserved).
void write_captions(std::ostream& out, const std::vector<CaptionRecord>& records);
void write_predictions(std::ostream& out, const std::vector<PredictionRecord>& records);
void write_annotations(std::ostream& out, const std::vector<ObjectAnnotation>& records);
void write_rankings(std::ostream& out, const std::vector<RankedRetrieval>& records);
void write_catalog(std::ostream& out, const GenderCatalog& catalog);
void write_resolution(std::ostream& out, const std::vector<ResolutionInstance>& records);
void write_vlbias(std::ostream& out, const std::vector<VlBiasRecord>& records);

struct JoinReport {
  std::vector<std::string> predictions_without_reference;
  std::vector<std::string> references_without_prediction;
  std::vector<std::string> predictions_without_catalog;
  // Observed catalog distribution over the prediction ids, so callers can
  // see how balanced their evaluation set is.
  std::map<GenderLabel, std::size_t> gender_distribution;

  bool clean() const {
    return predictions_without_reference.empty() &&
           references_without_prediction.empty() &&
           predictions_without_catalog.empty();
  }
};

// Lists id mismatches between predictions and references (and catalog,
// when given). With strict set, any mismatch is a hard JoinMismatch error.
JoinReport validate_join(const std::vector<PredictionRecord>& predictions,
                         const std::vector<CaptionRecord>& references,
                         const GenderCatalog* catalog = nullptr,
                         bool strict = false);

}  // namespace fairlens
