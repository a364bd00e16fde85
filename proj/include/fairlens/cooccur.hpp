#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fairlens/corpus.hpp"
#include "fairlens/hallucination.hpp"
#include "fairlens/lexicon.hpp"

namespace fairlens {

// Index into the per-gender count arrays; the attribute set is always
// {male, female}, neutral captions do not count.
inline constexpr std::size_t kMaleIdx = 0;
inline constexpr std::size_t kFemaleIdx = 1;

struct CooccurrenceTable {
  // word -> [male count, female count]; caption-level, a repeated word
  // counts once per caption.
  std::map<std::string, std::array<std::int64_t, 2>> gender_word_counts;
  std::set<std::string> word_list;  // the evaluation set L

  // image-level object statistics, filled when a hierarchy is supplied
  std::map<std::string, std::map<std::string, std::int64_t>> object_partners;  // symmetric
  std::array<std::map<std::string, std::int64_t>, 2> gender_object_counts;
  std::set<std::string> seen_objects;

  std::size_t captions_seen = 0;
  std::size_t images_seen = 0;
};

// Counts (gender, word) pairs per caption and, when a hierarchy is given,
// object-object and gender-object pairs per image.
CooccurrenceTable build_table(const std::vector<CaptionRecord>& records,
                              const GenderLexicon& lex,
                              const std::set<std::string>& word_list,
                              const SynonymHierarchy* hierarchy = nullptr);

// Most frequent tokens minus stoplist and lexicon words; ties broken
// lexicographically. An externally curated list can be supplied instead
// of this approximation.
std::set<std::string> derive_word_list(const std::vector<CaptionRecord>& records,
                                       const GenderLexicon& lex, std::size_t top_n,
                                       const std::set<std::string>& stoplist);

struct BiasAmpTerm {
  std::string word;
  GenderLabel gender;
  double contribution;  // (b_hat - b), only where b > 1/2
};

struct BiasAmpResult {
  double value = 0.0;
  std::vector<BiasAmpTerm> per_word;        // sums to value * |L|
  std::set<std::string> skipped_words;      // zero co-occurrence in predictions
  std::set<std::string> excluded_words;     // zero co-occurrence in training, dropped from L
  std::size_t effective_word_count = 0;     // |L| after exclusions
};

BiasAmpResult bias_amp(const CooccurrenceTable& train_table,
                       const CooccurrenceTable& pred_table);

// k objects with the highest co-occurrence count with the anchor, anchor
// excluded, ties lexicographic.
std::vector<std::string> top_cooccurring(const CooccurrenceTable& table,
                                         const std::string& object_anchor, std::size_t k);
std::vector<std::string> top_cooccurring(const CooccurrenceTable& table, GenderLabel anchor,
                                         std::size_t k);

struct HitRatioResult {
  double value = 0.0;
  std::size_t images_scored = 0;
  std::size_t images_excluded = 0;  // in scope but with no hallucinated objects
};

// Mean of |H_i intersect C| / |H_i| over the in-scope images that
// hallucinate. Non-hallucinating images are excluded and counted, or
// scored as 0 when count_empty_as_zero is set.
HitRatioResult hit_ratio(const std::map<std::string, ImageObjectEval>& per_image,
                         const std::set<std::string>& in_scope_images,
                         const std::vector<std::string>& c_set,
                         bool count_empty_as_zero = false);

HitRatioResult hit_ratio_object(const std::map<std::string, ImageObjectEval>& per_image,
                                const std::map<std::string, std::set<std::string>>& ground_truths,
                                const std::string& anchor,
                                const std::vector<std::string>& c_set,
                                bool count_empty_as_zero = false);

HitRatioResult hit_ratio_gender(const std::map<std::string, ImageObjectEval>& per_image,
                                const GenderCatalog& catalog, GenderLabel anchor,
                                const std::vector<std::string>& c_set,
                                bool count_empty_as_zero = false);

}  // namespace fairlens
