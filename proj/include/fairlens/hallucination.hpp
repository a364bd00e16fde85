#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "fairlens/corpus.hpp"
#include "fairlens/lexicon.hpp"

namespace fairlens {

// Surface-form to canonical-object map plus a partial parent relation
// between canonicals. Surface forms are 1-3 token phrases; the parent
// relation is acyclic and closed over the canonical set.
class SynonymHierarchy {
 public:
  // JSON: {"synonyms": {"surface": "canonical", ...},
  //        "parents":  {"child": "parent", ...}}
  static SynonymHierarchy from_json_text(std::string_view text, const std::string& origin);
  static SynonymHierarchy load(const std::string& path);
  // Bundled map over the 80 MSCOCO object classes, with person
  // sub-categories (woman, man, girl, boy) and bag sub-categories
  // (purse, briefcase, handbag, backpack, suitcase) as distinct
  // canonicals under shared parents.
  static const SynonymHierarchy& builtin_coco();

  bool is_canonical(const std::string& name) const { return canonicals_.count(name) > 0; }
  const std::set<std::string>& canonicals() const { return canonicals_ordered_; }

  // nullptr at a root
  const std::string* parent_of(const std::string& canonical) const;
  // true iff ancestor appears strictly above descendant on the parent chain
  bool is_strict_ancestor(const std::string& ancestor, const std::string& descendant) const;

  std::optional<std::string> lookup(const std::string& normalized_phrase) const;
  std::size_t max_phrase_tokens() const { return max_phrase_tokens_; }

 private:
  SynonymHierarchy() = default;
  void validate(const std::string& origin);

  std::unordered_map<std::string, std::string> word_to_canonical_;
  std::unordered_map<std::string, std::string> parent_;
  std::unordered_set<std::string> canonicals_;
  std::set<std::string> canonicals_ordered_;
  std::size_t max_phrase_tokens_ = 1;
};

// Greedy longest-match over token n-grams (3, then 2, then 1), each token
// consumed at most once; duplicates collapse into the set.
std::set<std::string> extract_objects(std::string_view caption, const SynonymHierarchy& h);

// Union of annotated canonicals (if any) and the canonicals extracted
// from every reference caption. annotation may be null.
std::set<std::string> ground_truth_objects(const ObjectAnnotation* annotation,
                                           const std::vector<std::string>& references,
                                           const SynonymHierarchy& h);

// A predicted canonical is NOT hallucinated when it is in the ground
// truth, or is a strict ancestor of something in the ground truth
// (predicting "person" over an image with "woman" is safe). Siblings are
// hallucinated. Predicting a sub-category when only its super-category is
// present counts as hallucinated unless relax_sub is set.
bool is_hallucinated(const std::string& predicted, const std::set<std::string>& ground_truth,
                     const SynonymHierarchy& h, bool relax_sub = false);

struct ImageObjectEval {
  std::set<std::string> mentioned;
  std::set<std::string> hallucinated;  // subset of mentioned
};

struct ChairResult {
  std::map<std::string, ImageObjectEval> per_image;
  std::optional<double> chair_i;  // absent when no objects were mentioned
  double chair_s = 0.0;
  std::size_t total_objects = 0;        // N_o
  std::size_t hallucinated_objects = 0; // N_o^H
  std::size_t total_captions = 0;       // N_c
  std::size_t captions_with_hallucination = 0;  // N_c^H
  bool relaxed_sub = false;
};

ChairResult chair(const std::vector<PredictionRecord>& predictions,
                  const std::map<std::string, std::set<std::string>>& ground_truths,
                  const SynonymHierarchy& h, bool relax_sub = false);

}  // namespace fairlens
