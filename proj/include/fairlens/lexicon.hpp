#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "fairlens/error.hpp"

namespace fairlens {

enum class GenderLabel { Male, Female, Neutral };

const char* gender_name(GenderLabel g);
GenderLabel gender_from_name(std::string_view name);

// Token that replaces gender words in masked captions. Reserved: input
// captions containing it literally are rejected at ingestion, and the
// tokenizer keeps it atomic so masked text survives re-tokenization.
inline constexpr std::string_view kGenderSentinel = "[GENDER]";

// Lowercases and splits on any character that is not an ASCII letter,
// digit, or apostrophe; apostrophe-suffixed forms are split at the
// apostrophe ("she'd" -> "she", "d"). The [GENDER] sentinel is emitted
// as a single token.
std::vector<std::string> tokenize(std::string_view text);

// The two word lists from which every gender read is derived. Disjoint,
// non-empty, lowercase single tokens.
class GenderLexicon {
 public:
  // Parses the two-section lexicon format:
  //   [female]          one word per line, '#' starts a comment
  //   [male]
  static GenderLexicon parse(std::string_view text, const std::string& origin);
  static GenderLexicon load(const std::string& path);
  // The word list bundled with the toolkit.
  static const GenderLexicon& builtin();

  GenderLexicon(std::unordered_set<std::string> female,
                std::unordered_set<std::string> male);

  const std::unordered_set<std::string>& female_words() const { return female_; }
  const std::unordered_set<std::string>& male_words() const { return male_; }

  // Whole-token match. With plural matching enabled, token+"s"/"es"
  // forms of listed words also match; off by default since the list is
  // taken verbatim.
  GenderLabel token_gender(std::string_view token) const;
  bool matches(std::string_view token) const {
    return token_gender(token) != GenderLabel::Neutral;
  }

  void set_plural_matching(bool enabled) { plural_matching_ = enabled; }
  bool plural_matching() const { return plural_matching_; }

 private:
  std::unordered_set<std::string> female_;
  std::unordered_set<std::string> male_;
  bool plural_matching_ = false;
};

struct MaskedCaption {
  std::vector<std::string> tokens;  // gender words replaced by [GENDER]
  GenderLabel source_gender = GenderLabel::Neutral;

  std::string rendered() const;  // tokens joined by single spaces
};

// Male if the caption has at least one male token and no female token,
// Female symmetrically, Neutral otherwise (including both-present).
GenderLabel caption_gender(std::string_view caption, const GenderLexicon& lex);

// Image-level rule over reference captions: Male if some caption contains
// a male word and no caption contains a female word; Female symmetric;
// Neutral otherwise.
GenderLabel image_gender(const std::vector<std::string>& reference_captions,
                         const GenderLexicon& lex);

MaskedCaption mask_gender(std::string_view caption, const GenderLexicon& lex);

// Fraction of predictions whose caption-level gender contradicts the gold
// image gender. Neutral predictions are not errors; the denominator is
// the predictions whose gold label is Male or Female.
double error_rate(
    const std::vector<std::pair<std::string, std::string>>& predictions,
    const std::unordered_map<std::string, GenderLabel>& gold,
    const GenderLexicon& lex);

// Fraction of texts containing at least one lexicon token.
double gender_mention_rate(const std::vector<std::string>& texts,
                           const GenderLexicon& lex);

}  // namespace fairlens
