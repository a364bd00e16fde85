#include "fairlens/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace fairlens {

const char* gender_name(GenderLabel g) {
  switch (g) {
    case GenderLabel::Male: return "male";
    case GenderLabel::Female: return "female";
    case GenderLabel::Neutral: return "neutral";
  }
  return "neutral";
}

GenderLabel gender_from_name(std::string_view name) {
  if (name == "male") return GenderLabel::Male;
  if (name == "female") return GenderLabel::Female;
  if (name == "neutral") return GenderLabel::Neutral;
  throw Error(ErrorCode::Parse, "unknown gender label '" + std::string(name) + "'");
}

namespace {

bool is_token_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text.compare(i, kGenderSentinel.size(), kGenderSentinel) == 0) {
      tokens.emplace_back(kGenderSentinel);
      i += kGenderSentinel.size();
      continue;
    }
    if (!is_token_char(text[i])) {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < text.size() && is_token_char(text[i])) ++i;
    std::string tok(text.substr(start, i - start));
    std::transform(tok.begin(), tok.end(), tok.begin(), [](unsigned char c) {
      return static_cast<char>(std::tolower(c));
    });
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

GenderLexicon::GenderLexicon(std::unordered_set<std::string> female,
                             std::unordered_set<std::string> male)
    : female_(std::move(female)), male_(std::move(male)) {
  if (female_.empty() || male_.empty()) {
    throw Error(ErrorCode::Parse, "lexicon requires non-empty female and male word lists");
  }
  std::vector<std::string> overlap;
  for (const auto& w : female_) {
    if (male_.count(w)) overlap.push_back(w);
  }
  if (!overlap.empty()) {
    std::sort(overlap.begin(), overlap.end());
    std::string msg = "lexicon lists overlap:";
    for (const auto& w : overlap) msg += " " + w;
    throw Error(ErrorCode::OverlappingLexicon, msg);
  }
  for (const auto* set : {&female_, &male_}) {
    for (const auto& w : *set) {
      bool clean = !w.empty();
      for (char c : w) {
        if (std::isspace(static_cast<unsigned char>(c)) ||
            std::isupper(static_cast<unsigned char>(c))) {
          clean = false;
        }
      }
      if (!clean) {
        throw Error(ErrorCode::Parse,
                    "lexicon entry '" + w + "' must be lowercase without whitespace");
      }
    }
  }
}

GenderLexicon GenderLexicon::parse(std::string_view text, const std::string& origin) {
  std::unordered_set<std::string> female;
  std::unordered_set<std::string> male;
  std::unordered_set<std::string>* current = nullptr;

  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    // trim
    auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    auto end = line.find_last_not_of(" \t\r");
    std::string word = line.substr(begin, end - begin + 1);
    if (word == "[female]") {
      current = &female;
    } else if (word == "[male]") {
      current = &male;
    } else if (current == nullptr) {
      throw Error(ErrorCode::Parse,
                  origin + ":" + std::to_string(lineno) + ": word before any section header");
    } else {
      current->insert(word);
    }
  }
  return GenderLexicon(std::move(female), std::move(male));
}

GenderLexicon GenderLexicon::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open lexicon file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

GenderLabel GenderLexicon::token_gender(std::string_view token) const {
  auto contains = [this, token](const std::unordered_set<std::string>& set) {
    if (set.count(std::string(token))) return true;
    if (!plural_matching_) return false;
    if (token.size() > 1 && token.back() == 's' &&
        set.count(std::string(token.substr(0, token.size() - 1)))) {
      return true;
    }
    if (token.size() > 2 && token.substr(token.size() - 2) == "es" &&
        set.count(std::string(token.substr(0, token.size() - 2)))) {
      return true;
    }
    return false;
  };
  if (contains(female_)) return GenderLabel::Female;
  if (contains(male_)) return GenderLabel::Male;
  return GenderLabel::Neutral;
}

std::string MaskedCaption::rendered() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

GenderLabel caption_gender(std::string_view caption, const GenderLexicon& lex) {
  bool has_male = false;
  bool has_female = false;
  for (const auto& tok : tokenize(caption)) {
    switch (lex.token_gender(tok)) {
      case GenderLabel::Male: has_male = true; break;
      case GenderLabel::Female: has_female = true; break;
      case GenderLabel::Neutral: break;
    }
  }
  if (has_male && !has_female) return GenderLabel::Male;
  if (has_female && !has_male) return GenderLabel::Female;
  return GenderLabel::Neutral;
}

GenderLabel image_gender(const std::vector<std::string>& reference_captions,
                         const GenderLexicon& lex) {
  if (reference_captions.empty()) {
    throw Error(ErrorCode::EmptyReferences, "image gender requires at least one caption");
  }
  bool any_male = false;
  bool any_female = false;
  for (const auto& caption : reference_captions) {
    for (const auto& tok : tokenize(caption)) {
      switch (lex.token_gender(tok)) {
        case GenderLabel::Male: any_male = true; break;
        case GenderLabel::Female: any_female = true; break;
        case GenderLabel::Neutral: break;
      }
    }
  }
  if (any_male && !any_female) return GenderLabel::Male;
  if (any_female && !any_male) return GenderLabel::Female;
  return GenderLabel::Neutral;
}

MaskedCaption mask_gender(std::string_view caption, const GenderLexicon& lex) {
  MaskedCaption out;
  out.source_gender = caption_gender(caption, lex);
  out.tokens = tokenize(caption);
  for (auto& tok : out.tokens) {
    if (lex.matches(tok)) tok = std::string(kGenderSentinel);
  }
  return out;
}

double error_rate(
    const std::vector<std::pair<std::string, std::string>>& predictions,
    const std::unordered_map<std::string, GenderLabel>& gold,
    const GenderLexicon& lex) {
  std::size_t errors = 0;
  std::size_t gendered = 0;
  for (const auto& [image_id, caption] : predictions) {
    auto it = gold.find(image_id);
    if (it == gold.end()) {
      throw Error(ErrorCode::MissingCatalogEntry,
                  "no gold gender label for image '" + image_id + "'");
    }
    if (it->second == GenderLabel::Neutral) continue;
    ++gendered;
    GenderLabel predicted = caption_gender(caption, lex);
    if (predicted == GenderLabel::Neutral) continue;
    if (predicted != it->second) ++errors;
  }
  if (gendered == 0) {
    throw Error(ErrorCode::UndefinedMetric,
                "error rate undefined: no prediction has a gendered gold label");
  }
  return static_cast<double>(errors) / static_cast<double>(gendered);
}

double gender_mention_rate(const std::vector<std::string>& texts,
                           const GenderLexicon& lex) {
  if (texts.empty()) {
    throw Error(ErrorCode::UndefinedMetric, "gender mention rate undefined on empty corpus");
  }
  std::size_t mentioning = 0;
  for (const auto& text : texts) {
    for (const auto& tok : tokenize(text)) {
      if (lex.matches(tok)) {
        ++mentioning;
        break;
      }
    }
  }
  return static_cast<double>(mentioning) / static_cast<double>(texts.size());
}

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::DuplicateInRanking: return "DuplicateInRanking";
    case ErrorCode::OverlappingLexicon: return "OverlappingLexicon";
    case ErrorCode::SentinelInInput: return "SentinelInInput";
    case ErrorCode::EmptyReferences: return "EmptyReferences";
    case ErrorCode::UndefinedMetric: return "UndefinedMetric";
    case ErrorCode::DegenerateTraining: return "DegenerateTraining";
    case ErrorCode::CorpusTooSmall: return "CorpusTooSmall";
    case ErrorCode::CyclicHierarchy: return "CyclicHierarchy";
    case ErrorCode::AmbiguousSurfaceForm: return "AmbiguousSurfaceForm";
    case ErrorCode::UnknownObject: return "UnknownObject";
    case ErrorCode::NoGroundTruth: return "NoGroundTruth";
    case ErrorCode::JoinFailure: return "JoinFailure";
    case ErrorCode::JoinMismatch: return "JoinMismatch";
    case ErrorCode::MissingCatalogEntry: return "MissingCatalogEntry";
    case ErrorCode::InvalidQuery: return "InvalidQuery";
    case ErrorCode::UnknownAnchor: return "UnknownAnchor";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace fairlens
