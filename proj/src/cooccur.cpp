#include "fairlens/cooccur.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace fairlens {

namespace {

std::size_t gender_index(GenderLabel g) {
  return g == GenderLabel::Male ? kMaleIdx : kFemaleIdx;
}

}  // namespace

CooccurrenceTable build_table(const std::vector<CaptionRecord>& records,
                              const GenderLexicon& lex,
                              const std::set<std::string>& word_list,
                              const SynonymHierarchy* hierarchy) {
  for (const auto& w : word_list) {
    if (lex.female_words().count(w) || lex.male_words().count(w)) {
      throw Error(ErrorCode::InvalidArgument,
                  "evaluation word '" + w + "' is a lexicon gender word");
    }
  }
  CooccurrenceTable table;
  table.word_list = word_list;
  for (const auto& w : word_list) table.gender_word_counts[w] = {0, 0};

  for (const auto& record : records) {
    for (const auto& caption : record.captions) {
      ++table.captions_seen;
      GenderLabel g = caption_gender(caption, lex);
      if (g == GenderLabel::Neutral) continue;
      std::unordered_set<std::string> seen;  // once per caption
      for (const auto& tok : tokenize(caption)) {
        if (word_list.count(tok) && seen.insert(tok).second) {
          ++table.gender_word_counts[tok][gender_index(g)];
        }
      }
    }
    if (hierarchy == nullptr) continue;

    ++table.images_seen;
    std::set<std::string> objects;
    for (const auto& caption : record.captions) {
      auto extracted = extract_objects(caption, *hierarchy);
      objects.insert(extracted.begin(), extracted.end());
    }
    table.seen_objects.insert(objects.begin(), objects.end());
    for (auto a = objects.begin(); a != objects.end(); ++a) {
      for (auto b = std::next(a); b != objects.end(); ++b) {
        ++table.object_partners[*a][*b];
        ++table.object_partners[*b][*a];
      }
    }
    GenderLabel g = image_gender(record.captions, lex);
    if (g != GenderLabel::Neutral) {
      auto& counts = table.gender_object_counts[gender_index(g)];
      for (const auto& o : objects) ++counts[o];
    }
  }
  return table;
}

std::set<std::string> derive_word_list(const std::vector<CaptionRecord>& records,
                                       const GenderLexicon& lex, std::size_t top_n,
                                       const std::set<std::string>& stoplist) {
  if (records.empty()) {
    throw Error(ErrorCode::InvalidArgument, "cannot derive a word list from an empty corpus");
  }
  std::unordered_map<std::string, std::int64_t> freq;
  for (const auto& record : records) {
    for (const auto& caption : record.captions) {
      for (const auto& tok : tokenize(caption)) {
        if (tok == kGenderSentinel) continue;
        if (lex.matches(tok)) continue;
        if (stoplist.count(tok)) continue;
        ++freq[tok];
      }
    }
  }
  std::vector<std::pair<std::string, std::int64_t>> ranked(freq.begin(), freq.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::set<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && i < top_n; ++i) {
    out.insert(ranked[i].first);
  }
  return out;
}

BiasAmpResult bias_amp(const CooccurrenceTable& train_table,
                       const CooccurrenceTable& pred_table) {
  if (train_table.word_list != pred_table.word_list) {
    throw Error(ErrorCode::InvalidArgument,
                "bias amplification requires identical word lists in both tables");
  }
  BiasAmpResult result;
  double sum = 0.0;
  for (const auto& word : train_table.word_list) {
    const auto& train = train_table.gender_word_counts.at(word);
    const std::int64_t train_total = train[kMaleIdx] + train[kFemaleIdx];
    if (train_total == 0) {
      // b undefined: the word never co-occurs with a gender in training
      result.excluded_words.insert(word);
      continue;
    }
    ++result.effective_word_count;
    const auto& pred = pred_table.gender_word_counts.at(word);
    const std::int64_t pred_total = pred[kMaleIdx] + pred[kFemaleIdx];
    if (pred_total == 0) {
      result.skipped_words.insert(word);
      continue;
    }
    for (std::size_t a : {kMaleIdx, kFemaleIdx}) {
      double b = static_cast<double>(train[a]) / static_cast<double>(train_total);
      if (!(b > 0.5)) continue;  // strict indicator at 1/|A|
      double b_hat = static_cast<double>(pred[a]) / static_cast<double>(pred_total);
      double contribution = b_hat - b;
      result.per_word.push_back(
          {word, a == kMaleIdx ? GenderLabel::Male : GenderLabel::Female, contribution});
      sum += contribution;
    }
  }
  if (result.effective_word_count == 0) {
    throw Error(ErrorCode::UndefinedMetric,
                "bias amplification undefined: no word co-occurs with a gender in training");
  }
  result.value = sum / static_cast<double>(result.effective_word_count);
  return result;
}

namespace {

std::vector<std::string> rank_partners(const std::map<std::string, std::int64_t>& counts,
                                       std::size_t k) {
  std::vector<std::pair<std::string, std::int64_t>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) out.push_back(ranked[i].first);
  return out;
}

}  // namespace

std::vector<std::string> top_cooccurring(const CooccurrenceTable& table,
                                         const std::string& object_anchor, std::size_t k) {
  if (!table.seen_objects.count(object_anchor)) {
    throw Error(ErrorCode::UnknownAnchor,
                "object '" + object_anchor + "' never occurs in the table's corpus");
  }
  auto it = table.object_partners.find(object_anchor);
  if (it == table.object_partners.end()) return {};  // seen, but always alone
  return rank_partners(it->second, k);
}

std::vector<std::string> top_cooccurring(const CooccurrenceTable& table, GenderLabel anchor,
                                         std::size_t k) {
  if (anchor == GenderLabel::Neutral) {
    throw Error(ErrorCode::InvalidArgument, "co-occurrence anchor gender must be male or female");
  }
  const auto& counts = table.gender_object_counts[gender_index(anchor)];
  if (counts.empty()) {
    throw Error(ErrorCode::UnknownAnchor,
                std::string("gender '") + gender_name(anchor) +
                    "' co-occurs with no object in the table's corpus");
  }
  return rank_partners(counts, k);
}

HitRatioResult hit_ratio(const std::map<std::string, ImageObjectEval>& per_image,
                         const std::set<std::string>& in_scope_images,
                         const std::vector<std::string>& c_set, bool count_empty_as_zero) {
  std::set<std::string> c(c_set.begin(), c_set.end());
  HitRatioResult result;
  double sum = 0.0;
  for (const auto& id : in_scope_images) {
    auto it = per_image.find(id);
    if (it == per_image.end()) continue;  // not part of the evaluated set
    const auto& hallucinated = it->second.hallucinated;
    if (hallucinated.empty()) {
      if (count_empty_as_zero) {
        ++result.images_scored;
      } else {
        ++result.images_excluded;
      }
      continue;
    }
    std::size_t hits = 0;
    for (const auto& o : hallucinated) {
      if (c.count(o)) ++hits;
    }
    sum += static_cast<double>(hits) / static_cast<double>(hallucinated.size());
    ++result.images_scored;
  }
  if (result.images_scored == 0) {
    throw Error(ErrorCode::UndefinedMetric, "hit ratio undefined: no qualifying image");
  }
  result.value = sum / static_cast<double>(result.images_scored);
  return result;
}

HitRatioResult hit_ratio_object(const std::map<std::string, ImageObjectEval>& per_image,
                                const std::map<std::string, std::set<std::string>>& ground_truths,
                                const std::string& anchor,
                                const std::vector<std::string>& c_set,
                                bool count_empty_as_zero) {
  std::set<std::string> in_scope;
  for (const auto& [id, gt] : ground_truths) {
    if (gt.count(anchor)) in_scope.insert(id);
  }
  return hit_ratio(per_image, in_scope, c_set, count_empty_as_zero);
}

HitRatioResult hit_ratio_gender(const std::map<std::string, ImageObjectEval>& per_image,
                                const GenderCatalog& catalog, GenderLabel anchor,
                                const std::vector<std::string>& c_set,
                                bool count_empty_as_zero) {
  if (anchor == GenderLabel::Neutral) {
    throw Error(ErrorCode::InvalidArgument, "hit ratio gender anchor must be male or female");
  }
  std::set<std::string> in_scope;
  for (const auto& [id, eval] : per_image) {
    auto it = catalog.labels.find(id);
    if (it != catalog.labels.end() && it->second == anchor) in_scope.insert(id);
  }
  return hit_ratio(per_image, in_scope, c_set, count_empty_as_zero);
}

}  // namespace fairlens
