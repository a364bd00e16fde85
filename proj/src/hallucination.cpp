#include "fairlens/hallucination.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fairlens {

namespace {

std::string normalize_phrase(std::string_view surface) {
  std::string out;
  for (const auto& tok : tokenize(surface)) {
    if (!out.empty()) out += ' ';
    out += tok;
  }
  return out;
}

std::size_t token_count(const std::string& phrase) {
  if (phrase.empty()) return 0;
  std::size_t n = 1;
  for (char c : phrase) {
    if (c == ' ') ++n;
  }
  return n;
}

}  // namespace

SynonymHierarchy SynonymHierarchy::from_json_text(std::string_view text,
                                                  const std::string& origin) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Parse, origin + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("synonyms") || !doc["synonyms"].is_object()) {
    throw Error(ErrorCode::Parse, origin + ": expected object with a 'synonyms' map");
  }

  SynonymHierarchy h;
  for (const auto& [surface, canonical] : doc["synonyms"].items()) {
    if (!canonical.is_string()) {
      throw Error(ErrorCode::Parse, origin + ": synonym target for '" + surface +
                                        "' is not a string");
    }
    std::string key = normalize_phrase(surface);
    std::string value = canonical.get<std::string>();
    if (key.empty()) {
      throw Error(ErrorCode::Parse, origin + ": empty surface form");
    }
    std::size_t n = token_count(key);
    if (n > 3) {
      throw Error(ErrorCode::Parse,
                  origin + ": surface form '" + surface + "' exceeds 3 tokens");
    }
    auto [it, inserted] = h.word_to_canonical_.emplace(key, value);
    if (!inserted && it->second != value) {
      throw Error(ErrorCode::AmbiguousSurfaceForm,
                  origin + ": surface form '" + key + "' maps to both '" + it->second +
                      "' and '" + value + "'");
    }
    h.max_phrase_tokens_ = std::max(h.max_phrase_tokens_, n);
    h.canonicals_.insert(value);
  }

  if (doc.contains("parents")) {
    if (!doc["parents"].is_object()) {
      throw Error(ErrorCode::Parse, origin + ": 'parents' must be an object");
    }
    for (const auto& [child, parent] : doc["parents"].items()) {
      if (!parent.is_string()) {
        throw Error(ErrorCode::Parse,
                    origin + ": parent of '" + child + "' is not a string");
      }
      h.parent_[child] = parent.get<std::string>();
    }
  }

  h.validate(origin);
  h.canonicals_ordered_.insert(h.canonicals_.begin(), h.canonicals_.end());
  return h;
}

void SynonymHierarchy::validate(const std::string& origin) {
  for (const auto& [child, parent] : parent_) {
    if (!canonicals_.count(child)) {
      throw Error(ErrorCode::Parse,
                  origin + ": parent edge from '" + child + "', which is not a canonical object");
    }
    if (!canonicals_.count(parent)) {
      throw Error(ErrorCode::Parse,
                  origin + ": parent '" + parent + "' of '" + child +
                      "' is not a canonical object");
    }
  }
  // cycle check: walk up from every node, path length bounded by map size
  for (const auto& [start, first_parent] : parent_) {
    std::string chain = start;
    std::unordered_set<std::string> visited{start};
    const std::string* cur = &first_parent;
    while (cur) {
      chain += " -> " + *cur;
      if (!visited.insert(*cur).second) {
        throw Error(ErrorCode::CyclicHierarchy, origin + ": cycle in parent relation: " + chain);
      }
      auto it = parent_.find(*cur);
      cur = it == parent_.end() ? nullptr : &it->second;
    }
  }
}

SynonymHierarchy SynonymHierarchy::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open hierarchy file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str(), path);
}

const std::string* SynonymHierarchy::parent_of(const std::string& canonical) const {
  auto it = parent_.find(canonical);
  return it == parent_.end() ? nullptr : &it->second;
}

bool SynonymHierarchy::is_strict_ancestor(const std::string& ancestor,
                                          const std::string& descendant) const {
  const std::string* cur = parent_of(descendant);
  while (cur) {
    if (*cur == ancestor) return true;
    cur = parent_of(*cur);
  }
  return false;
}

std::optional<std::string> SynonymHierarchy::lookup(const std::string& phrase) const {
  auto it = word_to_canonical_.find(phrase);
  if (it == word_to_canonical_.end()) return std::nullopt;
  return it->second;
}

std::set<std::string> extract_objects(std::string_view caption, const SynonymHierarchy& h) {
  std::vector<std::string> tokens = tokenize(caption);
  std::set<std::string> objects;
  std::size_t i = 0;
  const std::size_t max_len = h.max_phrase_tokens();
  while (i < tokens.size()) {
    std::size_t longest = std::min(max_len, tokens.size() - i);
    bool matched = false;
    for (std::size_t len = longest; len >= 1; --len) {
      std::string phrase = tokens[i];
      for (std::size_t j = 1; j < len; ++j) phrase += ' ' + tokens[i + j];
      if (auto canonical = h.lookup(phrase)) {
        objects.insert(*canonical);
        i += len;
        matched = true;
        break;
      }
    }
    if (!matched) ++i;
  }
  return objects;
}

std::set<std::string> ground_truth_objects(const ObjectAnnotation* annotation,
                                           const std::vector<std::string>& references,
                                           const SynonymHierarchy& h) {
  if (annotation == nullptr && references.empty()) {
    throw Error(ErrorCode::NoGroundTruth,
                "ground truth requires an annotation or reference captions");
  }
  std::set<std::string> gt;
  if (annotation) {
    for (const auto& o : annotation->objects) {
      if (!h.is_canonical(o)) {
        throw Error(ErrorCode::UnknownObject,
                    "annotated object '" + o + "' is not a canonical object (image '" +
                        annotation->image_id + "')");
      }
      gt.insert(o);
    }
  }
  for (const auto& caption : references) {
    auto extracted = extract_objects(caption, h);
    gt.insert(extracted.begin(), extracted.end());
  }
  return gt;
}

bool is_hallucinated(const std::string& predicted, const std::set<std::string>& ground_truth,
                     const SynonymHierarchy& h, bool relax_sub) {
  if (!h.is_canonical(predicted)) {
    throw Error(ErrorCode::UnknownObject,
                "predicted object '" + predicted + "' is not a canonical object");
  }
  if (ground_truth.count(predicted)) return false;
  for (const auto& g : ground_truth) {
    if (h.is_strict_ancestor(predicted, g)) return false;  // super-category of present object
  }
  if (relax_sub) {
    for (const auto& g : ground_truth) {
      if (h.is_strict_ancestor(g, predicted)) return false;
    }
  }
  return true;
}

ChairResult chair(const std::vector<PredictionRecord>& predictions,
                  const std::map<std::string, std::set<std::string>>& ground_truths,
                  const SynonymHierarchy& h, bool relax_sub) {
  if (predictions.empty()) {
    throw Error(ErrorCode::InvalidArgument, "chair requires at least one prediction");
  }
  ChairResult result;
  result.relaxed_sub = relax_sub;
  for (const auto& pred : predictions) {
    auto gt = ground_truths.find(pred.image_id);
    if (gt == ground_truths.end()) {
      throw Error(ErrorCode::JoinFailure,
                  "no ground-truth object set for image '" + pred.image_id + "'");
    }
    ImageObjectEval eval;
    eval.mentioned = extract_objects(pred.caption, h);
    for (const auto& obj : eval.mentioned) {
      if (is_hallucinated(obj, gt->second, h, relax_sub)) eval.hallucinated.insert(obj);
    }
    result.total_objects += eval.mentioned.size();
    result.hallucinated_objects += eval.hallucinated.size();
    result.total_captions += 1;
    if (!eval.hallucinated.empty()) result.captions_with_hallucination += 1;
    result.per_image.emplace(pred.image_id, std::move(eval));
  }
  if (result.total_objects > 0) {
    result.chair_i = static_cast<double>(result.hallucinated_objects) /
                     static_cast<double>(result.total_objects);
  }
  result.chair_s = static_cast<double>(result.captions_with_hallucination) /
                   static_cast<double>(result.total_captions);
  return result;
}

}  // namespace fairlens
