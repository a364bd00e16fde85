#include "fairlens/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

namespace fairlens {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Streams a JSONL file one line at a time; memory stays proportional to a
// single record plus whatever the callback keeps.
void for_each_record(const std::string& path,
                     const std::function<void(const json&, std::size_t)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open file: " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::Parse,
                  path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!rec.is_object()) {
      throw Error(ErrorCode::Parse,
                  path + ":" + std::to_string(lineno) + ": record is not a JSON object");
    }
    try {
      fn(rec, lineno);
    } catch (const Error&) {
      throw;
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Parse,
                  path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

[[noreturn]] void fail(ErrorCode code, const std::string& path, std::size_t lineno,
                       const std::string& what) {
  throw Error(code, path + ":" + std::to_string(lineno) + ": " + what);
}

std::string get_string(const json& rec, const char* field, const std::string& path,
                       std::size_t lineno) {
  auto it = rec.find(field);
  if (it == rec.end() || !it->is_string()) {
    fail(ErrorCode::Parse, path, lineno,
         std::string("missing or non-string field '") + field + "'");
  }
  return it->get<std::string>();
}

double get_probability(const json& obj, const char* field, const std::string& path,
                       std::size_t lineno) {
  auto it = obj.find(field);
  if (it == obj.end() || !it->is_number()) {
    fail(ErrorCode::Parse, path, lineno,
         std::string("missing or non-numeric field '") + field + "'");
  }
  double v = it->get<double>();
  if (v < 0.0 || v > 1.0) {
    fail(ErrorCode::Parse, path, lineno,
         std::string("probability '") + field + "' outside [0,1]: " + std::to_string(v));
  }
  return v;
}

void reject_sentinel(const std::string& caption, const std::string& path,
                     std::size_t lineno) {
  if (caption.find(kGenderSentinel) != std::string::npos) {
    fail(ErrorCode::SentinelInInput, path, lineno,
         "caption contains the reserved token " + std::string(kGenderSentinel));
  }
}

class DuplicateGuard {
 public:
  void check(const std::string& id, const std::string& path, std::size_t lineno) {
    if (!seen_.insert(id).second) {
      fail(ErrorCode::DuplicateId, path, lineno, "duplicate id '" + id + "'");
    }
  }

 private:
  std::unordered_set<std::string> seen_;
};

}  // namespace

const char* split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Dev: return "dev";
    case Split::Test: return "test";
  }
  return "train";
}

const char* scenario_name(Scenario s) {
  return s == Scenario::OO ? "OO" : "OP";
}

std::vector<CaptionRecord> read_captions(const std::string& path) {
  std::vector<CaptionRecord> out;
  DuplicateGuard ids;
  for_each_record(path, [&](const json& rec, std::size_t lineno) {
    CaptionRecord r;
    r.image_id = get_string(rec, "image_id", path, lineno);
    ids.check(r.image_id, path, lineno);
    auto it = rec.find("captions");
    if (it == rec.end() || !it->is_array() || it->empty()) {
      fail(ErrorCode::Parse, path, lineno, "field 'captions' must be a non-empty array");
    }
    for (const auto& c : *it) {
      if (!c.is_string()) fail(ErrorCode::Parse, path, lineno, "caption is not a string");
      std::string caption = c.get<std::string>();
      reject_sentinel(caption, path, lineno);
      r.captions.push_back(std::move(caption));
    }
    std::string split = get_string(rec, "split", path, lineno);
    if (split == "train") r.split = Split::Train;
    else if (split == "dev") r.split = Split::Dev;
    else if (split == "test") r.split = Split::Test;
    else fail(ErrorCode::Parse, path, lineno, "unknown split '" + split + "'");
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<PredictionRecord> read_predictions(const std::string& path) {
  std::vector<PredictionRecord> out;
  DuplicateGuard ids;
  for_each_record(path, [&](const json& rec, std::size_t lineno) {
    PredictionRecord r;
    r.image_id = get_string(rec, "image_id", path, lineno);
    ids.check(r.image_id, path, lineno);
    r.caption = get_string(rec, "caption", path, lineno);
    reject_sentinel(r.caption, path, lineno);
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<ObjectAnnotation> read_annotations(const std::string& path) {
  std::vector<ObjectAnnotation> out;
  DuplicateGuard ids;
  for_each_record(path, [&](const json& rec, std::size_t lineno) {
    ObjectAnnotation r;
    r.image_id = get_string(rec, "image_id", path, lineno);
    ids.check(r.image_id, path, lineno);
    auto it = rec.find("objects");
    if (it == rec.end() || !it->is_array()) {
      fail(ErrorCode::Parse, path, lineno, "field 'objects' must be an array");
    }
    for (const auto& o : *it) {
      if (!o.is_string()) fail(ErrorCode::Parse, path, lineno, "object name is not a string");
      r.objects.insert(o.get<std::string>());
    }
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<RankedRetrieval> read_rankings(const std::string& path) {
  std::vector<RankedRetrieval> out;
  DuplicateGuard ids;
  for_each_record(path, [&](const json& rec, std::size_t lineno) {
    RankedRetrieval r;
    r.query_id = get_string(rec, "query_id", path, lineno);
    ids.check(r.query_id, path, lineno);
    auto rank = rec.find("ranking");
    if (rank == rec.end() || !rank->is_array()) {
      fail(ErrorCode::Parse, path, lineno, "field 'ranking' must be an array");
    }
    std::unordered_set<std::string> seen;
    for (const auto& id : *rank) {
      if (!id.is_string()) fail(ErrorCode::Parse, path, lineno, "ranking entry is not a string");
      std::string s = id.get<std::string>();
      if (!seen.insert(s).second) {
        fail(ErrorCode::DuplicateInRanking, path, lineno,
             "image '" + s + "' repeated in ranking for query '" + r.query_id + "'");
      }
      r.ranking.push_back(std::move(s));
    }
    auto rel = rec.find("relevant");
    if (rel == rec.end() || !rel->is_array()) {
      fail(ErrorCode::Parse, path, lineno, "field 'relevant' must be an array");
    }
    for (const auto& id : *rel) {
      if (!id.is_string()) fail(ErrorCode::Parse, path, lineno, "relevant entry is not a string");
      r.relevant.insert(id.get<std::string>());
    }
    out.push_back(std::move(r));
  });
  return out;
}

GenderCatalog read_catalog(const std::string& path) {
  GenderCatalog catalog;
  for_each_record(path, [&](const json& rec, std::size_t lineno) {
    std::string id = get_string(rec, "image_id", path, lineno);
    if (catalog.labels.count(id)) {
      fail(ErrorCode::DuplicateId, path, lineno, "duplicate id '" + id + "'");
    }
    std::string g = get_string(rec, "gender", path, lineno);
    GenderLabel label;
    try {
      label = gender_from_name(g);
    } catch (const Error&) {
      fail(ErrorCode::Parse, path, lineno, "unknown gender '" + g + "'");
    }
    catalog.labels.emplace(std::move(id), label);
  });
  return catalog;
}

std::vector<ResolutionInstance> read_resolution(const std::string& path) {
  std::vector<ResolutionInstance> out;
  for_each_record(path, [&](const json& rec, std::size_t lineno) {
    ResolutionInstance r;
    r.occupation = get_string(rec, "occupation", path, lineno);
    std::string sc = get_string(rec, "scenario", path, lineno);
    if (sc == "OO") r.scenario = Scenario::OO;
    else if (sc == "OP") r.scenario = Scenario::OP;
    else fail(ErrorCode::Parse, path, lineno, "unknown scenario '" + sc + "'");
    auto binary_gender = [&](const char* field) {
      std::string g = get_string(rec, field, path, lineno);
      if (g == "male") return GenderLabel::Male;
      if (g == "female") return GenderLabel::Female;
      fail(ErrorCode::Parse, path, lineno,
           std::string("field '") + field + "' must be 'male' or 'female', got '" + g + "'");
    };
    r.true_gender = binary_gender("true_gender");
    r.predicted_gender = binary_gender("predicted_gender");
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<VlBiasRecord> read_vlbias(const std::string& path) {
  std::vector<VlBiasRecord> out;
  DuplicateGuard ids;
  for_each_record(path, [&](const json& rec, std::size_t lineno) {
    VlBiasRecord r;
    r.pair_id = get_string(rec, "pair_id", path, lineno);
    ids.check(r.pair_id, path, lineno);
    r.target = get_string(rec, "target", path, lineno);
    auto pt = rec.find("p_t");
    if (pt == rec.end() || !pt->is_object()) {
      fail(ErrorCode::Parse, path, lineno, "field 'p_t' must be an object");
    }
    r.p_t.factual = get_probability(*pt, "factual", path, lineno);
    r.p_t.counterfactual = get_probability(*pt, "counterfactual", path, lineno);
    auto pa = rec.find("p_a");
    if (pa == rec.end() || !pa->is_object()) {
      fail(ErrorCode::Parse, path, lineno, "field 'p_a' must be an object");
    }
    auto gender_block = [&](const char* gender) {
      auto g = pa->find(gender);
      if (g == pa->end() || !g->is_object()) {
        fail(ErrorCode::Parse, path, lineno,
             std::string("field 'p_a.") + gender + "' must be an object");
      }
      ProbabilityPair p;
      p.factual = get_probability(*g, "factual", path, lineno);
      p.counterfactual = get_probability(*g, "counterfactual", path, lineno);
      return p;
    };
    r.p_a_male = gender_block("male");
    r.p_a_female = gender_block("female");
    out.push_back(std::move(r));
  });
  return out;
}

namespace {

void emit(std::ostream& out, const ordered_json& rec) {
  out << rec.dump() << '\n';
}

}  // namespace

void write_captions(std::ostream& out, const std::vector<CaptionRecord>& records) {
  for (const auto& r : records) {
    ordered_json rec;
    rec["image_id"] = r.image_id;
    rec["captions"] = r.captions;
    rec["split"] = split_name(r.split);
    emit(out, rec);
  }
}

void write_predictions(std::ostream& out, const std::vector<PredictionRecord>& records) {
  for (const auto& r : records) {
    ordered_json rec;
    rec["image_id"] = r.image_id;
    rec["caption"] = r.caption;
    emit(out, rec);
  }
}

void write_annotations(std::ostream& out, const std::vector<ObjectAnnotation>& records) {
  for (const auto& r : records) {
    ordered_json rec;
    rec["image_id"] = r.image_id;
    rec["objects"] = r.objects;
    emit(out, rec);
  }
}

void write_rankings(std::ostream& out, const std::vector<RankedRetrieval>& records) {
  for (const auto& r : records) {
    ordered_json rec;
    rec["query_id"] = r.query_id;
    rec["ranking"] = r.ranking;
    rec["relevant"] = r.relevant;
    emit(out, rec);
  }
}

void write_catalog(std::ostream& out, const GenderCatalog& catalog) {
  // unordered storage, sorted emission
  std::vector<std::pair<std::string, GenderLabel>> items(catalog.labels.begin(),
                                                         catalog.labels.end());
  std::sort(items.begin(), items.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [id, label] : items) {
    ordered_json rec;
    rec["image_id"] = id;
    rec["gender"] = gender_name(label);
    emit(out, rec);
  }
}

void write_resolution(std::ostream& out, const std::vector<ResolutionInstance>& records) {
  for (const auto& r : records) {
    ordered_json rec;
    rec["occupation"] = r.occupation;
    rec["scenario"] = scenario_name(r.scenario);
    rec["true_gender"] = gender_name(r.true_gender);
    rec["predicted_gender"] = gender_name(r.predicted_gender);
    emit(out, rec);
  }
}

void write_vlbias(std::ostream& out, const std::vector<VlBiasRecord>& records) {
  for (const auto& r : records) {
    ordered_json rec;
    rec["pair_id"] = r.pair_id;
    rec["target"] = r.target;
    rec["p_t"] = {{"factual", r.p_t.factual}, {"counterfactual", r.p_t.counterfactual}};
    rec["p_a"] = {
        {"male",
         {{"factual", r.p_a_male.factual}, {"counterfactual", r.p_a_male.counterfactual}}},
        {"female",
         {{"factual", r.p_a_female.factual}, {"counterfactual", r.p_a_female.counterfactual}}}};
    emit(out, rec);
  }
}

JoinReport validate_join(const std::vector<PredictionRecord>& predictions,
                         const std::vector<CaptionRecord>& references,
                         const GenderCatalog* catalog, bool strict) {
  JoinReport report;
  std::unordered_set<std::string> ref_ids;
  for (const auto& r : references) ref_ids.insert(r.image_id);
  std::unordered_set<std::string> pred_ids;
  for (const auto& p : predictions) pred_ids.insert(p.image_id);

  for (const auto& p : predictions) {
    if (!ref_ids.count(p.image_id)) {
      report.predictions_without_reference.push_back(p.image_id);
    }
    if (catalog) {
      auto it = catalog->labels.find(p.image_id);
      if (it == catalog->labels.end()) {
        report.predictions_without_catalog.push_back(p.image_id);
      } else {
        ++report.gender_distribution[it->second];
      }
    }
  }
  for (const auto& r : references) {
    if (!pred_ids.count(r.image_id)) {
      report.references_without_prediction.push_back(r.image_id);
    }
  }
  std::sort(report.predictions_without_reference.begin(),
            report.predictions_without_reference.end());
  std::sort(report.references_without_prediction.begin(),
            report.references_without_prediction.end());
  std::sort(report.predictions_without_catalog.begin(),
            report.predictions_without_catalog.end());

  if (strict && !report.clean()) {
    std::string msg = "join mismatch:";
    auto describe = [&msg](const char* what, const std::vector<std::string>& ids) {
      if (ids.empty()) return;
      msg += " " + std::to_string(ids.size()) + " " + what + " (first: " + ids.front() + ")";
    };
    describe("predictions without reference", report.predictions_without_reference);
    describe("references without prediction", report.references_without_prediction);
    describe("predictions without catalog entry", report.predictions_without_catalog);
    throw Error(ErrorCode::JoinMismatch, msg);
  }
  return report;
}

}  // namespace fairlens
