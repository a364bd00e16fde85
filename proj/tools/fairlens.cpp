// fairlens: gender-bias and object-hallucination metrics over caption
// corpora, ranking dumps, and masked-probability dumps.

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairlens/cooccur.hpp"
#include "fairlens/corpus.hpp"
#include "fairlens/hallucination.hpp"
#include "fairlens/lexicon.hpp"
#include "fairlens/lic.hpp"
#include "fairlens/report.hpp"
#include "fairlens/retrieval.hpp"
#include "fairlens/vlbias.hpp"

namespace {

using namespace fairlens;
using nlohmann::ordered_json;

struct CommonOpts {
  std::uint64_t seed = 0;
  std::string out;           // empty -> stdout
  std::string format = "json";
  bool paper_scale = false;
  bool match_plurals = false;
  std::string lexicon_path;  // empty -> builtin
  std::string timestamp;     // empty -> unset, "now" -> wall clock
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--seed", opts.seed, "Seed for all randomness in this run");
  cmd->add_option("--out", opts.out, "Write output to this path instead of stdout");
  cmd->add_option("--format", opts.format, "Report format: json or table")
      ->check(CLI::IsMember({"json", "table"}));
  cmd->add_flag("--paper-scale", opts.paper_scale,
                "Render proportion-style metrics x100 in table output");
  cmd->add_flag("--match-plurals", opts.match_plurals,
                "Also match +s/+es plural forms of lexicon words");
  cmd->add_option("--lexicon", opts.lexicon_path,
                  "Lexicon file ([female]/[male] sections); default: bundled list");
  cmd->add_option("--timestamp", opts.timestamp,
                  "Timestamp string for the report, or 'now'; unset keeps reports "
                  "byte-reproducible");
}

GenderLexicon load_lexicon(const CommonOpts& opts, MetricReport& report) {
  GenderLexicon lex = opts.lexicon_path.empty() ? GenderLexicon::builtin()
                                                : GenderLexicon::load(opts.lexicon_path);
  if (!opts.lexicon_path.empty()) {
    report.input_digests[opts.lexicon_path] = file_digest(opts.lexicon_path);
  }
  lex.set_plural_matching(opts.match_plurals);
  return lex;
}

std::string iso_now() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void apply_common(MetricReport& report, const CommonOpts& opts, const std::string& subcommand) {
  report.subcommand = subcommand;
  report.config["seed"] = std::to_string(opts.seed);
  report.config["match_plurals"] = opts.match_plurals ? "true" : "false";
  if (!opts.lexicon_path.empty()) report.config["lexicon"] = opts.lexicon_path;
  if (!opts.timestamp.empty()) {
    report.timestamp = opts.timestamp == "now" ? iso_now() : opts.timestamp;
  }
}

void write_output(const CommonOpts& opts, const std::string& text) {
  if (opts.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(opts.out, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open output file: " + opts.out);
  out << text;
}

int finish(const CommonOpts& opts, const MetricReport& report, int exit_code = 0) {
  ReportFormat fmt = opts.format == "table" ? ReportFormat::Table : ReportFormat::Json;
  write_output(opts, emit_report(report, fmt, opts.paper_scale));
  return exit_code;
}

std::string tracked(MetricReport& report, const std::string& path) {
  report.input_digests[path] = file_digest(path);
  return path;
}

GenderCatalog catalog_from_references(const std::vector<CaptionRecord>& refs,
                                      const GenderLexicon& lex) {
  GenderCatalog catalog;
  for (const auto& r : refs) {
    catalog.labels.emplace(r.image_id, image_gender(r.captions, lex));
  }
  return catalog;
}

std::vector<CaptionRecord> predictions_as_records(const std::vector<PredictionRecord>& preds) {
  std::vector<CaptionRecord> records;
  records.reserve(preds.size());
  for (const auto& p : preds) {
    records.push_back({p.image_id, {p.caption}, Split::Test});
  }
  return records;
}

std::set<std::string> read_word_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open word list file: " + path);
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    auto end = line.find_last_not_of(" \t\r");
    words.insert(line.substr(begin, end - begin + 1));
  }
  return words;
}

SynonymHierarchy load_hierarchy_opt(const std::string& path, MetricReport& report) {
  if (path.empty()) return SynonymHierarchy::builtin_coco();
  report.input_digests[path] = file_digest(path);
  report.config["hierarchy"] = path;
  return SynonymHierarchy::load(path);
}

// Ground-truth object sets for every prediction id, from annotations
// and/or reference captions.
std::map<std::string, std::set<std::string>> build_ground_truths(
    const std::vector<PredictionRecord>& preds, const std::vector<CaptionRecord>& refs,
    const std::vector<ObjectAnnotation>& annotations, const SynonymHierarchy& h) {
  std::map<std::string, const CaptionRecord*> ref_by_id;
  for (const auto& r : refs) ref_by_id.emplace(r.image_id, &r);
  std::map<std::string, const ObjectAnnotation*> ann_by_id;
  for (const auto& a : annotations) ann_by_id.emplace(a.image_id, &a);

  static const std::vector<std::string> kNoRefs;
  std::map<std::string, std::set<std::string>> gts;
  for (const auto& p : preds) {
    auto ref = ref_by_id.find(p.image_id);
    auto ann = ann_by_id.find(p.image_id);
    const ObjectAnnotation* annotation = ann == ann_by_id.end() ? nullptr : ann->second;
    const std::vector<std::string>& captions =
        ref == ref_by_id.end() ? kNoRefs : ref->second->captions;
    if (annotation == nullptr && captions.empty()) {
      throw Error(ErrorCode::JoinFailure,
                  "image '" + p.image_id + "' has neither annotation nor reference captions");
    }
    gts.emplace(p.image_id, ground_truth_objects(annotation, captions, h));
  }
  return gts;
}

// ---------------------------------------------------------------------
// subcommand handlers

struct MaskArgs {
  CommonOpts common;
  std::string pred_path;
  std::string refs_path;
};

int run_mask(const MaskArgs& args) {
  GenderLexicon lex = args.common.lexicon_path.empty()
                          ? GenderLexicon::builtin()
                          : GenderLexicon::load(args.common.lexicon_path);
  lex.set_plural_matching(args.common.match_plurals);
  std::ostringstream out;
  auto emit = [&out](const std::string& id, int index, const MaskedCaption& masked) {
    ordered_json rec;
    rec["image_id"] = id;
    if (index >= 0) rec["caption_index"] = index;
    rec["tokens"] = masked.tokens;
    rec["source_gender"] = gender_name(masked.source_gender);
    out << rec.dump() << '\n';
  };
  if (!args.pred_path.empty()) {
    for (const auto& p : read_predictions(args.pred_path)) {
      emit(p.image_id, -1, mask_gender(p.caption, lex));
    }
  } else {
    for (const auto& r : read_captions(args.refs_path)) {
      for (std::size_t i = 0; i < r.captions.size(); ++i) {
        emit(r.image_id, static_cast<int>(i), mask_gender(r.captions[i], lex));
      }
    }
  }
  write_output(args.common, out.str());
  return 0;
}

struct LabelArgs {
  CommonOpts common;
  std::string pred_path;
  std::string refs_path;
};

int run_label(const LabelArgs& args) {
  GenderLexicon lex = args.common.lexicon_path.empty()
                          ? GenderLexicon::builtin()
                          : GenderLexicon::load(args.common.lexicon_path);
  lex.set_plural_matching(args.common.match_plurals);
  std::ostringstream out;
  if (!args.refs_path.empty()) {
    GenderCatalog catalog = catalog_from_references(read_captions(args.refs_path), lex);
    write_catalog(out, catalog);
  } else {
    for (const auto& p : read_predictions(args.pred_path)) {
      ordered_json rec;
      rec["image_id"] = p.image_id;
      rec["gender"] = gender_name(caption_gender(p.caption, lex));
      out << rec.dump() << '\n';
    }
  }
  write_output(args.common, out.str());
  return 0;
}

struct ErrorArgs {
  CommonOpts common;
  std::string pred_path;
  std::string refs_path;
  std::string catalog_path;
  bool strict = false;
};

int run_error(const ErrorArgs& args) {
  MetricReport report;
  apply_common(report, args.common, "error");
  GenderLexicon lex = load_lexicon(args.common, report);

  auto preds = read_predictions(tracked(report, args.pred_path));
  report.config["pred"] = args.pred_path;

  GenderCatalog catalog;
  if (!args.catalog_path.empty()) {
    catalog = read_catalog(tracked(report, args.catalog_path));
    report.config["catalog"] = args.catalog_path;
  } else {
    auto refs = read_captions(tracked(report, args.refs_path));
    report.config["refs"] = args.refs_path;
    catalog = catalog_from_references(refs, lex);
    if (args.strict) validate_join(preds, refs, &catalog, true);
  }

  std::vector<std::pair<std::string, std::string>> pairs;
  std::vector<std::string> texts;
  pairs.reserve(preds.size());
  for (const auto& p : preds) {
    pairs.emplace_back(p.image_id, p.caption);
    texts.push_back(p.caption);
  }
  report.metrics["lexicon"]["error"] = error_rate(pairs, catalog.labels, lex);
  report.metrics["lexicon"]["gender_mention_rate"] = gender_mention_rate(texts, lex);
  report.notes["n_predictions"] = std::to_string(preds.size());
  return finish(args.common, report);
}

struct LicArgs {
  CommonOpts common;
  std::string gt_path;
  std::string pred_path;
  double eval_fraction = 0.2;
  double smoothing = 1.0;
};

int run_lic(const LicArgs& args) {
  MetricReport report;
  apply_common(report, args.common, "lic");
  GenderLexicon lex = load_lexicon(args.common, report);
  report.config["gt"] = args.gt_path;
  report.config["pred"] = args.pred_path;
  report.config["eval_fraction"] = std::to_string(args.eval_fraction);
  report.config["smoothing"] = std::to_string(args.smoothing);

  std::vector<MaskedCaption> gt_corpus;
  for (const auto& r : read_captions(tracked(report, args.gt_path))) {
    for (const auto& c : r.captions) gt_corpus.push_back(mask_gender(c, lex));
  }
  std::vector<MaskedCaption> gen_corpus;
  for (const auto& p : read_predictions(tracked(report, args.pred_path))) {
    gen_corpus.push_back(mask_gender(p.caption, lex));
  }

  LicResult result =
      lic_score(gt_corpus, gen_corpus, args.common.seed, args.eval_fraction, args.smoothing);
  report.metrics["lic"]["lic"] = result.lic;
  report.metrics["lic"]["lic_d"] = result.lic_d;
  report.metrics["lic"]["lic_m"] = result.lic_m;
  report.notes["lic_counts"] = "train_d=" + std::to_string(result.n_train_d) +
                               " eval_d=" + std::to_string(result.n_eval_d) +
                               " train_m=" + std::to_string(result.n_train_m) +
                               " eval_m=" + std::to_string(result.n_eval_m);
  report.notes["lic_protocol"] = "held-out stratified split, multinomial classifier";
  return finish(args.common, report);
}

struct BiasAmpArgs {
  CommonOpts common;
  std::string train_path;
  std::string pred_path;
  std::string words_path;
  std::string stoplist_path;
  std::size_t top_n = 1000;
};

int run_biasamp(const BiasAmpArgs& args) {
  MetricReport report;
  apply_common(report, args.common, "biasamp");
  GenderLexicon lex = load_lexicon(args.common, report);
  report.config["train"] = args.train_path;
  report.config["pred"] = args.pred_path;

  auto train = read_captions(tracked(report, args.train_path));
  auto preds = read_predictions(tracked(report, args.pred_path));

  std::set<std::string> words;
  if (!args.words_path.empty()) {
    words = read_word_file(tracked(report, args.words_path));
    report.config["words"] = args.words_path;
  } else {
    std::set<std::string> stoplist;
    if (!args.stoplist_path.empty()) {
      stoplist = read_word_file(tracked(report, args.stoplist_path));
      report.config["stoplist"] = args.stoplist_path;
    }
    words = derive_word_list(train, lex, args.top_n, stoplist);
    report.config["top_n"] = std::to_string(args.top_n);
    report.notes["word_list"] = "derived from training corpus (approximation of a curated list)";
  }

  CooccurrenceTable train_table = build_table(train, lex, words);
  CooccurrenceTable pred_table = build_table(predictions_as_records(preds), lex, words);
  BiasAmpResult result = bias_amp(train_table, pred_table);

  report.metrics["cooccur"]["biasamp"] = result.value;
  report.notes["biasamp_words"] =
      "effective=" + std::to_string(result.effective_word_count) +
      " skipped=" + std::to_string(result.skipped_words.size()) +
      " excluded=" + std::to_string(result.excluded_words.size());
  if (!result.excluded_words.empty()) {
    report.warnings.push_back(std::to_string(result.excluded_words.size()) +
                              " words never co-occur with a gender in training; dropped from L");
  }
  return finish(args.common, report);
}

struct ChairArgs {
  CommonOpts common;
  std::string pred_path;
  std::string refs_path;
  std::string annotations_path;
  std::string hierarchy_path;
  bool relax_sub = false;
};

int run_chair(const ChairArgs& args) {
  MetricReport report;
  apply_common(report, args.common, "chair");
  report.config["pred"] = args.pred_path;
  report.config["relax_sub"] = args.relax_sub ? "true" : "false";

  SynonymHierarchy hierarchy = load_hierarchy_opt(args.hierarchy_path, report);
  auto preds = read_predictions(tracked(report, args.pred_path));
  std::vector<CaptionRecord> refs;
  if (!args.refs_path.empty()) {
    refs = read_captions(tracked(report, args.refs_path));
    report.config["refs"] = args.refs_path;
  }
  std::vector<ObjectAnnotation> annotations;
  if (!args.annotations_path.empty()) {
    annotations = read_annotations(tracked(report, args.annotations_path));
    report.config["annotations"] = args.annotations_path;
  }

  auto gts = build_ground_truths(preds, refs, annotations, hierarchy);
  ChairResult result = chair(preds, gts, hierarchy, args.relax_sub);

  auto& metrics = report.metrics["hallucination"];
  metrics["chair_s"] = result.chair_s;
  metrics["n_objects"] = static_cast<double>(result.total_objects);
  metrics["n_objects_hallucinated"] = static_cast<double>(result.hallucinated_objects);
  metrics["n_captions"] = static_cast<double>(result.total_captions);
  metrics["n_captions_hallucinated"] = static_cast<double>(result.captions_with_hallucination);
  int exit_code = 0;
  if (result.chair_i) {
    metrics["chair_i"] = *result.chair_i;
  } else {
    report.warnings.push_back("chair_i undefined: no caption mentions any object");
    exit_code = 1;
  }
  return finish(args.common, report, exit_code);
}

struct HitRatioArgs {
  CommonOpts common;
  std::string train_path;
  std::string pred_path;
  std::string refs_path;
  std::string annotations_path;
  std::string catalog_path;
  std::string hierarchy_path;
  std::string object_anchor;
  std::string gender_anchor;
  std::size_t k = 10;
  bool count_empty_as_zero = false;
  bool relax_sub = false;
};

int run_hitratio(const HitRatioArgs& args) {
  MetricReport report;
  apply_common(report, args.common, "hitratio");
  GenderLexicon lex = load_lexicon(args.common, report);
  report.config["train"] = args.train_path;
  report.config["pred"] = args.pred_path;
  report.config["k"] = std::to_string(args.k);

  SynonymHierarchy hierarchy = load_hierarchy_opt(args.hierarchy_path, report);
  auto train = read_captions(tracked(report, args.train_path));
  auto preds = read_predictions(tracked(report, args.pred_path));
  std::vector<CaptionRecord> refs;
  if (!args.refs_path.empty()) {
    refs = read_captions(tracked(report, args.refs_path));
    report.config["refs"] = args.refs_path;
  }
  std::vector<ObjectAnnotation> annotations;
  if (!args.annotations_path.empty()) {
    annotations = read_annotations(tracked(report, args.annotations_path));
    report.config["annotations"] = args.annotations_path;
  }

  CooccurrenceTable table = build_table(train, lex, {}, &hierarchy);
  auto gts = build_ground_truths(preds, refs, annotations, hierarchy);
  ChairResult chair_result = chair(preds, gts, hierarchy, args.relax_sub);

  HitRatioResult result;
  std::vector<std::string> c_set;
  if (!args.object_anchor.empty()) {
    report.config["object"] = args.object_anchor;
    c_set = top_cooccurring(table, args.object_anchor, args.k);
    result = hit_ratio_object(chair_result.per_image, gts, args.object_anchor, c_set,
                              args.count_empty_as_zero);
    report.metrics["cooccur"]["hr_object"] = result.value;
  } else {
    report.config["gender"] = args.gender_anchor;
    GenderLabel anchor = gender_from_name(args.gender_anchor);
    GenderCatalog catalog;
    if (!args.catalog_path.empty()) {
      catalog = read_catalog(tracked(report, args.catalog_path));
      report.config["catalog"] = args.catalog_path;
    } else if (!refs.empty()) {
      catalog = catalog_from_references(refs, lex);
    } else {
      throw Error(ErrorCode::InvalidArgument,
                  "--gender needs --catalog or --refs to label images");
    }
    c_set = top_cooccurring(table, anchor, args.k);
    result = hit_ratio_gender(chair_result.per_image, catalog, anchor, c_set,
                              args.count_empty_as_zero);
    report.metrics["cooccur"]["hr_gender"] = result.value;
  }
  std::string c_joined;
  for (const auto& o : c_set) c_joined += (c_joined.empty() ? "" : ", ") + o;
  report.notes["cooccurring_set"] = c_joined;
  report.notes["hit_ratio_images"] = "scored=" + std::to_string(result.images_scored) +
                                     " excluded=" + std::to_string(result.images_excluded);
  return finish(args.common, report);
}

struct RetrievalArgs {
  CommonOpts common;
  std::string rankings_path;
  std::string catalog_path;
  std::string desired = "uniform";
  std::string per_query_path;
  std::vector<std::size_t> ks{1, 5, 10};
  double epsilon = 1e-6;
  bool no_recall = false;
};

int run_retrieval(const RetrievalArgs& args) {
  MetricReport report;
  apply_common(report, args.common, "retrieval");
  report.config["rankings"] = args.rankings_path;
  report.config["catalog"] = args.catalog_path;
  report.config["epsilon"] = std::to_string(args.epsilon);
  report.config["desired"] = args.desired;
  {
    std::string ks;
    for (std::size_t k : args.ks) ks += (ks.empty() ? "" : ",") + std::to_string(k);
    report.config["k"] = ks;
  }

  auto rankings = read_rankings(tracked(report, args.rankings_path));
  GenderCatalog catalog = read_catalog(tracked(report, args.catalog_path));

  RetrievalOptions options;
  options.ks = args.ks;
  options.epsilon = args.epsilon;
  options.with_recall = !args.no_recall;
  if (args.desired == "uniform") {
    options.desired_mode = DesiredMode::Uniform;
  } else if (args.desired == "from-candidates") {
    options.desired_mode = DesiredMode::FromCandidates;
  } else {
    options.desired_mode = DesiredMode::Explicit;
    std::ifstream in(args.desired, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open desired distribution file: " + args.desired);
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::Parse, args.desired + ": " + e.what());
    }
    options.explicit_desired.male = doc.value("male", 0.5);
    options.explicit_desired.female = doc.value("female", 0.5);
    options.explicit_desired.validate();
    report.input_digests[args.desired] = file_digest(args.desired);
  }

  RetrievalMetrics metrics = evaluate_rankings(rankings, catalog, options);
  auto& family = report.metrics["retrieval"];
  for (const auto& [name, agg] : metrics.aggregates) {
    family[name + ".mean"] = agg.mean;
    family[name + ".sigma"] = agg.sigma;
  }
  for (const auto& [name, value] : metrics.recall) family[name] = value;
  report.warnings.insert(report.warnings.end(), metrics.warnings.begin(),
                         metrics.warnings.end());
  report.notes["kl_log_base"] = "natural";
  report.notes["n_queries"] = std::to_string(rankings.size());

  if (!args.per_query_path.empty()) {
    std::ofstream out(args.per_query_path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot open per-query file: " + args.per_query_path);
    std::set<std::string> query_ids;
    for (const auto& r : rankings) query_ids.insert(r.query_id);
    for (const auto& id : query_ids) {
      ordered_json rec;
      rec["query_id"] = id;
      for (const auto& [name, values] : metrics.per_query) {
        auto it = values.find(id);
        if (it != values.end()) rec[name] = it->second;
      }
      out << rec.dump() << '\n';
    }
    report.config["per_query"] = args.per_query_path;
  }
  return finish(args.common, report);
}

struct ResolutionArgs {
  CommonOpts common;
  std::string in_path;
};

int run_resolution(const ResolutionArgs& args) {
  MetricReport report;
  apply_common(report, args.common, "resolution");
  report.config["in"] = args.in_path;
  auto instances = read_resolution(tracked(report, args.in_path));
  ResolutionMetrics metrics = resolution_metrics(instances);

  auto& family = report.metrics["resolution"];
  family["accuracy"] = metrics.accuracy;
  for (const auto& [scenario, delta] : metrics.delta_ra) {
    family[std::string("delta_ra.") + scenario_name(scenario)] = delta;
  }
  for (const auto& [scenario, names] : metrics.excluded_occupations) {
    std::string joined;
    for (const auto& n : names) joined += (joined.empty() ? "" : ", ") + n;
    report.warnings.push_back(std::string("scenario ") + scenario_name(scenario) +
                              ": occupations missing a gender excluded from delta_ra: " + joined);
  }
  report.notes["n_instances"] = std::to_string(instances.size());
  return finish(args.common, report);
}

struct VlBiasArgs {
  CommonOpts common;
  std::vector<std::string> dumps;  // "label=path" or "path"
  std::string per_target_path;
  double delta = 1e-3;
};

int run_vlbias(const VlBiasArgs& args) {
  MetricReport report;
  apply_common(report, args.common, "vlbias");
  report.config["delta"] = std::to_string(args.delta);

  std::ofstream per_target_out;
  if (!args.per_target_path.empty()) {
    per_target_out.open(args.per_target_path, std::ios::binary);
    if (!per_target_out) {
      throw Error(ErrorCode::Io, "cannot open per-target file: " + args.per_target_path);
    }
    report.config["per_target"] = args.per_target_path;
  }

  auto& family = report.metrics["vlbias"];
  for (const auto& dump : args.dumps) {
    std::string label;
    std::string path;
    if (auto eq = dump.find('='); eq != std::string::npos) {
      label = dump.substr(0, eq);
      path = dump.substr(eq + 1);
    } else {
      path = dump;
      auto slash = path.find_last_of('/');
      label = slash == std::string::npos ? path : path.substr(slash + 1);
      if (auto dot = label.find('.'); dot != std::string::npos) label.erase(dot);
    }
    auto records = read_vlbias(tracked(report, path));
    VlBiasResult result = dataset_bias(records, args.delta);
    family[label + ".dataset_bias"] = result.dataset_bias;

    std::size_t skipped = 0;
    for (const auto& [target, n] : result.skipped_pairs) skipped += n;
    report.notes["vlbias." + label] =
        "targets=" + std::to_string(result.per_target.size()) +
        " undefined=" + std::to_string(result.undefined_targets.size()) +
        " skipped_pairs=" + std::to_string(skipped) + " delta=" + std::to_string(args.delta);
    if (!result.undefined_targets.empty()) {
      std::string joined;
      for (const auto& t : result.undefined_targets) joined += (joined.empty() ? "" : ", ") + t;
      report.warnings.push_back("dump '" + label +
                                "': targets with every pair skipped: " + joined);
    }
    if (per_target_out.is_open()) {
      for (const auto& [target, value] : result.per_target) {
        ordered_json rec;
        rec["dump"] = label;
        rec["target"] = target;
        rec["bias"] = value;
        auto it = result.skipped_pairs.find(target);
        rec["skipped_pairs"] = it == result.skipped_pairs.end() ? 0 : it->second;
        per_target_out << rec.dump() << '\n';
      }
    }
  }
  return finish(args.common, report);
}

struct ReportArgs {
  CommonOpts common;
  std::string train_path;
  std::string refs_path;
  std::string pred_path;
  std::string annotations_path;
  std::string catalog_path;
  std::string words_path;
  std::string stoplist_path;
  std::string hierarchy_path;
  std::size_t top_n = 1000;
  std::size_t hr_k = 10;
  double eval_fraction = 0.2;
  double smoothing = 1.0;
  bool relax_sub = false;
  bool strict = false;
};

// Joined caption pipeline: one pass over the corpora producing the full
// caption-side row (lic, error, mention rate, biasamp, chair, hit
// ratios).
int run_report(const ReportArgs& args) {
  MetricReport report;
  apply_common(report, args.common, "report");
  GenderLexicon lex = load_lexicon(args.common, report);
  report.config["train"] = args.train_path;
  report.config["refs"] = args.refs_path;
  report.config["pred"] = args.pred_path;
  report.config["eval_fraction"] = std::to_string(args.eval_fraction);
  report.config["smoothing"] = std::to_string(args.smoothing);
  report.config["hr_k"] = std::to_string(args.hr_k);
  report.config["relax_sub"] = args.relax_sub ? "true" : "false";

  SynonymHierarchy hierarchy = load_hierarchy_opt(args.hierarchy_path, report);
  auto train = read_captions(tracked(report, args.train_path));
  auto refs = read_captions(tracked(report, args.refs_path));
  auto preds = read_predictions(tracked(report, args.pred_path));
  std::vector<ObjectAnnotation> annotations;
  if (!args.annotations_path.empty()) {
    annotations = read_annotations(tracked(report, args.annotations_path));
    report.config["annotations"] = args.annotations_path;
  }

  GenderCatalog catalog;
  if (!args.catalog_path.empty()) {
    catalog = read_catalog(tracked(report, args.catalog_path));
    report.config["catalog"] = args.catalog_path;
  } else {
    catalog = catalog_from_references(refs, lex);
  }
  JoinReport join = validate_join(preds, refs, &catalog, args.strict);
  if (!join.clean()) {
    report.warnings.push_back(
        "join: " + std::to_string(join.predictions_without_reference.size()) +
        " predictions without reference, " +
        std::to_string(join.references_without_prediction.size()) +
        " references without prediction");
  }
  {
    std::string dist;
    for (const auto& [label, count] : join.gender_distribution) {
      dist += (dist.empty() ? "" : " ") + std::string(gender_name(label)) + "=" +
              std::to_string(count);
    }
    report.notes["catalog_distribution"] = dist;
  }

  // lexicon family
  {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::vector<std::string> texts;
    for (const auto& p : preds) {
      pairs.emplace_back(p.image_id, p.caption);
      texts.push_back(p.caption);
    }
    report.metrics["lexicon"]["error"] = error_rate(pairs, catalog.labels, lex);
    report.metrics["lexicon"]["gender_mention_rate"] = gender_mention_rate(texts, lex);
  }

  // lic family
  {
    std::vector<MaskedCaption> gt_corpus;
    for (const auto& r : train) {
      for (const auto& c : r.captions) gt_corpus.push_back(mask_gender(c, lex));
    }
    std::vector<MaskedCaption> gen_corpus;
    for (const auto& p : preds) gen_corpus.push_back(mask_gender(p.caption, lex));
    LicResult lic = lic_score(gt_corpus, gen_corpus, args.common.seed, args.eval_fraction,
                              args.smoothing);
    report.metrics["lic"]["lic"] = lic.lic;
    report.metrics["lic"]["lic_d"] = lic.lic_d;
    report.metrics["lic"]["lic_m"] = lic.lic_m;
  }

  // cooccur family: biasamp over the training captions vs predictions
  std::set<std::string> words;
  if (!args.words_path.empty()) {
    words = read_word_file(tracked(report, args.words_path));
    report.config["words"] = args.words_path;
  } else {
    std::set<std::string> stoplist;
    if (!args.stoplist_path.empty()) {
      stoplist = read_word_file(tracked(report, args.stoplist_path));
      report.config["stoplist"] = args.stoplist_path;
    }
    words = derive_word_list(train, lex, args.top_n, stoplist);
    report.config["top_n"] = std::to_string(args.top_n);
  }
  CooccurrenceTable train_table = build_table(train, lex, words, &hierarchy);
  CooccurrenceTable pred_table = build_table(predictions_as_records(preds), lex, words);
  BiasAmpResult biasamp = bias_amp(train_table, pred_table);
  report.metrics["cooccur"]["biasamp"] = biasamp.value;

  // hallucination family
  auto gts = build_ground_truths(preds, refs, annotations, hierarchy);
  ChairResult chair_result = chair(preds, gts, hierarchy, args.relax_sub);
  report.metrics["hallucination"]["chair_s"] = chair_result.chair_s;
  int exit_code = 0;
  if (chair_result.chair_i) {
    report.metrics["hallucination"]["chair_i"] = *chair_result.chair_i;
  } else {
    report.warnings.push_back("chair_i undefined: no caption mentions any object");
    exit_code = 1;
  }

  // hit ratios averaged over probing anchors, per-anchor values via the
  // hitratio subcommand
  {
    std::set<std::string> anchors;
    for (const auto& [id, gt] : gts) anchors.insert(gt.begin(), gt.end());
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& anchor : anchors) {
      if (!train_table.seen_objects.count(anchor)) continue;
      auto c_set = top_cooccurring(train_table, anchor, args.hr_k);
      try {
        sum += hit_ratio_object(chair_result.per_image, gts, anchor, c_set).value;
        ++n;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::UndefinedMetric) throw;
      }
    }
    if (n > 0) {
      report.metrics["cooccur"]["hr_object"] = sum / static_cast<double>(n);
      report.notes["hr_object_anchors"] = std::to_string(n);
    } else {
      report.warnings.push_back("hr_object undefined: no probing object had a scorable image");
    }
  }
  {
    double sum = 0.0;
    std::size_t n = 0;
    for (GenderLabel a : {GenderLabel::Male, GenderLabel::Female}) {
      try {
        auto c_set = top_cooccurring(train_table, a, args.hr_k);
        sum += hit_ratio_gender(chair_result.per_image, catalog, a, c_set).value;
        ++n;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::UndefinedMetric && e.code() != ErrorCode::UnknownAnchor) {
          throw;
        }
      }
    }
    if (n > 0) {
      report.metrics["cooccur"]["hr_gender"] = sum / static_cast<double>(n);
    } else {
      report.warnings.push_back("hr_gender undefined: no gender anchor had a scorable image");
    }
  }
  return finish(args.common, report, exit_code);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gender-bias and object-hallucination metrics over caption corpora"};
  app.require_subcommand(1);
  app.set_config("--config");
  app.fallthrough(false);

  MaskArgs mask_args;
  auto* mask_cmd = app.add_subcommand("mask", "Mask gender words in captions");
  add_common(mask_cmd, mask_args.common);
  auto* mask_pred = mask_cmd->add_option("--pred", mask_args.pred_path, "Predictions JSONL");
  mask_cmd->add_option("--refs", mask_args.refs_path, "Reference captions JSONL")
      ->excludes(mask_pred);

  LabelArgs label_args;
  auto* label_cmd = app.add_subcommand("label", "Label caption or image gender");
  add_common(label_cmd, label_args.common);
  auto* label_pred = label_cmd->add_option("--pred", label_args.pred_path, "Predictions JSONL");
  label_cmd->add_option("--refs", label_args.refs_path, "Reference captions JSONL")
      ->excludes(label_pred);

  ErrorArgs error_args;
  auto* error_cmd = app.add_subcommand("error", "Gender misclassification rate");
  add_common(error_cmd, error_args.common);
  error_cmd->add_option("--pred", error_args.pred_path, "Predictions JSONL")->required();
  error_cmd->add_option("--refs", error_args.refs_path, "Reference captions JSONL");
  error_cmd->add_option("--catalog", error_args.catalog_path, "Gender catalog JSONL");
  error_cmd->add_flag("--strict", error_args.strict, "Fail on any join mismatch");

  LicArgs lic_args;
  auto* lic_cmd = app.add_subcommand("lic", "Leakage comparison of gender classifiers");
  add_common(lic_cmd, lic_args.common);
  lic_cmd->add_option("--gt", lic_args.gt_path, "Ground-truth captions JSONL")->required();
  lic_cmd->add_option("--pred", lic_args.pred_path, "Predictions JSONL")->required();
  lic_cmd->add_option("--eval-fraction", lic_args.eval_fraction, "Held-out fraction per corpus");
  lic_cmd->add_option("--smoothing", lic_args.smoothing, "Additive smoothing constant");

  BiasAmpArgs biasamp_args;
  auto* biasamp_cmd = app.add_subcommand("biasamp", "Gender-word co-occurrence amplification");
  add_common(biasamp_cmd, biasamp_args.common);
  biasamp_cmd->add_option("--train", biasamp_args.train_path, "Training captions JSONL")
      ->required();
  biasamp_cmd->add_option("--pred", biasamp_args.pred_path, "Predictions JSONL")->required();
  biasamp_cmd->add_option("--words", biasamp_args.words_path,
                          "Evaluation word list (one token per line)");
  biasamp_cmd->add_option("--stoplist", biasamp_args.stoplist_path,
                          "Stoplist for derived word lists");
  biasamp_cmd->add_option("--top-n", biasamp_args.top_n, "Size of the derived word list");

  ChairArgs chair_args;
  auto* chair_cmd = app.add_subcommand("chair", "Object hallucination rates");
  add_common(chair_cmd, chair_args.common);
  chair_cmd->add_option("--pred", chair_args.pred_path, "Predictions JSONL")->required();
  chair_cmd->add_option("--refs", chair_args.refs_path, "Reference captions JSONL");
  chair_cmd->add_option("--annotations", chair_args.annotations_path,
                        "Object annotations JSONL");
  chair_cmd->add_option("--hierarchy", chair_args.hierarchy_path,
                        "Synonym hierarchy JSON; default: bundled MSCOCO map");
  chair_cmd->add_flag("--relax-sub", chair_args.relax_sub,
                      "Accept sub-category predictions over super-category ground truth");

  HitRatioArgs hitratio_args;
  auto* hitratio_cmd = app.add_subcommand("hitratio", "Co-occurrence hit ratio of hallucinations");
  add_common(hitratio_cmd, hitratio_args.common);
  hitratio_cmd->add_option("--train", hitratio_args.train_path, "Training captions JSONL")
      ->required();
  hitratio_cmd->add_option("--pred", hitratio_args.pred_path, "Predictions JSONL")->required();
  hitratio_cmd->add_option("--refs", hitratio_args.refs_path, "Reference captions JSONL");
  hitratio_cmd->add_option("--annotations", hitratio_args.annotations_path,
                           "Object annotations JSONL");
  hitratio_cmd->add_option("--catalog", hitratio_args.catalog_path, "Gender catalog JSONL");
  hitratio_cmd->add_option("--hierarchy", hitratio_args.hierarchy_path, "Synonym hierarchy JSON");
  auto* anchor_obj =
      hitratio_cmd->add_option("--object", hitratio_args.object_anchor, "Probing object anchor");
  hitratio_cmd->add_option("--gender", hitratio_args.gender_anchor, "Probing gender anchor")
      ->check(CLI::IsMember({"male", "female"}))
      ->excludes(anchor_obj);
  hitratio_cmd->add_option("--k", hitratio_args.k, "Size of the co-occurring set");
  hitratio_cmd->add_flag("--count-empty-as-zero", hitratio_args.count_empty_as_zero,
                         "Score non-hallucinating images as 0 instead of excluding them");
  hitratio_cmd->add_flag("--relax-sub", hitratio_args.relax_sub,
                         "Accept sub-category predictions over super-category ground truth");

  RetrievalArgs retrieval_args;
  auto* retrieval_cmd = app.add_subcommand("retrieval", "Ranking bias and recall metrics");
  add_common(retrieval_cmd, retrieval_args.common);
  retrieval_cmd->add_option("--rankings", retrieval_args.rankings_path, "Rankings JSONL")
      ->required();
  retrieval_cmd->add_option("--catalog", retrieval_args.catalog_path, "Gender catalog JSONL")
      ->required();
  retrieval_cmd->add_option("--k", retrieval_args.ks, "Prefix depths (repeat or comma-list)")
      ->delimiter(',');
  retrieval_cmd->add_option("--epsilon", retrieval_args.epsilon,
                            "Additive smoothing for prefix distributions");
  retrieval_cmd->add_option("--desired", retrieval_args.desired,
                            "uniform | from-candidates | path to {\"male\":..,\"female\":..}");
  retrieval_cmd->add_option("--per-query", retrieval_args.per_query_path,
                            "Write per-query metrics JSONL here");
  retrieval_cmd->add_flag("--no-recall", retrieval_args.no_recall, "Skip recall computation");

  ResolutionArgs resolution_args;
  auto* resolution_cmd = app.add_subcommand("resolution", "Pronoun resolution accuracy gap");
  add_common(resolution_cmd, resolution_args.common);
  resolution_cmd->add_option("--in", resolution_args.in_path, "Resolution instances JSONL")
      ->required();

  VlBiasArgs vlbias_args;
  auto* vlbias_cmd = app.add_subcommand("vlbias", "Counterfactual vision-language bias");
  add_common(vlbias_cmd, vlbias_args.common);
  vlbias_cmd->add_option("--dump", vlbias_args.dumps, "Probability dump JSONL, label=path form")
      ->required();
  vlbias_cmd->add_option("--delta", vlbias_args.delta, "Denominator guard threshold");
  vlbias_cmd->add_option("--per-target", vlbias_args.per_target_path,
                         "Write per-target bias JSONL here");

  ReportArgs report_args;
  auto* report_cmd = app.add_subcommand("report", "Joined caption-metrics pipeline");
  add_common(report_cmd, report_args.common);
  report_cmd->add_option("--train", report_args.train_path, "Training captions JSONL")
      ->required();
  report_cmd->add_option("--refs", report_args.refs_path, "Reference captions JSONL")
      ->required();
  report_cmd->add_option("--pred", report_args.pred_path, "Predictions JSONL")->required();
  report_cmd->add_option("--annotations", report_args.annotations_path,
                         "Object annotations JSONL");
  report_cmd->add_option("--catalog", report_args.catalog_path, "Gender catalog JSONL");
  report_cmd->add_option("--words", report_args.words_path, "Evaluation word list");
  report_cmd->add_option("--stoplist", report_args.stoplist_path, "Stoplist for derived lists");
  report_cmd->add_option("--hierarchy", report_args.hierarchy_path, "Synonym hierarchy JSON");
  report_cmd->add_option("--top-n", report_args.top_n, "Size of the derived word list");
  report_cmd->add_option("--hr-k", report_args.hr_k, "Hit ratio co-occurring set size");
  report_cmd->add_option("--eval-fraction", report_args.eval_fraction,
                         "Held-out fraction for lic");
  report_cmd->add_option("--smoothing", report_args.smoothing, "Additive smoothing for lic");
  report_cmd->add_flag("--relax-sub", report_args.relax_sub,
                       "Accept sub-category predictions over super-category ground truth");
  report_cmd->add_flag("--strict", report_args.strict, "Fail on any join mismatch");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (mask_cmd->parsed()) {
      if (mask_args.pred_path.empty() == mask_args.refs_path.empty()) {
        throw Error(ErrorCode::InvalidArgument, "mask needs exactly one of --pred or --refs");
      }
      return run_mask(mask_args);
    }
    if (label_cmd->parsed()) {
      if (label_args.pred_path.empty() == label_args.refs_path.empty()) {
        throw Error(ErrorCode::InvalidArgument, "label needs exactly one of --pred or --refs");
      }
      return run_label(label_args);
    }
    if (error_cmd->parsed()) {
      if (error_args.refs_path.empty() && error_args.catalog_path.empty()) {
        throw Error(ErrorCode::InvalidArgument, "error needs --catalog or --refs");
      }
      return run_error(error_args);
    }
    if (lic_cmd->parsed()) return run_lic(lic_args);
    if (biasamp_cmd->parsed()) return run_biasamp(biasamp_args);
    if (chair_cmd->parsed()) {
      if (chair_args.refs_path.empty() && chair_args.annotations_path.empty()) {
        throw Error(ErrorCode::InvalidArgument, "chair needs --refs and/or --annotations");
      }
      return run_chair(chair_args);
    }
    if (hitratio_cmd->parsed()) {
      if (hitratio_args.object_anchor.empty() == hitratio_args.gender_anchor.empty()) {
        throw Error(ErrorCode::InvalidArgument,
                    "hitratio needs exactly one of --object or --gender");
      }
      if (hitratio_args.refs_path.empty() && hitratio_args.annotations_path.empty()) {
        throw Error(ErrorCode::InvalidArgument, "hitratio needs --refs and/or --annotations");
      }
      return run_hitratio(hitratio_args);
    }
    if (retrieval_cmd->parsed()) return run_retrieval(retrieval_args);
    if (resolution_cmd->parsed()) return run_resolution(resolution_args);
    if (vlbias_cmd->parsed()) return run_vlbias(vlbias_args);
    if (report_cmd->parsed()) return run_report(report_args);
  } catch (const Error& e) {
    std::cerr << "fairlens: " << error_code_name(e.code()) << ": " << e.what() << "\n";
    return e.exit_class();
  } catch (const std::exception& e) {
    std::cerr << "fairlens: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
