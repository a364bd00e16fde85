#include "fairlens/lic.hpp"

#include <algorithm>
#include <cmath>

#include "fairlens/rng.hpp"

namespace fairlens {

namespace {

std::size_t class_index(GenderLabel g) { return g == GenderLabel::Male ? 0 : 1; }

std::uint64_t corpus_digest(const std::vector<MaskedCaption>& corpus) {
  std::uint64_t h = fnv1a("masked-corpus");
  for (const auto& caption : corpus) {
    for (const auto& tok : caption.tokens) {
      h = fnv1a(tok, h);
      h = fnv1a("\x1f", h);
    }
    h = fnv1a(gender_name(caption.source_gender), h);
    h = fnv1a("\x1e", h);
  }
  return h;
}

// Seeded selection of n indices out of `pool`, returned in ascending
// order so downstream counting stays input-ordered.
std::vector<std::size_t> sample_indices(std::vector<std::size_t> pool, std::size_t n, Rng rng) {
  rng.shuffle(pool);
  pool.resize(n);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

ClassifierModel train_classifier(const std::vector<MaskedCaption>& masked,
                                 std::uint64_t seed, double smoothing) {
  if (smoothing <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "smoothing must be positive");
  }
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < masked.size(); ++i) {
    if (masked[i].source_gender == GenderLabel::Neutral) {
      throw Error(ErrorCode::InvalidArgument,
                  "training caption " + std::to_string(i) + " has a neutral gender label");
    }
    by_class[class_index(masked[i].source_gender)].push_back(i);
  }
  if (by_class[0].empty() || by_class[1].empty()) {
    throw Error(ErrorCode::DegenerateTraining,
                "training requires both male and female captions");
  }

  const std::size_t per_class = std::min(by_class[0].size(), by_class[1].size());
  std::array<std::vector<std::size_t>, 2> kept;
  for (std::size_t c : {std::size_t{0}, std::size_t{1}}) {
    if (by_class[c].size() == per_class) {
      kept[c] = by_class[c];
    } else {
      kept[c] = sample_indices(by_class[c], per_class,
                               Rng::stream(seed, c == 0 ? "downsample.male"
                                                        : "downsample.female"));
    }
  }

  ClassifierModel model;
  model.smoothing = smoothing;
  model.balanced_counts = {per_class, per_class};

  // vocabulary in first-appearance order over the kept captions
  std::array<std::vector<std::int64_t>, 2> counts;
  std::array<std::int64_t, 2> totals{0, 0};
  std::array<std::size_t, 2> cursor{0, 0};
  for (std::size_t i = 0; i < masked.size(); ++i) {
    std::size_t c = class_index(masked[i].source_gender);
    if (cursor[c] >= kept[c].size() || kept[c][cursor[c]] != i) continue;
    ++cursor[c];
    for (const auto& tok : masked[i].tokens) {
      auto [it, inserted] = model.vocabulary.emplace(tok, model.vocabulary.size());
      if (inserted) {
        counts[0].push_back(0);
        counts[1].push_back(0);
      }
      ++counts[c][it->second];
      ++totals[c];
    }
  }

  const double vocab_size = static_cast<double>(model.vocabulary.size());
  for (std::size_t c : {std::size_t{0}, std::size_t{1}}) {
    model.class_log_priors[c] = std::log(0.5);  // balanced by construction
    auto& ll = model.token_log_likelihoods[c];
    ll.resize(counts[c].size());
    const double denom = static_cast<double>(totals[c]) + smoothing * vocab_size;
    for (std::size_t t = 0; t < counts[c].size(); ++t) {
      ll[t] = std::log((static_cast<double>(counts[c][t]) + smoothing) / denom);
    }
  }
  return model;
}

Classification classify(const ClassifierModel& model, const MaskedCaption& caption) {
  std::array<double, 2> log_score = model.class_log_priors;
  for (const auto& tok : caption.tokens) {
    auto it = model.vocabulary.find(tok);
    if (it == model.vocabulary.end()) continue;  // unknown tokens carry no evidence
    log_score[0] += model.token_log_likelihoods[0][it->second];
    log_score[1] += model.token_log_likelihoods[1][it->second];
  }
  Classification result;
  // posterior via the two-class logistic form; ties go to female
  if (log_score[0] > log_score[1]) {
    result.label = GenderLabel::Male;
    result.confidence = 1.0 / (1.0 + std::exp(log_score[1] - log_score[0]));
  } else {
    result.label = GenderLabel::Female;
    result.confidence = 1.0 / (1.0 + std::exp(log_score[0] - log_score[1]));
  }
  return result;
}

namespace {

struct CorpusEval {
  double score = 0.0;  // mean of confidence * correct over the eval split
  std::size_t n_train = 0;
  std::size_t n_eval = 0;
};

CorpusEval evaluate_corpus(const std::vector<MaskedCaption>& corpus, std::uint64_t seed,
                           double eval_fraction, double smoothing, const char* side) {
  std::vector<MaskedCaption> gendered;
  for (const auto& caption : corpus) {
    if (caption.source_gender != GenderLabel::Neutral) gendered.push_back(caption);
  }
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < gendered.size(); ++i) {
    by_class[class_index(gendered[i].source_gender)].push_back(i);
  }
  if (by_class[0].size() < 2 || by_class[1].size() < 2) {
    throw Error(ErrorCode::CorpusTooSmall,
                std::string(side) + " corpus needs at least 2 gendered captions per class, got " +
                    std::to_string(by_class[0].size()) + " male / " +
                    std::to_string(by_class[1].size()) + " female");
  }

  // The split stream depends on the corpus content, not on which argument
  // slot the corpus occupies, so lic(A,B) == -lic(B,A) holds exactly.
  const std::uint64_t corpus_seed = mix_seed(seed, corpus_digest(gendered));

  std::vector<bool> in_eval(gendered.size(), false);
  for (std::size_t c : {std::size_t{0}, std::size_t{1}}) {
    const std::size_t n = by_class[c].size();
    auto n_eval = static_cast<std::size_t>(std::llround(eval_fraction * static_cast<double>(n)));
    n_eval = std::clamp<std::size_t>(n_eval, 1, n - 1);
    for (std::size_t idx : sample_indices(by_class[c], n_eval,
                                          Rng::stream(corpus_seed,
                                                      c == 0 ? "split.male" : "split.female"))) {
      in_eval[idx] = true;
    }
  }

  std::vector<MaskedCaption> train_split;
  std::vector<const MaskedCaption*> eval_split;
  for (std::size_t i = 0; i < gendered.size(); ++i) {
    if (in_eval[i]) {
      eval_split.push_back(&gendered[i]);
    } else {
      train_split.push_back(gendered[i]);
    }
  }

  ClassifierModel model =
      train_classifier(train_split, mix_seed(corpus_seed, fnv1a("train")), smoothing);

  double sum = 0.0;
  for (const auto* caption : eval_split) {
    Classification c = classify(model, *caption);
    if (c.label == caption->source_gender) sum += c.confidence;
  }
  CorpusEval eval;
  eval.score = sum / static_cast<double>(eval_split.size());
  eval.n_train = train_split.size();
  eval.n_eval = eval_split.size();
  return eval;
}

}  // namespace

LicResult lic_score(const std::vector<MaskedCaption>& ground_truth,
                    const std::vector<MaskedCaption>& generated, std::uint64_t seed,
                    double eval_fraction, double smoothing) {
  if (eval_fraction <= 0.0 || eval_fraction >= 1.0) {
    throw Error(ErrorCode::InvalidArgument, "eval fraction must lie in (0,1)");
  }
  CorpusEval d = evaluate_corpus(ground_truth, seed, eval_fraction, smoothing, "ground-truth");
  CorpusEval m = evaluate_corpus(generated, seed, eval_fraction, smoothing, "generated");

  LicResult result;
  result.lic_d = d.score;
  result.lic_m = m.score;
  result.lic = m.score - d.score;
  result.n_train_d = d.n_train;
  result.n_train_m = m.n_train;
  result.n_eval_d = d.n_eval;
  result.n_eval_m = m.n_eval;
  result.seed = seed;
  result.eval_fraction = eval_fraction;
  return result;
}

}  // namespace fairlens
