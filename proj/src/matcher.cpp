#include "casematch/matcher.hpp"

#include <algorithm>
#include <cmath>

#include "casematch/errors.hpp"
#include "casematch/text.hpp"

namespace casematch {

const char* match_mode_name(MatchMode mode) {
  switch (mode) {
    case MatchMode::kConcat: return "concat";
    case MatchMode::kSiamese: return "siamese";
    case MatchMode::kMatching: return "matching";
  }
  return "unknown";
}

MatchMode match_mode_from_name(const std::string& name) {
  if (name == "concat") return MatchMode::kConcat;
  if (name == "siamese") return MatchMode::kSiamese;
  if (name == "matching") return MatchMode::kMatching;
  throw Error(ErrorKind::kConfig, "unknown match mode: " + name);
}

const char* input_source_name(InputSource source) {
  return source == InputSource::kFullText ? "full_text" : "feature_sentences";
}

InputSource input_source_from_name(const std::string& name) {
  if (name == "full_text") return InputSource::kFullText;
  if (name == "feature_sentences") return InputSource::kFeatureSentences;
  throw Error(ErrorKind::kConfig, "unknown input source: " + name);
}

std::string compose_case_text(const Case& c, const FeatureSelection& selection,
                              InputSource source) {
  std::string text;
  auto append_sentence = [&](const Sentence& s) {
    text.append(s.text);
    if (!has_terminal_punctuation(s.text)) {
      text.append("。");  // 。
    }
  };
  if (source == InputSource::kFullText) {
    for (const auto& s : c.sentences) append_sentence(s);
    return text;
  }
  for (int idx : selection.indices) {
    if (idx < 0 || idx >= static_cast<int>(c.sentences.size())) {
      throw Error(ErrorKind::kContract,
                  "selection index " + std::to_string(idx) +
                      " out of range for case " + c.case_id);
    }
    append_sentence(c.sentences[static_cast<size_t>(idx)]);
  }
  return text;
}

EmbeddingVector combine_siamese(const EmbeddingVector& h_a,
                                const EmbeddingVector& h_b) {
  EmbeddingVector out;
  out.reserve(3 * h_a.size());
  out.insert(out.end(), h_a.begin(), h_a.end());
  out.insert(out.end(), h_b.begin(), h_b.end());
  for (size_t i = 0; i < h_a.size(); ++i) {
    out.push_back(std::fabs(h_a[i] - h_b[i]));
  }
  return out;
}

EmbeddingVector match_features(const Encoder& encoder, std::string_view text_a,
                               std::string_view text_b, MatchMode mode) {
  int max_len = encoder.config().max_len_case;
  switch (mode) {
    case MatchMode::kConcat:
      return encoder.encode_joint(text_a, text_b, max_len);
    case MatchMode::kSiamese:
      return combine_siamese(encoder.encode(text_a, max_len),
                             encoder.encode(text_b, max_len));
    case MatchMode::kMatching: {
      EmbeddingVector h_a = encoder.encode(text_a, max_len);
      EmbeddingVector h_b = encoder.encode(text_b, max_len);
      for (size_t i = 0; i < h_a.size(); ++i) h_a[i] += h_b[i];
      return h_a;
    }
  }
  throw Error(ErrorKind::kContract, "unhandled match mode");
}

int match_feature_dim(const EncoderConfig& config, MatchMode mode) {
  return mode == MatchMode::kSiamese ? 3 * config.dim : config.dim;
}

void MatcherModel::set_head(ClassifierHead head) {
  check_head_shape(head, 3, match_feature_dim(encoder_->config(), mode_),
                   "matcher");
  head_ = std::move(head);
}

const ClassifierHead& MatcherModel::head() const {
  if (!head_) throw Error(ErrorKind::kState, "matcher head is not trained");
  return *head_;
}

MatchPrediction MatcherModel::predict(const Case& case_a, const Case& case_b,
                                      const FeatureSelection& selection_a,
                                      const FeatureSelection& selection_b,
                                      InputSource source) const {
  if (!head_) throw Error(ErrorKind::kState, "matcher head is not trained");
  std::string text_a = compose_case_text(case_a, selection_a, source);
  std::string text_b = compose_case_text(case_b, selection_b, source);
  EmbeddingVector features = match_features(*encoder_, text_a, text_b, mode_);
  std::vector<double> probs = head_forward(*head_, features);
  MatchPrediction prediction;
  // Argmax with ties resolved to the lower class index.
  int best = 0;
  for (int c = 1; c < 3; ++c) {
    if (probs[static_cast<size_t>(c)] > probs[static_cast<size_t>(best)]) {
      best = c;
    }
  }
  prediction.label = static_cast<MatchLabel>(best);
  for (int c = 0; c < 3; ++c) {
    prediction.probabilities[static_cast<size_t>(c)] =
        probs[static_cast<size_t>(c)];
  }
  return prediction;
}

ClassifierHead train_matcher(
    const std::vector<CasePair>& pairs,
    const std::unordered_map<std::string, FeatureSelection>& selections,
    const Encoder& encoder, MatchMode mode, InputSource source,
    const TrainingConfig& config, const FgmConfig& fgm) {
  if (pairs.empty()) {
    throw Error(ErrorKind::kConfig, "matcher training set is empty");
  }
  std::array<bool, 3> present{false, false, false};
  for (const auto& pair : pairs) {
    present[static_cast<size_t>(pair.match_label)] = true;
  }
  if (!(present[0] && present[1] && present[2])) {
    throw Error(ErrorKind::kConfig,
                "matcher training data must contain all three labels");
  }

  auto selection_for = [&](const Case& c) -> const FeatureSelection& {
    static const FeatureSelection kEmpty{};
    if (source == InputSource::kFullText) return kEmpty;
    auto it = selections.find(c.case_id);
    if (it == selections.end()) {
      throw Error(ErrorKind::kContract,
                  "no feature selection for case " + c.case_id);
    }
    return it->second;
  };

  std::vector<TrainingExample> examples;
  examples.reserve(pairs.size());
  for (const auto& pair : pairs) {
    std::string text_a =
        compose_case_text(pair.case_a, selection_for(pair.case_a), source);
    std::string text_b =
        compose_case_text(pair.case_b, selection_for(pair.case_b), source);
    examples.push_back(
        TrainingExample{match_features(encoder, text_a, text_b, mode),
                        static_cast<int>(pair.match_label)});
  }
  return train_head(examples, 3, config, fgm);
}

}  // namespace casematch
