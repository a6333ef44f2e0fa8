#include "casematch/aligner.hpp"

#include <cmath>

#include "casematch/errors.hpp"

namespace casematch {

namespace {

void require_pair_mode(MatchMode mode) {
  if (mode == MatchMode::kMatching) {
    throw Error(ErrorKind::kConfig,
                "alignment supports concat and siamese modes only");
  }
}

// Sentence-pair feature vector under max_len_sentence.
EmbeddingVector alignment_features(const Encoder& encoder,
                                   const Sentence& sentence_a,
                                   const Sentence& sentence_b,
                                   MatchMode mode) {
  int max_len = encoder.config().max_len_sentence;
  if (mode == MatchMode::kConcat) {
    return encoder.encode_joint(sentence_a.text, sentence_b.text, max_len);
  }
  return combine_siamese(encoder.encode(sentence_a.text, max_len),
                         encoder.encode(sentence_b.text, max_len));
}

}  // namespace

AlignerModel::AlignerModel(const Encoder* encoder, MatchMode mode)
    : encoder_(encoder), mode_(mode) {
  require_pair_mode(mode);
}

void AlignerModel::set_head(ClassifierHead head) {
  check_head_shape(head, 2, match_feature_dim(encoder_->config(), mode_),
                   "aligner");
  head_ = std::move(head);
}

const ClassifierHead& AlignerModel::head() const {
  if (!head_) throw Error(ErrorKind::kState, "aligner head is not trained");
  return *head_;
}

double AlignerModel::score_alignment(const Sentence& sentence_a,
                                     const Sentence& sentence_b) const {
  if (!head_) throw Error(ErrorKind::kState, "aligner head is not trained");
  EmbeddingVector features =
      alignment_features(*encoder_, sentence_a, sentence_b, mode_);
  return head_forward(*head_, features)[1];
}

std::set<IndexPair> filter_alignment(
    const std::vector<std::vector<double>>& scores,
    const FeatureSelection& selection_a, const FeatureSelection& selection_b,
    double threshold) {
  std::set<IndexPair> aligned;
  for (size_t i = 0; i < scores.size(); ++i) {
    for (size_t j = 0; j < scores[i].size(); ++j) {
      if (scores[i][j] > threshold) {
        aligned.emplace(selection_a.indices[i], selection_b.indices[j]);
      }
    }
  }
  return aligned;
}

AlignmentResult AlignerModel::align(const FeatureSelection& selection_a,
                                    const FeatureSelection& selection_b,
                                    const Case& case_a, const Case& case_b,
                                    double threshold) const {
  AlignmentResult result;
  result.scores.resize(selection_a.indices.size());
  for (size_t i = 0; i < selection_a.indices.size(); ++i) {
    int idx_a = selection_a.indices[i];
    const Sentence& sa = case_a.sentences[static_cast<size_t>(idx_a)];
    result.scores[i].resize(selection_b.indices.size());
    for (size_t j = 0; j < selection_b.indices.size(); ++j) {
      int idx_b = selection_b.indices[j];
      const Sentence& sb = case_b.sentences[static_cast<size_t>(idx_b)];
      result.scores[i][j] = score_alignment(sa, sb);
    }
  }
  result.aligned =
      filter_alignment(result.scores, selection_a, selection_b, threshold);
  return result;
}

ClassifierHead train_aligner(const std::vector<AlignExample>& dataset,
                             const Encoder& encoder, MatchMode mode,
                             const TrainingConfig& config,
                             const FgmConfig& fgm) {
  require_pair_mode(mode);
  if (dataset.empty()) {
    throw Error(ErrorKind::kConfig, "alignment training set is empty");
  }
  bool has_positive = false, has_negative = false;
  for (const auto& ex : dataset) {
    (ex.label == 1 ? has_positive : has_negative) = true;
  }
  if (!has_positive || !has_negative) {
    throw Error(ErrorKind::kConfig,
                "alignment training set must contain both classes");
  }
  std::vector<TrainingExample> examples;
  examples.reserve(dataset.size());
  for (const auto& ex : dataset) {
    examples.push_back(TrainingExample{
        alignment_features(encoder, ex.sentence_a, ex.sentence_b, mode),
        ex.label});
  }
  TrainingConfig effective = config;
  if (effective.class_weights.empty()) {
    effective.class_weights = {kAlignNegativeWeight, kAlignPositiveWeight};
  }
  return train_head(examples, 2, effective, fgm);
}

}  // namespace casematch
