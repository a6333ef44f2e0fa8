#include "casematch/fsi.hpp"

#include <algorithm>

#include "casematch/errors.hpp"

namespace casematch {

void FsiModel::set_head(ClassifierHead head) {
  check_head_shape(head, 2, encoder_->config().dim, "fsi");
  head_ = std::move(head);
}

const ClassifierHead& FsiModel::head() const {
  if (!head_) throw Error(ErrorKind::kState, "fsi head is not trained");
  return *head_;
}

double FsiModel::score_sentence(const Sentence& sentence) const {
  if (!head_) throw Error(ErrorKind::kState, "fsi head is not trained");
  EmbeddingVector h =
      encoder_->encode(sentence.text, encoder_->config().max_len_sentence);
  return head_forward(*head_, h)[1];
}

FeatureSelection select_from_scores(std::string case_id,
                                    std::vector<double> scores,
                                    double threshold, int fallback_k) {
  FeatureSelection selection;
  selection.case_id = std::move(case_id);
  selection.probabilities = std::move(scores);
  for (size_t i = 0; i < selection.probabilities.size(); ++i) {
    if (selection.probabilities[i] > threshold) {
      selection.indices.push_back(static_cast<int>(i));
    }
  }
  if (selection.indices.empty() && !selection.probabilities.empty()) {
    selection.fallback_used = true;
    int n = static_cast<int>(selection.probabilities.size());
    std::vector<int> order(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
    // Highest score first; equal scores keep the lower index first.
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return selection.probabilities[static_cast<size_t>(a)] >
             selection.probabilities[static_cast<size_t>(b)];
    });
    order.resize(static_cast<size_t>(std::min(fallback_k, n)));
    std::sort(order.begin(), order.end());
    selection.indices = std::move(order);
  }
  return selection;
}

FeatureSelection FsiModel::select_features(const Case& c, double threshold,
                                           int fallback_k) const {
  std::vector<double> scores;
  scores.reserve(c.sentences.size());
  for (const auto& sentence : c.sentences) {
    scores.push_back(score_sentence(sentence));
  }
  return select_from_scores(c.case_id, std::move(scores), threshold,
                            fallback_k);
}

ClassifierHead train_fsi(const std::vector<FsiExample>& dataset,
                         const Encoder& encoder, const TrainingConfig& config,
                         const FgmConfig& fgm) {
  if (dataset.empty()) {
    throw Error(ErrorKind::kConfig, "fsi training set is empty");
  }
  bool has_positive = false, has_negative = false;
  for (const auto& ex : dataset) {
    (ex.label == 1 ? has_positive : has_negative) = true;
  }
  if (!has_positive || !has_negative) {
    throw Error(ErrorKind::kConfig,
                "fsi training set must contain both classes");
  }
  std::vector<TrainingExample> examples;
  examples.reserve(dataset.size());
  int max_len = encoder.config().max_len_sentence;
  for (const auto& ex : dataset) {
    examples.push_back(
        TrainingExample{encoder.encode(ex.sentence.text, max_len), ex.label});
  }
  return train_head(examples, 2, config, fgm);
}

FeatureSelection selection_from_gold(const Case& c,
                                     const std::set<int>& gold) {
  FeatureSelection selection;
  selection.case_id = c.case_id;
  selection.probabilities.assign(c.sentences.size(), 0.0);
  for (int idx : gold) {
    selection.indices.push_back(idx);
    selection.probabilities[static_cast<size_t>(idx)] = 1.0;
  }
  std::sort(selection.indices.begin(), selection.indices.end());
  return selection;
}

}  // namespace casematch
