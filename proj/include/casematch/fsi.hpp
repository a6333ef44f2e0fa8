#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "casematch/corpus.hpp"
#include "casematch/encoder.hpp"
#include "casematch/learning.hpp"

namespace casematch {

struct FeatureSelection {
  std::string case_id;
  std::vector<int> indices;           // ascending
  std::vector<double> probabilities;  // one per sentence of the case
  bool fallback_used = false;
};

// Pure selection rule over per-sentence scores: indices strictly above the
// threshold, else the top fallback_k by score with ties to the lower index.
FeatureSelection select_from_scores(std::string case_id,
                                    std::vector<double> scores,
                                    double threshold, int fallback_k);

// Feature sentence identification: binary per-sentence classification.
class FsiModel {
 public:
  explicit FsiModel(const Encoder* encoder) : encoder_(encoder) {}

  void set_head(ClassifierHead head);
  bool has_head() const { return head_.has_value(); }
  const ClassifierHead& head() const;

  // Positive-class probability for one sentence.
  double score_sentence(const Sentence& sentence) const;

  // Indices strictly above threshold; when none clear it, the top
  // fallback_k sentences by score (ties to the lower index).
  FeatureSelection select_features(const Case& c, double threshold = 0.5,
                                   int fallback_k = 3) const;

 private:
  const Encoder* encoder_;
  std::optional<ClassifierHead> head_;
};

ClassifierHead train_fsi(const std::vector<FsiExample>& dataset,
                         const Encoder& encoder, const TrainingConfig& config,
                         const FgmConfig& fgm);

// Selection carrying a gold feature set; used when training downstream
// modules on annotated data.
FeatureSelection selection_from_gold(const Case& c, const std::set<int>& gold);

}  // namespace casematch
