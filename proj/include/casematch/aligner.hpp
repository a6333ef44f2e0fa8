#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "casematch/corpus.hpp"
#include "casematch/encoder.hpp"
#include "casematch/fsi.hpp"
#include "casematch/learning.hpp"
#include "casematch/matcher.hpp"

namespace casematch {

struct AlignmentResult {
  std::string pair_id;
  // Pairs of original case sentence indices whose score clears the
  // threshold strictly.
  std::set<IndexPair> aligned;
  // Full m x l score matrix in selection-local positions.
  std::vector<std::vector<double>> scores;
};

// Strict-threshold filter of a score matrix, mapped back to original case
// sentence indices through the two selections.
std::set<IndexPair> filter_alignment(
    const std::vector<std::vector<double>>& scores,
    const FeatureSelection& selection_a, const FeatureSelection& selection_b,
    double threshold);

// Scores every cross pair of selected feature sentences; alignment supports
// the concat and siamese modes only.
class AlignerModel {
 public:
  AlignerModel(const Encoder* encoder, MatchMode mode);

  void set_head(ClassifierHead head);
  bool has_head() const { return head_.has_value(); }
  const ClassifierHead& head() const;
  MatchMode mode() const { return mode_; }

  double score_alignment(const Sentence& sentence_a,
                         const Sentence& sentence_b) const;

  AlignmentResult align(const FeatureSelection& selection_a,
                        const FeatureSelection& selection_b,
                        const Case& case_a, const Case& case_b,
                        double threshold = 0.5) const;

 private:
  const Encoder* encoder_;
  MatchMode mode_;
  std::optional<ClassifierHead> head_;
};

// Binary alignment head; class weights default to 0.1 for the negative
// class and 1.0 for the positive class when the config leaves them empty.
ClassifierHead train_aligner(const std::vector<AlignExample>& dataset,
                             const Encoder& encoder, MatchMode mode,
                             const TrainingConfig& config,
                             const FgmConfig& fgm);

inline constexpr double kAlignNegativeWeight = 0.1;
inline constexpr double kAlignPositiveWeight = 1.0;

}  // namespace casematch
