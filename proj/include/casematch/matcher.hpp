#pragma once

#include <array>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "casematch/corpus.hpp"
#include "casematch/encoder.hpp"
#include "casematch/fsi.hpp"
#include "casematch/learning.hpp"

namespace casematch {

enum class MatchMode {
  kConcat,    // joint separator-delimited encoding of both texts
  kSiamese,   // [h_a ; h_b ; |h_a - h_b|] over independent encodings
  kMatching,  // h_a + h_b, no extra feature extraction
};

enum class InputSource {
  kFullText,
  kFeatureSentences,
};

const char* match_mode_name(MatchMode mode);
MatchMode match_mode_from_name(const std::string& name);
const char* input_source_name(InputSource source);
InputSource input_source_from_name(const std::string& name);

struct MatchPrediction {
  MatchLabel label = MatchLabel::kNotMatch;
  std::array<double, 3> probabilities{};
};

// Joins the case's sentences (all of them, or the selected ones in ascending
// index order). A sentence without terminal punctuation gets a trailing 。
std::string compose_case_text(const Case& c, const FeatureSelection& selection,
                              InputSource source);

// [h_a ; h_b ; |h_a - h_b|]
EmbeddingVector combine_siamese(const EmbeddingVector& h_a,
                                const EmbeddingVector& h_b);

// Head-input feature vector for a text pair under the given mode.
EmbeddingVector match_features(const Encoder& encoder, std::string_view text_a,
                               std::string_view text_b, MatchMode mode);

// Head input dimension implied by mode: 3*dim for siamese, dim otherwise.
int match_feature_dim(const EncoderConfig& config, MatchMode mode);

class MatcherModel {
 public:
  MatcherModel(const Encoder* encoder, MatchMode mode)
      : encoder_(encoder), mode_(mode) {}

  void set_head(ClassifierHead head);
  bool has_head() const { return head_.has_value(); }
  const ClassifierHead& head() const;
  MatchMode mode() const { return mode_; }

  MatchPrediction predict(const Case& case_a, const Case& case_b,
                          const FeatureSelection& selection_a,
                          const FeatureSelection& selection_b,
                          InputSource source) const;

 private:
  const Encoder* encoder_;
  MatchMode mode_;
  std::optional<ClassifierHead> head_;
};

// Trains the 3-way matching head. Selections are looked up by case_id; gold
// selections at train time keep identification errors out of the matcher.
ClassifierHead train_matcher(
    const std::vector<CasePair>& pairs,
    const std::unordered_map<std::string, FeatureSelection>& selections,
    const Encoder& encoder, MatchMode mode, InputSource source,
    const TrainingConfig& config, const FgmConfig& fgm);

}  // namespace casematch
