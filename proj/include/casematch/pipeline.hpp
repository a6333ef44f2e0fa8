#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "casematch/aligner.hpp"
#include "casematch/corpus.hpp"
#include "casematch/encoder.hpp"
#include "casematch/fsi.hpp"
#include "casematch/matcher.hpp"

namespace casematch {

struct PipelinePrediction {
  std::string pair_id;
  MatchLabel match_label = MatchLabel::kNotMatch;
  std::set<int> features_a;
  std::set<int> features_b;
  std::set<IndexPair> aligned;
  bool conflict_resolved = false;
  bool fallback_a = false;  // identification fell back to top-k on case a
  bool fallback_b = false;
};

struct PipelineOptions {
  double fsi_threshold = 0.5;
  int fallback_k = 3;
  double align_threshold = 0.5;
  bool conflict_resolution = true;
  InputSource input_source = InputSource::kFeatureSentences;
};

// The three trained stages sharing one encoder.
struct PipelineComponents {
  std::unique_ptr<Encoder> encoder;
  std::unique_ptr<FsiModel> fsi;
  std::unique_ptr<MatcherModel> matcher;
  std::unique_ptr<AlignerModel> aligner;

  static PipelineComponents make(EncoderConfig encoder_config, MatchMode mode);
};

// A match or partial-match label without aligned evidence demotes to not
// match; everything else passes through unchanged.
PipelinePrediction resolve_conflict(PipelinePrediction prediction);

PipelinePrediction run_pipeline(const Case& case_a, const Case& case_b,
                                const std::string& pair_id,
                                const PipelineComponents& components,
                                const PipelineOptions& options);

// Everything run_fold needs besides the data: encoder settings, per-stage
// training and adversarial settings, mode switches and thresholds.
struct RunSettings {
  EncoderConfig encoder;
  TrainingConfig fsi_training;
  TrainingConfig matcher_training;
  TrainingConfig aligner_training;
  FgmConfig fsi_fgm;
  FgmConfig matcher_fgm;
  FgmConfig aligner_fgm;
  // Siamese separates best over the frozen hashed n-gram backend; the
  // absolute-difference block exposes shared content to a linear head.
  MatchMode match_mode = MatchMode::kSiamese;
  InputSource input_source = InputSource::kFeatureSentences;
  double fsi_threshold = 0.5;
  double align_threshold = 0.5;
  int fallback_k = 3;
  bool conflict_resolution = true;
  // Train the matcher on gold selections (default) or on fsi predictions.
  bool train_on_gold_selections = true;
  uint64_t seed = 42;

  PipelineOptions options() const;
  void validate() const;
};

struct FoldRunResult {
  int fold_id = 0;
  std::vector<PipelinePrediction> predictions;
  PipelineComponents components;
  int fallback_engagements = 0;
  int conflict_resolutions = 0;
};

// Trains identification, matching and alignment on the fold's training
// pairs (gold-derived datasets), then predicts on the test pairs. Stage
// seeds derive as settings.seed + fold_id.
FoldRunResult run_fold(const FoldSplit& fold,
                       const std::vector<CasePair>& corpus,
                       const RunSettings& settings);

PredictionRecord to_prediction_record(const PipelinePrediction& prediction,
                                      const CasePair& pair);

}  // namespace casematch
