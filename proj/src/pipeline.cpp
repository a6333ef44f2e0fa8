#include "casematch/pipeline.hpp"

#include <map>
#include <unordered_map>

#include "casematch/errors.hpp"

namespace casematch {

PipelineComponents PipelineComponents::make(EncoderConfig encoder_config,
                                            MatchMode mode) {
  PipelineComponents components;
  components.encoder = std::make_unique<Encoder>(std::move(encoder_config));
  components.fsi = std::make_unique<FsiModel>(components.encoder.get());
  components.matcher =
      std::make_unique<MatcherModel>(components.encoder.get(), mode);
  components.aligner =
      std::make_unique<AlignerModel>(components.encoder.get(), mode);
  return components;
}

PipelinePrediction resolve_conflict(PipelinePrediction prediction) {
  if (prediction.match_label != MatchLabel::kNotMatch &&
      prediction.aligned.empty()) {
    prediction.match_label = MatchLabel::kNotMatch;
    prediction.conflict_resolved = true;
  }
  return prediction;
}

namespace {

template <typename F>
auto stage(const std::string& name, const std::string& pair_id, F&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), "stage " + name + " (pair " + pair_id +
                              "): " + e.what());
  }
}

}  // namespace

PipelinePrediction run_pipeline(const Case& case_a, const Case& case_b,
                                const std::string& pair_id,
                                const PipelineComponents& components,
                                const PipelineOptions& options) {
  PipelinePrediction prediction;
  prediction.pair_id = pair_id;

  FeatureSelection selection_a =
      stage("identification", pair_id, [&] {
        return components.fsi->select_features(case_a, options.fsi_threshold,
                                               options.fallback_k);
      });
  FeatureSelection selection_b =
      stage("identification", pair_id, [&] {
        return components.fsi->select_features(case_b, options.fsi_threshold,
                                               options.fallback_k);
      });
  prediction.features_a.insert(selection_a.indices.begin(),
                               selection_a.indices.end());
  prediction.features_b.insert(selection_b.indices.begin(),
                               selection_b.indices.end());
  prediction.fallback_a = selection_a.fallback_used;
  prediction.fallback_b = selection_b.fallback_used;

  MatchPrediction match = stage("matching", pair_id, [&] {
    return components.matcher->predict(case_a, case_b, selection_a,
                                       selection_b, options.input_source);
  });
  prediction.match_label = match.label;

  AlignmentResult alignment = stage("alignment", pair_id, [&] {
    return components.aligner->align(selection_a, selection_b, case_a, case_b,
                                     options.align_threshold);
  });
  prediction.aligned = alignment.aligned;

  if (options.conflict_resolution) {
    prediction = resolve_conflict(std::move(prediction));
  }
  return prediction;
}

PipelineOptions RunSettings::options() const {
  PipelineOptions opts;
  opts.fsi_threshold = fsi_threshold;
  opts.fallback_k = fallback_k;
  opts.align_threshold = align_threshold;
  opts.conflict_resolution = conflict_resolution;
  opts.input_source = input_source;
  return opts;
}

void RunSettings::validate() const {
  encoder.validate();
  fsi_training.validate();
  matcher_training.validate();
  aligner_training.validate();
  fsi_fgm.validate();
  matcher_fgm.validate();
  aligner_fgm.validate();
  if (fallback_k < 1) {
    throw Error(ErrorKind::kConfig, "fallback_k must be at least 1");
  }
  if (fsi_threshold < 0.0 || fsi_threshold > 1.0 || align_threshold < 0.0 ||
      align_threshold > 1.0) {
    throw Error(ErrorKind::kConfig, "thresholds must lie in [0, 1]");
  }
}

FoldRunResult run_fold(const FoldSplit& fold,
                       const std::vector<CasePair>& corpus,
                       const RunSettings& settings) {
  settings.validate();
  std::map<std::string, const CasePair*> by_id;
  for (const auto& pair : corpus) by_id[pair.pair_id] = &pair;
  auto pairs_of = [&](const std::vector<std::string>& ids) {
    std::vector<CasePair> out;
    out.reserve(ids.size());
    for (const auto& id : ids) {
      auto it = by_id.find(id);
      if (it == by_id.end()) {
        throw Error(ErrorKind::kValidation,
                    "fold " + std::to_string(fold.fold_id) +
                        " references unknown pair " + id);
      }
      out.push_back(*it->second);
    }
    return out;
  };

  std::vector<CasePair> train_pairs = pairs_of(fold.train_pair_ids);
  std::vector<CasePair> test_pairs = pairs_of(fold.test_pair_ids);

  FoldRunResult result;
  result.fold_id = fold.fold_id;
  result.components =
      PipelineComponents::make(settings.encoder, settings.match_mode);
  const Encoder& encoder = *result.components.encoder;

  uint64_t fold_seed = settings.seed + static_cast<uint64_t>(fold.fold_id);
  auto seeded = [&](TrainingConfig config) {
    config.seed = fold_seed;
    return config;
  };

  // Stage order fixed for reproducible RNG consumption.
  try {
    std::vector<FsiExample> fsi_data = build_fsi_dataset(train_pairs);
    result.components.fsi->set_head(train_fsi(
        fsi_data, encoder, seeded(settings.fsi_training), settings.fsi_fgm));
  } catch (const Error& e) {
    throw Error(e.kind(), "fold " + std::to_string(fold.fold_id) +
                              ", identification training: " + e.what());
  }

  try {
    std::unordered_map<std::string, FeatureSelection> selections;
    for (const auto& pair : train_pairs) {
      auto add = [&](const Case& c, const std::set<int>& gold) {
        if (selections.count(c.case_id)) return;
        selections.emplace(
            c.case_id,
            settings.train_on_gold_selections
                ? selection_from_gold(c, gold)
                : result.components.fsi->select_features(
                      c, settings.fsi_threshold, settings.fallback_k));
      };
      add(pair.case_a, pair.gold_features_a);
      add(pair.case_b, pair.gold_features_b);
    }
    result.components.matcher->set_head(train_matcher(
        train_pairs, selections, encoder, settings.match_mode,
        settings.input_source, seeded(settings.matcher_training),
        settings.matcher_fgm));
  } catch (const Error& e) {
    throw Error(e.kind(), "fold " + std::to_string(fold.fold_id) +
                              ", matching training: " + e.what());
  }

  try {
    std::vector<AlignExample> align_data = build_alignment_dataset(train_pairs);
    result.components.aligner->set_head(
        train_aligner(align_data, encoder, settings.match_mode,
                      seeded(settings.aligner_training), settings.aligner_fgm));
  } catch (const Error& e) {
    throw Error(e.kind(), "fold " + std::to_string(fold.fold_id) +
                              ", alignment training: " + e.what());
  }

  PipelineOptions opts = settings.options();
  for (const auto& pair : test_pairs) {
    PipelinePrediction prediction = run_pipeline(
        pair.case_a, pair.case_b, pair.pair_id, result.components, opts);
    if (prediction.fallback_a) ++result.fallback_engagements;
    if (prediction.fallback_b) ++result.fallback_engagements;
    if (prediction.conflict_resolved) ++result.conflict_resolutions;
    result.predictions.push_back(std::move(prediction));
  }
  return result;
}

PredictionRecord to_prediction_record(const PipelinePrediction& prediction,
                                      const CasePair& pair) {
  PredictionRecord record;
  record.pair_id = prediction.pair_id;
  record.case_a = pair.case_a;
  record.case_b = pair.case_b;
  record.pred_label = static_cast<int>(prediction.match_label);
  record.pred_features_a = prediction.features_a;
  record.pred_features_b = prediction.features_b;
  record.pred_aligned = prediction.aligned;
  return record;
}

}  // namespace casematch
