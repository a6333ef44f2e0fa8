#include "casematch/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "casematch/aligner.hpp"
#include "casematch/errors.hpp"
#include "casematch/fsi.hpp"
#include "casematch/matcher.hpp"
#include "casematch/pipeline.hpp"

namespace casematch {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string folds_directory(const RunConfig& config) {
  return config.output_dir + "/folds";
}

std::string fold_split_path(const RunConfig& config, int fold_id) {
  return folds_directory(config) + "/fold_" + std::to_string(fold_id) +
         ".json";
}

std::string fsi_data_path(const RunConfig& config, int fold_id) {
  return folds_directory(config) + "/fold_" + std::to_string(fold_id) +
         ".fsi.jsonl";
}

std::string align_data_path(const RunConfig& config, int fold_id) {
  return folds_directory(config) + "/fold_" + std::to_string(fold_id) +
         ".align.jsonl";
}

std::string head_path(const RunConfig& config, int fold_id,
                      const std::string& module) {
  return fold_directory(config, fold_id) + "/heads/" + module + ".json";
}

std::vector<json> read_jsonl_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kState, "missing file: " + path);
  }
  std::vector<json> out;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw Error(ErrorKind::kParse, path + ": line " +
                                         std::to_string(line_number) +
                                         ": malformed JSON");
    }
    out.push_back(std::move(j));
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorKind::kValidation, "cannot write file: " + path);
  }
  out << content;
}

json load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) return json::object();
  json j = json::parse(in, nullptr, false);
  return j.is_discarded() ? json::object() : j;
}

void store_manifest(const std::string& path, const json& manifest) {
  write_text_file(path, manifest.dump(2) + "\n");
}

std::map<std::string, const CasePair*> index_by_id(
    const std::vector<CasePair>& corpus) {
  std::map<std::string, const CasePair*> by_id;
  for (const auto& pair : corpus) by_id[pair.pair_id] = &pair;
  return by_id;
}

std::vector<CasePair> resolve_ids(const std::vector<std::string>& ids,
                                  const std::map<std::string, const CasePair*>& by_id,
                                  const std::string& context) {
  std::vector<CasePair> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw Error(ErrorKind::kValidation,
                  context + ": unknown pair id " + id);
    }
    out.push_back(*it->second);
  }
  return out;
}

std::vector<int> fold_ids_to_process(const RunConfig& config, int fold_id) {
  if (fold_id >= 0) return {fold_id};
  std::vector<int> ids(static_cast<size_t>(config.k_folds));
  for (int i = 0; i < config.k_folds; ++i) ids[static_cast<size_t>(i)] = i;
  return ids;
}

uint64_t fold_seed(const RunConfig& config, int fold_id) {
  return config.settings.seed + static_cast<uint64_t>(fold_id);
}

json training_metadata(const RunConfig& config, int fold_id,
                       const std::string& module,
                       const TrainingConfig& training, const FgmConfig& fgm) {
  return json{{"module", module},
              {"fold_id", fold_id},
              {"seed", fold_seed(config, fold_id)},
              {"match_mode", match_mode_name(config.settings.match_mode)},
              {"fgm", {{"enabled", fgm.enabled}, {"epsilon", fgm.epsilon}}},
              {"training",
               {{"batch_size", training.batch_size},
                {"num_epochs", training.epochs},
                {"learning_rate", training.learning_rate},
                {"dropout", training.dropout_rate},
                {"class_weights", training.class_weights}}}};
}

}  // namespace

std::string run_directory(const RunConfig& config) {
  return config.output_dir + "/runs/" + run_id(config);
}

std::string fold_directory(const RunConfig& config, int fold_id) {
  return run_directory(config) + "/fold_" + std::to_string(fold_id);
}

void save_fold(const std::string& path, const FoldSplit& fold) {
  json j{{"fold_id", fold.fold_id},
         {"train_pair_ids", fold.train_pair_ids},
         {"test_pair_ids", fold.test_pair_ids}};
  write_text_file(path, j.dump(2) + "\n");
}

FoldSplit load_fold(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kState,
                "missing fold file (run prepare first): " + path);
  }
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorKind::kParse, path + ": malformed fold file");
  }
  FoldSplit fold;
  try {
    fold.fold_id = j.at("fold_id").get<int>();
    fold.train_pair_ids = j.at("train_pair_ids").get<std::vector<std::string>>();
    fold.test_pair_ids = j.at("test_pair_ids").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, path + ": " + e.what());
  }
  return fold;
}

void save_fsi_examples(const std::string& path,
                       const std::vector<FsiExample>& examples) {
  std::ostringstream out;
  for (const auto& ex : examples) {
    out << json{{"case_id", ex.case_id},
                {"index", ex.sentence.index},
                {"text", ex.sentence.text},
                {"label", ex.label}}
               .dump()
        << "\n";
  }
  write_text_file(path, out.str());
}

std::vector<FsiExample> load_fsi_examples(const std::string& path) {
  std::vector<FsiExample> examples;
  for (const auto& j : read_jsonl_file(path)) {
    FsiExample ex;
    ex.case_id = j.at("case_id").get<std::string>();
    ex.sentence.index = j.at("index").get<int>();
    ex.sentence.text = j.at("text").get<std::string>();
    ex.label = j.at("label").get<int>();
    examples.push_back(std::move(ex));
  }
  return examples;
}

void save_align_examples(const std::string& path,
                         const std::vector<AlignExample>& examples) {
  std::ostringstream out;
  for (const auto& ex : examples) {
    out << json{{"pair_id", ex.pair_id},
                {"index_a", ex.sentence_a.index},
                {"index_b", ex.sentence_b.index},
                {"text_a", ex.sentence_a.text},
                {"text_b", ex.sentence_b.text},
                {"label", ex.label}}
               .dump()
        << "\n";
  }
  write_text_file(path, out.str());
}

std::vector<AlignExample> load_align_examples(const std::string& path) {
  std::vector<AlignExample> examples;
  for (const auto& j : read_jsonl_file(path)) {
    AlignExample ex;
    ex.pair_id = j.at("pair_id").get<std::string>();
    ex.sentence_a.index = j.at("index_a").get<int>();
    ex.sentence_a.text = j.at("text_a").get<std::string>();
    ex.sentence_b.index = j.at("index_b").get<int>();
    ex.sentence_b.text = j.at("text_b").get<std::string>();
    ex.label = j.at("label").get<int>();
    examples.push_back(std::move(ex));
  }
  return examples;
}

void cmd_generate(const SyntheticSpec& spec, const std::string& out_path,
                  int k_folds) {
  spec.validate(k_folds);
  std::vector<CasePair> pairs = generate_corpus(spec);
  fs::path parent = fs::path(out_path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  save_dataset(out_path, pairs);
  std::cout << "wrote " << pairs.size() << " pairs to " << out_path << "\n";
}

void cmd_prepare(const RunConfig& config) {
  config.validate();
  std::vector<CasePair> corpus = load_dataset(config.corpus_path);
  std::vector<FoldSplit> folds =
      stratified_kfold(corpus, config.k_folds, config.settings.seed);
  fs::create_directories(folds_directory(config));
  auto by_id = index_by_id(corpus);
  for (const auto& fold : folds) {
    save_fold(fold_split_path(config, fold.fold_id), fold);
    std::vector<CasePair> train_pairs =
        resolve_ids(fold.train_pair_ids, by_id, "prepare");
    save_fsi_examples(fsi_data_path(config, fold.fold_id),
                      build_fsi_dataset(train_pairs));
    save_align_examples(align_data_path(config, fold.fold_id),
                        build_alignment_dataset(train_pairs));
  }
  std::cout << "prepared " << folds.size() << " folds under "
            << folds_directory(config) << "\n";
}

void cmd_train(const RunConfig& config, int fold_id,
               const std::string& module) {
  config.validate();
  if (module != "fsi" && module != "matcher" && module != "aligner" &&
      module != "all") {
    throw Error(ErrorKind::kConfig,
                "module must be fsi, matcher, aligner or all; got " + module);
  }
  const RunSettings& s = config.settings;
  std::vector<CasePair> corpus = load_dataset(config.corpus_path);
  auto by_id = index_by_id(corpus);

  for (int fold : fold_ids_to_process(config, fold_id)) {
    FoldSplit split = load_fold(fold_split_path(config, fold));
    fs::create_directories(fold_directory(config, fold) + "/heads");
    Encoder encoder(s.encoder);
    auto seeded = [&](TrainingConfig training) {
      training.seed = fold_seed(config, fold);
      return training;
    };

    std::string manifest_path = fold_directory(config, fold) + "/manifest.json";
    json manifest = load_manifest(manifest_path);
    manifest["run_id"] = run_id(config);
    manifest["fold_id"] = fold;
    manifest["seed"] = fold_seed(config, fold);
    manifest["config"] = json::parse(run_config_to_json_text(config));

    try {
      if (module == "fsi" || module == "all") {
        auto dataset = load_fsi_examples(fsi_data_path(config, fold));
        ClassifierHead head =
            train_fsi(dataset, encoder, seeded(s.fsi_training), s.fsi_fgm);
        save_head(head_path(config, fold, "fsi"), head,
                  training_metadata(config, fold, "fsi", seeded(s.fsi_training),
                                    s.fsi_fgm)
                      .dump());
        manifest["trained"]["fsi"] = true;
      }
      if (module == "matcher" || module == "all") {
        std::vector<CasePair> train_pairs =
            resolve_ids(split.train_pair_ids, by_id, "train");
        std::unordered_map<std::string, FeatureSelection> selections;
        if (s.input_source == InputSource::kFeatureSentences) {
          FsiModel fsi_model(&encoder);
          if (!s.train_on_gold_selections) {
            fsi_model.set_head(
                load_head(head_path(config, fold, "fsi")).head);
          }
          for (const auto& pair : train_pairs) {
            auto add = [&](const Case& c, const std::set<int>& gold) {
              if (selections.count(c.case_id)) return;
              selections.emplace(
                  c.case_id, s.train_on_gold_selections
                                 ? selection_from_gold(c, gold)
                                 : fsi_model.select_features(c, s.fsi_threshold,
                                                             s.fallback_k));
            };
            add(pair.case_a, pair.gold_features_a);
            add(pair.case_b, pair.gold_features_b);
          }
        }
        ClassifierHead head = train_matcher(
            train_pairs, selections, encoder, s.match_mode, s.input_source,
            seeded(s.matcher_training), s.matcher_fgm);
        save_head(head_path(config, fold, "matcher"), head,
                  training_metadata(config, fold, "matcher",
                                    seeded(s.matcher_training), s.matcher_fgm)
                      .dump());
        manifest["trained"]["matcher"] = true;
      }
      if (module == "aligner" || module == "all") {
        auto dataset = load_align_examples(align_data_path(config, fold));
        ClassifierHead head =
            train_aligner(dataset, encoder, s.match_mode,
                          seeded(s.aligner_training), s.aligner_fgm);
        save_head(head_path(config, fold, "aligner"), head,
                  training_metadata(config, fold, "aligner",
                                    seeded(s.aligner_training), s.aligner_fgm)
                      .dump());
        manifest["trained"]["aligner"] = true;
      }
    } catch (const Error& e) {
      throw Error(e.kind(), "fold " + std::to_string(fold) + ", module " +
                                module + ": " + e.what());
    }
    store_manifest(manifest_path, manifest);
    std::cout << "trained " << module << " for fold " << fold << " under "
              << fold_directory(config, fold) << "\n";
  }
}

void cmd_predict(const RunConfig& config, int fold_id) {
  config.validate();
  const RunSettings& s = config.settings;
  std::vector<CasePair> corpus = load_dataset(config.corpus_path);
  auto by_id = index_by_id(corpus);

  for (int fold : fold_ids_to_process(config, fold_id)) {
    FoldSplit split = load_fold(fold_split_path(config, fold));
    PipelineComponents components =
        PipelineComponents::make(s.encoder, s.match_mode);
    for (const std::string& module : {"fsi", "matcher", "aligner"}) {
      std::string path = head_path(config, fold, module);
      if (!fs::exists(path)) {
        throw Error(ErrorKind::kState,
                    "missing trained " + std::string(module) +
                        " head for fold " + std::to_string(fold) +
                        " (run train first): " + path);
      }
      ClassifierHead head = load_head(path).head;
      if (module == "fsi") {
        components.fsi->set_head(std::move(head));
      } else if (module == "matcher") {
        components.matcher->set_head(std::move(head));
      } else {
        components.aligner->set_head(std::move(head));
      }
    }

    std::vector<CasePair> test_pairs =
        resolve_ids(split.test_pair_ids, by_id, "predict");
    PipelineOptions opts = s.options();
    std::vector<PredictionRecord> records;
    int fallback_count = 0, resolution_count = 0;
    for (const auto& pair : test_pairs) {
      PipelinePrediction prediction = run_pipeline(
          pair.case_a, pair.case_b, pair.pair_id, components, opts);
      if (prediction.fallback_a) ++fallback_count;
      if (prediction.fallback_b) ++fallback_count;
      if (prediction.conflict_resolved) ++resolution_count;
      records.push_back(to_prediction_record(prediction, pair));
    }
    std::string out_path = fold_directory(config, fold) + "/predictions.jsonl";
    save_predictions(out_path, records);

    std::string manifest_path = fold_directory(config, fold) + "/manifest.json";
    json manifest = load_manifest(manifest_path);
    manifest["fallback_engagements"] = fallback_count;
    manifest["conflict_resolutions"] = resolution_count;
    manifest["predicted_pairs"] = records.size();
    store_manifest(manifest_path, manifest);
    std::cout << "wrote " << records.size() << " predictions to " << out_path
              << "\n";
  }
}

namespace {

EvaluationReport evaluate_fold(const RunConfig& config, int fold,
                               const std::vector<CasePair>& corpus) {
  auto by_id = index_by_id(corpus);
  FoldSplit split = load_fold(fold_split_path(config, fold));
  std::string pred_path = fold_directory(config, fold) + "/predictions.jsonl";
  std::vector<PredictionRecord> predictions = load_predictions(pred_path);
  std::vector<CasePair> gold = resolve_ids(split.test_pair_ids, by_id,
                                           "evaluate");
  return evaluate_predictions(predictions, gold, fold);
}

}  // namespace

void cmd_evaluate(const RunConfig& config, int fold_id) {
  config.validate();
  std::vector<CasePair> corpus = load_dataset(config.corpus_path);
  for (int fold : fold_ids_to_process(config, fold_id)) {
    EvaluationReport report = evaluate_fold(config, fold, corpus);
    std::string path = fold_directory(config, fold) + "/report.json";
    write_text_file(path, report_to_json(report) + "\n");
    std::cout << format_report_table({report}, nullptr);
  }
}

EvaluationReport cmd_evaluate_files(const std::string& predictions_path,
                                    const std::string& gold_path,
                                    const std::string& report_path) {
  std::vector<PredictionRecord> predictions =
      load_predictions(predictions_path);
  std::vector<CasePair> gold = load_dataset(gold_path);
  EvaluationReport report = evaluate_predictions(predictions, gold);
  if (!report_path.empty()) {
    write_text_file(report_path, report_to_json(report) + "\n");
  }
  std::cout << format_report_table({report}, nullptr);
  return report;
}

void cmd_report(const RunConfig& config, bool pooled) {
  config.validate();
  std::vector<EvaluationReport> fold_reports;
  for (int fold = 0; fold < config.k_folds; ++fold) {
    std::string path = fold_directory(config, fold) + "/report.json";
    std::ifstream in(path);
    if (!in) {
      throw Error(ErrorKind::kState,
                  "missing fold report (run evaluate first): " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    fold_reports.push_back(report_from_json(buffer.str()));
  }
  EvaluationReport aggregate = aggregate_folds(fold_reports);
  write_text_file(run_directory(config) + "/report.json",
                  report_to_json(aggregate) + "\n");
  std::string table = format_report_table(fold_reports, &aggregate);
  write_text_file(run_directory(config) + "/summary.txt", table);
  std::cout << table;

  if (pooled) {
    std::vector<CasePair> corpus = load_dataset(config.corpus_path);
    std::vector<PredictionRecord> all;
    for (int fold = 0; fold < config.k_folds; ++fold) {
      auto records = load_predictions(fold_directory(config, fold) +
                                      "/predictions.jsonl");
      all.insert(all.end(), records.begin(), records.end());
    }
    EvaluationReport pooled_report = evaluate_predictions(all, corpus);
    write_text_file(run_directory(config) + "/pooled_report.json",
                    report_to_json(pooled_report) + "\n");
    std::cout << "pooled:\n" << format_report_table({pooled_report}, nullptr);
  }
}

}  // namespace casematch
