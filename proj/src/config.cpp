#include "casematch/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "casematch/errors.hpp"
#include "casematch/text.hpp"

namespace casematch {

using nlohmann::json;

namespace {

const char* backend_name(EncoderBackend backend) {
  return backend == EncoderBackend::kHashedNgram ? "hashed_ngram" : "external";
}

EncoderBackend backend_from_name(const std::string& name) {
  if (name == "hashed_ngram") return EncoderBackend::kHashedNgram;
  if (name == "external") return EncoderBackend::kExternal;
  throw Error(ErrorKind::kConfig, "unknown encoder backend: " + name);
}

struct ModuleKeys {
  const char* prefix;
  TrainingConfig RunSettings::*training;
  FgmConfig RunSettings::*fgm;
};

constexpr ModuleKeys kModules[] = {
    {"fsi", &RunSettings::fsi_training, &RunSettings::fsi_fgm},
    {"matcher", &RunSettings::matcher_training, &RunSettings::matcher_fgm},
    {"aligner", &RunSettings::aligner_training, &RunSettings::aligner_fgm},
};

}  // namespace

void RunConfig::validate() const {
  if (k_folds < 2) {
    throw Error(ErrorKind::kConfig, "k_folds must be at least 2");
  }
  settings.validate();
}

RunConfig run_config_from_json_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorKind::kConfig, "config must be a JSON object");
  }

  RunConfig config;
  std::set<std::string> known;
  auto read = [&](const char* key, auto& target) {
    known.insert(key);
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(target);
    } catch (const json::exception&) {
      throw Error(ErrorKind::kConfig,
                  std::string("config key '") + key + "' has the wrong type");
    }
  };
  auto read_enum = [&](const char* key, auto& target, auto parse) {
    known.insert(key);
    if (!j.contains(key)) return;
    if (!j.at(key).is_string()) {
      throw Error(ErrorKind::kConfig,
                  std::string("config key '") + key + "' must be a string");
    }
    target = parse(j.at(key).get<std::string>());
  };

  read("corpus_path", config.corpus_path);
  read("output_dir", config.output_dir);
  read("k_folds", config.k_folds);
  read("seed", config.settings.seed);

  RunSettings& s = config.settings;
  read_enum("encoder_backend", s.encoder.backend, backend_from_name);
  read("encoder_endpoint", s.encoder.endpoint);
  read("feature_dimension", s.encoder.dim);
  read("ngram_orders", s.encoder.ngram_orders);
  read("max_len_sentence", s.encoder.max_len_sentence);
  read("max_len_case", s.encoder.max_len_case);

  // Base hyperparameters apply to all three modules; per-module overrides
  // use the module name as a key prefix.
  TrainingConfig base;
  FgmConfig base_fgm;
  read("batch_size", base.batch_size);
  read("num_epochs", base.epochs);
  read("learning_rate", base.learning_rate);
  read("dropout", base.dropout_rate);
  read("fgm_enabled", base_fgm.enabled);
  read("fgm_epsilon", base_fgm.epsilon);
  s.fsi_training = s.matcher_training = s.aligner_training = base;
  s.fsi_fgm = s.matcher_fgm = s.aligner_fgm = base_fgm;
  for (const auto& module : kModules) {
    std::string prefix = module.prefix;
    TrainingConfig& training = s.*(module.training);
    FgmConfig& fgm = s.*(module.fgm);
    read((prefix + "_batch_size").c_str(), training.batch_size);
    read((prefix + "_num_epochs").c_str(), training.epochs);
    read((prefix + "_learning_rate").c_str(), training.learning_rate);
    read((prefix + "_dropout").c_str(), training.dropout_rate);
    read((prefix + "_fgm_enabled").c_str(), fgm.enabled);
    read((prefix + "_fgm_epsilon").c_str(), fgm.epsilon);
  }

  read_enum("match_mode", s.match_mode, match_mode_from_name);
  read_enum("input_source", s.input_source, input_source_from_name);
  read("fsi_threshold", s.fsi_threshold);
  read("align_threshold", s.align_threshold);
  read("fallback_k", s.fallback_k);
  read("conflict_resolution", s.conflict_resolution);

  double align_negative = kAlignNegativeWeight;
  double align_positive = kAlignPositiveWeight;
  read("class_weight_align_negative", align_negative);
  read("class_weight_align_positive", align_positive);
  s.aligner_training.class_weights = {align_negative, align_positive};

  std::string selection_source = "gold";
  read("train_selection_source", selection_source);
  if (selection_source != "gold" && selection_source != "predicted") {
    throw Error(ErrorKind::kConfig,
                "train_selection_source must be 'gold' or 'predicted'");
  }
  s.train_on_gold_selections = selection_source == "gold";

  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) {
      throw Error(ErrorKind::kConfig, "unknown config key: " + key);
    }
  }
  return config;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kConfig, "cannot open config file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return run_config_from_json_text(buffer.str());
}

std::string run_config_to_json_text(const RunConfig& config) {
  const RunSettings& s = config.settings;
  json j{
      {"corpus_path", config.corpus_path},
      {"output_dir", config.output_dir},
      {"k_folds", config.k_folds},
      {"seed", s.seed},
      {"encoder_backend", backend_name(s.encoder.backend)},
      {"encoder_endpoint", s.encoder.endpoint},
      {"feature_dimension", s.encoder.dim},
      {"ngram_orders", s.encoder.ngram_orders},
      {"max_len_sentence", s.encoder.max_len_sentence},
      {"max_len_case", s.encoder.max_len_case},
      {"match_mode", match_mode_name(s.match_mode)},
      {"input_source", input_source_name(s.input_source)},
      {"fsi_threshold", s.fsi_threshold},
      {"align_threshold", s.align_threshold},
      {"fallback_k", s.fallback_k},
      {"conflict_resolution", s.conflict_resolution},
      {"class_weight_align_negative",
       s.aligner_training.class_weights.empty()
           ? kAlignNegativeWeight
           : s.aligner_training.class_weights[0]},
      {"class_weight_align_positive",
       s.aligner_training.class_weights.size() < 2
           ? kAlignPositiveWeight
           : s.aligner_training.class_weights[1]},
      {"train_selection_source",
       s.train_on_gold_selections ? "gold" : "predicted"},
  };
  for (const auto& module : kModules) {
    std::string prefix = module.prefix;
    const TrainingConfig& training = s.*(module.training);
    const FgmConfig& fgm = s.*(module.fgm);
    j[prefix + "_batch_size"] = training.batch_size;
    j[prefix + "_num_epochs"] = training.epochs;
    j[prefix + "_learning_rate"] = training.learning_rate;
    j[prefix + "_dropout"] = training.dropout_rate;
    j[prefix + "_fgm_enabled"] = fgm.enabled;
    j[prefix + "_fgm_epsilon"] = fgm.epsilon;
  }
  return j.dump(2);
}

std::string apply_config_override(const std::string& json_text,
                                  const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorKind::kConfig,
                "override must have the form key=value: " + assignment);
  }
  std::string key = assignment.substr(0, eq);
  std::string value = assignment.substr(eq + 1);
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorKind::kConfig, "config must be a JSON object");
  }
  json parsed = json::parse(value, nullptr, false);
  j[key] = parsed.is_discarded() ? json(value) : parsed;
  return j.dump();
}

std::string run_id(const RunConfig& config) {
  // nlohmann objects serialize with sorted keys, so the dump is canonical.
  uint64_t hash = fnv1a64(run_config_to_json_text(config));
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(hash));
  return buffer;
}

}  // namespace casematch
