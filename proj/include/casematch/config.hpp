#pragma once

#include <string>
#include <vector>

#include "casematch/pipeline.hpp"

namespace casematch {

// Full run configuration. The on-disk form is a flat JSON object; unknown
// keys are rejected so typos cannot silently fall back to defaults.
struct RunConfig {
  std::string corpus_path;
  std::string output_dir = "out";
  int k_folds = 5;
  RunSettings settings;

  void validate() const;
};

RunConfig load_run_config(const std::string& path);

// Parses a flat JSON object; every key must be known.
RunConfig run_config_from_json_text(const std::string& text);

// Canonical flat form; inverse of the parser.
std::string run_config_to_json_text(const RunConfig& config);

// Applies "key=value" onto the flat form; value parsed as JSON when
// possible, else taken as a string.
std::string apply_config_override(const std::string& json_text,
                                  const std::string& assignment);

// Content hash of the canonical config, used as the default run id.
std::string run_id(const RunConfig& config);

}  // namespace casematch
