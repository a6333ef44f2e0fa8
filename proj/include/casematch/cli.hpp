#pragma once

#include <string>
#include <vector>

#include "casematch/config.hpp"
#include "casematch/corpus.hpp"
#include "casematch/metrics.hpp"
#include "casematch/synthetic.hpp"

namespace casematch {

// Command implementations behind the CLI front end. All paths derive from
// the config: fold files live under <output_dir>/folds, run artifacts under
// <output_dir>/runs/<run_id>/fold_<i>.

void cmd_generate(const SyntheticSpec& spec, const std::string& out_path,
                  int k_folds);

// Writes fold splits plus the per-fold identification and alignment
// training files.
void cmd_prepare(const RunConfig& config);

// module is one of fsi | matcher | aligner | all; fold_id -1 trains every
// fold.
void cmd_train(const RunConfig& config, int fold_id, const std::string& module);

void cmd_predict(const RunConfig& config, int fold_id);

void cmd_evaluate(const RunConfig& config, int fold_id);

// Scores one prediction file against one gold file, no run directory.
EvaluationReport cmd_evaluate_files(const std::string& predictions_path,
                                    const std::string& gold_path,
                                    const std::string& report_path);

// Aggregates per-fold reports into <run>/report.json and summary.txt; with
// pooled also scores all fold predictions as one set.
void cmd_report(const RunConfig& config, bool pooled);

std::string run_directory(const RunConfig& config);
std::string fold_directory(const RunConfig& config, int fold_id);

// Fold-file helpers shared by commands and tests.
void save_fold(const std::string& path, const FoldSplit& fold);
FoldSplit load_fold(const std::string& path);
void save_fsi_examples(const std::string& path,
                       const std::vector<FsiExample>& examples);
std::vector<FsiExample> load_fsi_examples(const std::string& path);
void save_align_examples(const std::string& path,
                         const std::vector<AlignExample>& examples);
std::vector<AlignExample> load_align_examples(const std::string& path);

}  // namespace casematch
