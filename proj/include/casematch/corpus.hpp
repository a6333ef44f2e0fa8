#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace casematch {

enum class MatchLabel : int {
  kNotMatch = 0,
  kPartialMatch = 1,
  kMatch = 2,
};

MatchLabel match_label_from_int(int value);

struct Sentence {
  int index = 0;  // 0-based position within its case
  std::string text;
};

struct Case {
  std::string case_id;
  std::vector<Sentence> sentences;
};

using IndexPair = std::pair<int, int>;

struct CasePair {
  std::string pair_id;
  Case case_a;
  Case case_b;
  MatchLabel match_label = MatchLabel::kNotMatch;
  std::set<int> gold_features_a;
  std::set<int> gold_features_b;
  std::set<IndexPair> gold_aligned;
};

// One sentence of one case, labeled 1 when it is a feature sentence.
struct FsiExample {
  std::string case_id;
  Sentence sentence;
  int label = 0;
};

// One cross pair of gold feature sentences, labeled 1 when aligned.
struct AlignExample {
  std::string pair_id;
  Sentence sentence_a;
  Sentence sentence_b;
  int label = 0;
};

struct FoldSplit {
  int fold_id = 0;
  std::vector<std::string> train_pair_ids;
  std::vector<std::string> test_pair_ids;
};

// Pipeline output for one pair: the prediction-file record.
struct PredictionRecord {
  std::string pair_id;
  Case case_a;
  Case case_b;
  int pred_label = 0;
  std::set<int> pred_features_a;
  std::set<int> pred_features_b;
  std::set<IndexPair> pred_aligned;
};

// Splits raw text on the terminal punctuation set 。；！？ keeping the
// delimiter attached; segments that are empty before their delimiter are
// dropped.
std::vector<Sentence> segment_sentences(const std::string& raw_text);

// Throws a validation error naming the pair and offending field.
void validate_pair(const CasePair& pair);

std::vector<CasePair> load_dataset(const std::string& path);
void save_dataset(const std::string& path, const std::vector<CasePair>& pairs);

std::vector<PredictionRecord> load_predictions(const std::string& path);
void save_predictions(const std::string& path,
                      const std::vector<PredictionRecord>& records);

// Stratified k-fold assignment: shuffles within each label class by seed,
// then deals into k folds round-robin with a fold cursor carried across
// classes, so both total and per-label test counts stay within one of even.
std::vector<FoldSplit> stratified_kfold(const std::vector<CasePair>& pairs,
                                        int k, uint64_t seed);

// One example per deduplicated (case, sentence). Conflicting sentence lists
// or gold sets for a repeated case_id fail loudly.
std::vector<FsiExample> build_fsi_dataset(const std::vector<CasePair>& pairs);

// Full cross product of gold feature sentences per pair; label 1 exactly on
// gold-aligned index pairs.
std::vector<AlignExample> build_alignment_dataset(
    const std::vector<CasePair>& pairs);

}  // namespace casematch
