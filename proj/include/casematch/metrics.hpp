#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "casematch/corpus.hpp"

namespace casematch {

// Precision / recall / F1 of one predicted set against one gold set.
// Conventions at the undefined points: empty predicted set -> P = 0, empty
// gold set -> R = 0, P + R = 0 -> F = 0, both sets empty -> P = R = F = 1.
struct SetScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

template <typename T>
SetScore set_f1(const std::set<T>& predicted, const std::set<T>& gold) {
  if (predicted.empty() && gold.empty()) return SetScore{1.0, 1.0, 1.0};
  size_t intersection = 0;
  for (const T& item : predicted) {
    if (gold.count(item)) ++intersection;
  }
  SetScore score;
  score.precision = predicted.empty()
                        ? 0.0
                        : static_cast<double>(intersection) /
                              static_cast<double>(predicted.size());
  score.recall = gold.empty() ? 0.0
                              : static_cast<double>(intersection) /
                                    static_cast<double>(gold.size());
  double denom = score.precision + score.recall;
  score.f1 = denom == 0.0 ? 0.0 : 2.0 * score.precision * score.recall / denom;
  return score;
}

using ConfusionMatrix = std::array<std::array<int, 3>, 3>;  // [gold][pred]

struct MatchingScore {
  double f_sm = 0.0;
  std::array<double, 3> per_class_f1{};
  ConfusionMatrix confusion{};
};

// Macro-F1 over the three match labels. A class absent from both gold and
// predictions scores 0 and stays in the mean.
MatchingScore macro_f1_matching(const std::vector<int>& predicted,
                                const std::vector<int>& gold);

// Mean set-F1 over per-case feature selections; each pair contributes its
// two cases as separate instances.
double fsi_score(const std::vector<std::set<int>>& predicted,
                 const std::vector<std::set<int>>& gold);

struct FsaInstance {
  std::set<IndexPair> predicted;
  std::set<IndexPair> gold;
  MatchLabel gold_label = MatchLabel::kNotMatch;
};

// Mean set-F1 over the pairs whose gold label is match or partial match.
// With no eligible pair the score is defined as 1 and *degenerate is set.
double fsa_score(const std::vector<FsaInstance>& instances,
                 bool* degenerate = nullptr);

// 0.5 * f_sm + 0.25 * (f_fsi + f_fsa); also computed as the mean of the
// matching score and the interpretation score, asserted equal to 1e-12.
double final_score(double f_sm, double f_fsi, double f_fsa);

struct EvaluationReport {
  double f_sm = 0.0;
  double f_fsi = 0.0;
  double f_fsa = 0.0;
  double interpretation_score = 0.0;  // (f_fsi + f_fsa) / 2
  double f_final = 0.0;
  std::array<double, 3> per_class_f1{};
  ConfusionMatrix counts{};
  std::optional<int> fold_id;
  bool fsa_degenerate = false;
};

// Scores a prediction set against gold pairs, matched by pair_id. Missing or
// surplus ids raise a contract error listing them.
EvaluationReport evaluate_predictions(
    const std::vector<PredictionRecord>& predictions,
    const std::vector<CasePair>& gold, std::optional<int> fold_id = {});

// Unweighted mean of every score across folds; confusion counts are summed.
EvaluationReport aggregate_folds(const std::vector<EvaluationReport>& reports);

std::string report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const std::string& text);

// Plain-text table: one row per report with matching, interpretation and
// final scores, x100 at two decimals.
std::string format_report_table(
    const std::vector<EvaluationReport>& fold_reports,
    const EvaluationReport* aggregate);

}  // namespace casematch
