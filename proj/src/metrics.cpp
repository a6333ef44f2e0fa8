#include "casematch/metrics.hpp"

#include <cmath>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "casematch/errors.hpp"

namespace casematch {

using nlohmann::json;

MatchingScore macro_f1_matching(const std::vector<int>& predicted,
                                const std::vector<int>& gold) {
  if (predicted.size() != gold.size()) {
    throw Error(ErrorKind::kContract,
                "predicted and gold label lists differ in length (" +
                    std::to_string(predicted.size()) + " vs " +
                    std::to_string(gold.size()) + ")");
  }
  MatchingScore score;
  for (size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] < 0 || gold[i] > 2 || predicted[i] < 0 || predicted[i] > 2) {
      throw Error(ErrorKind::kContract,
                  "labels must lie in {0,1,2} (instance " + std::to_string(i) +
                      ")");
    }
    score.confusion[static_cast<size_t>(gold[i])]
                   [static_cast<size_t>(predicted[i])] += 1;
  }
  double sum_f1 = 0.0;
  for (int c = 0; c < 3; ++c) {
    int tp = score.confusion[static_cast<size_t>(c)][static_cast<size_t>(c)];
    int pred_total = 0, gold_total = 0;
    for (int o = 0; o < 3; ++o) {
      pred_total += score.confusion[static_cast<size_t>(o)][static_cast<size_t>(c)];
      gold_total += score.confusion[static_cast<size_t>(c)][static_cast<size_t>(o)];
    }
    double precision = pred_total == 0 ? 0.0
                                       : static_cast<double>(tp) /
                                             static_cast<double>(pred_total);
    double recall = gold_total == 0 ? 0.0
                                    : static_cast<double>(tp) /
                                          static_cast<double>(gold_total);
    double f1 = (precision + recall) == 0.0
                    ? 0.0
                    : 2.0 * precision * recall / (precision + recall);
    score.per_class_f1[static_cast<size_t>(c)] = f1;
    sum_f1 += f1;
  }
  score.f_sm = sum_f1 / 3.0;
  return score;
}

double fsi_score(const std::vector<std::set<int>>& predicted,
                 const std::vector<std::set<int>>& gold) {
  if (predicted.size() != gold.size()) {
    throw Error(ErrorKind::kContract,
                "fsi_score: instance counts differ");
  }
  if (predicted.empty()) {
    throw Error(ErrorKind::kContract, "fsi_score: no instances");
  }
  double sum = 0.0;
  for (size_t i = 0; i < predicted.size(); ++i) {
    sum += set_f1(predicted[i], gold[i]).f1;
  }
  return sum / static_cast<double>(predicted.size());
}

double fsa_score(const std::vector<FsaInstance>& instances, bool* degenerate) {
  double sum = 0.0;
  size_t eligible = 0;
  for (const auto& inst : instances) {
    if (inst.gold_label == MatchLabel::kNotMatch) continue;
    sum += set_f1(inst.predicted, inst.gold).f1;
    ++eligible;
  }
  if (degenerate) *degenerate = (eligible == 0);
  if (eligible == 0) {
    std::cerr << "warning: no pairs with a match or partial-match gold label; "
                 "alignment score defined as 1\n";
    return 1.0;
  }
  return sum / static_cast<double>(eligible);
}

double final_score(double f_sm, double f_fsi, double f_fsa) {
  for (double v : {f_sm, f_fsi, f_fsa}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorKind::kContract,
                  "scores must lie in [0, 1], got " + std::to_string(v));
    }
  }
  double weighted = 0.5 * f_sm + 0.25 * (f_fsi + f_fsa);
  double mean_of_scores = (f_sm + (f_fsi + f_fsa) / 2.0) / 2.0;
  if (std::fabs(weighted - mean_of_scores) > 1e-12) {
    throw Error(ErrorKind::kContract,
                "final-score formulations disagree beyond 1e-12");
  }
  return weighted;
}

EvaluationReport evaluate_predictions(
    const std::vector<PredictionRecord>& predictions,
    const std::vector<CasePair>& gold, std::optional<int> fold_id) {
  std::map<std::string, const CasePair*> gold_by_id;
  for (const auto& pair : gold) gold_by_id[pair.pair_id] = &pair;

  std::string missing, surplus;
  std::set<std::string> seen;
  for (const auto& record : predictions) {
    if (!gold_by_id.count(record.pair_id)) {
      surplus += (surplus.empty() ? "" : ", ") + record.pair_id;
    }
    seen.insert(record.pair_id);
  }
  for (const auto& pair : gold) {
    if (!seen.count(pair.pair_id)) {
      missing += (missing.empty() ? "" : ", ") + pair.pair_id;
    }
  }
  if (!missing.empty() || !surplus.empty()) {
    throw Error(ErrorKind::kContract,
                "prediction/gold id mismatch; missing predictions for [" +
                    missing + "], predictions without gold [" + surplus + "]");
  }
  if (predictions.empty()) {
    throw Error(ErrorKind::kContract, "no predictions to evaluate");
  }

  std::vector<int> pred_labels, gold_labels;
  std::vector<std::set<int>> pred_features, gold_features;
  std::vector<FsaInstance> fsa_instances;
  for (const auto& record : predictions) {
    const CasePair& pair = *gold_by_id.at(record.pair_id);
    pred_labels.push_back(record.pred_label);
    gold_labels.push_back(static_cast<int>(pair.match_label));
    pred_features.push_back(record.pred_features_a);
    gold_features.push_back(pair.gold_features_a);
    pred_features.push_back(record.pred_features_b);
    gold_features.push_back(pair.gold_features_b);
    fsa_instances.push_back(
        FsaInstance{record.pred_aligned, pair.gold_aligned, pair.match_label});
  }

  EvaluationReport report;
  MatchingScore matching = macro_f1_matching(pred_labels, gold_labels);
  report.f_sm = matching.f_sm;
  report.per_class_f1 = matching.per_class_f1;
  report.counts = matching.confusion;
  report.f_fsi = fsi_score(pred_features, gold_features);
  report.f_fsa = fsa_score(fsa_instances, &report.fsa_degenerate);
  report.interpretation_score = (report.f_fsi + report.f_fsa) / 2.0;
  report.f_final = final_score(report.f_sm, report.f_fsi, report.f_fsa);
  report.fold_id = fold_id;
  return report;
}

EvaluationReport aggregate_folds(
    const std::vector<EvaluationReport>& reports) {
  if (reports.empty()) {
    throw Error(ErrorKind::kContract, "no fold reports to aggregate");
  }
  EvaluationReport out;
  for (const auto& r : reports) {
    out.f_sm += r.f_sm;
    out.f_fsi += r.f_fsi;
    out.f_fsa += r.f_fsa;
    for (size_t c = 0; c < 3; ++c) out.per_class_f1[c] += r.per_class_f1[c];
    for (size_t g = 0; g < 3; ++g) {
      for (size_t p = 0; p < 3; ++p) out.counts[g][p] += r.counts[g][p];
    }
    out.fsa_degenerate = out.fsa_degenerate || r.fsa_degenerate;
  }
  double n = static_cast<double>(reports.size());
  out.f_sm /= n;
  out.f_fsi /= n;
  out.f_fsa /= n;
  for (size_t c = 0; c < 3; ++c) out.per_class_f1[c] /= n;
  out.interpretation_score = (out.f_fsi + out.f_fsa) / 2.0;
  out.f_final = final_score(out.f_sm, out.f_fsi, out.f_fsa);
  return out;
}

std::string report_to_json(const EvaluationReport& report) {
  json counts = json::array();
  for (const auto& row : report.counts) {
    counts.push_back(json::array({row[0], row[1], row[2]}));
  }
  json j{{"f_sm", report.f_sm},
         {"f_fsi", report.f_fsi},
         {"f_fsa", report.f_fsa},
         {"interpretation_score", report.interpretation_score},
         {"f_final", report.f_final},
         {"per_class_f1", report.per_class_f1},
         {"confusion", std::move(counts)},
         {"fsa_degenerate", report.fsa_degenerate},
         {"conventions",
          {{"empty_predicted_set", "precision 0"},
           {"empty_gold_set", "recall 0"},
           {"zero_precision_plus_recall", "f1 0"},
           {"both_sets_empty", "f1 1"},
           {"class_absent_everywhere", "class f1 0, kept in macro mean"},
           {"fsa_eligibility", "gold label in {match, partial_match}"},
           {"fold_aggregation", "unweighted mean of fold metrics"}}}};
  if (report.fold_id) {
    j["fold_id"] = *report.fold_id;
  } else {
    j["fold_id"] = nullptr;
  }
  return j.dump(2);
}

EvaluationReport report_from_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorKind::kParse, "malformed report JSON");
  }
  EvaluationReport report;
  try {
    report.f_sm = j.at("f_sm").get<double>();
    report.f_fsi = j.at("f_fsi").get<double>();
    report.f_fsa = j.at("f_fsa").get<double>();
    report.interpretation_score = j.at("interpretation_score").get<double>();
    report.f_final = j.at("f_final").get<double>();
    report.per_class_f1 = j.at("per_class_f1").get<std::array<double, 3>>();
    auto counts = j.at("confusion");
    for (size_t g = 0; g < 3; ++g) {
      for (size_t p = 0; p < 3; ++p) {
        report.counts[g][p] = counts.at(g).at(p).get<int>();
      }
    }
    report.fsa_degenerate = j.value("fsa_degenerate", false);
    if (j.contains("fold_id") && !j["fold_id"].is_null()) {
      report.fold_id = j["fold_id"].get<int>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("report JSON: ") + e.what());
  }
  return report;
}

std::string format_report_table(
    const std::vector<EvaluationReport>& fold_reports,
    const EvaluationReport* aggregate) {
  std::ostringstream out;
  auto pct = [](double v) {
    std::ostringstream cell;
    cell.setf(std::ios::fixed);
    cell.precision(2);
    cell << v * 100.0;
    std::string s = cell.str();
    while (s.size() < 6) s.insert(s.begin(), ' ');
    return s;
  };
  auto row = [&](const std::string& name, const EvaluationReport& r) {
    out << name;
    for (size_t i = name.size(); i < 8; ++i) out << ' ';
    out << pct(r.f_sm) << "  " << pct(r.interpretation_score) << "  "
        << pct(r.f_final) << "\n";
  };
  out << "fold     match  interp   final\n";
  for (const auto& r : fold_reports) {
    row(r.fold_id ? std::to_string(*r.fold_id) : std::string("-"), r);
  }
  if (aggregate) row("mean", *aggregate);
  return out.str();
}

}  // namespace casematch
