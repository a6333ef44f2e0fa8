#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "casematch/errors.hpp"
#include "casematch/metrics.hpp"
#include "casematch/rng.hpp"

using namespace casematch;
using namespace casematch::testing;

TEST_CASE("set_f1 conventions") {
  CHECK(set_f1<int>({1, 3, 5}, {1, 3, 5}).f1 == 1.0);
  auto partial = set_f1<int>({1, 2, 3}, {1, 3, 5});
  CHECK(partial.precision == doctest::Approx(2.0 / 3));
  CHECK(partial.recall == doctest::Approx(2.0 / 3));
  CHECK(partial.f1 == doctest::Approx(2.0 / 3));
  CHECK(set_f1<int>({}, {1}).f1 == 0.0);
  CHECK(set_f1<int>({1}, {}).f1 == 0.0);
  auto both_empty = set_f1<int>({}, {});
  CHECK(both_empty.f1 == 1.0);
  CHECK(both_empty.precision == 1.0);
  CHECK(set_f1<int>({2}, {1}).f1 == 0.0);
}

TEST_CASE("macro_f1_matching hand-checked instance") {
  std::vector<int> gold{0, 0, 1, 1, 2, 2};
  std::vector<int> predicted{0, 1, 1, 2, 2, 0};
  auto score = macro_f1_matching(predicted, gold);
  CHECK(score.per_class_f1[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(score.per_class_f1[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(score.per_class_f1[2] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(score.f_sm == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(score.confusion[0][0] == 1);
  CHECK(score.confusion[0][1] == 1);
  CHECK(score.confusion[1][2] == 1);
}

TEST_CASE("macro_f1_matching conventions and contracts") {
  // Perfect prediction over all classes.
  CHECK(macro_f1_matching({0, 1, 2}, {0, 1, 2}).f_sm == 1.0);
  // A class absent everywhere scores zero but stays in the mean.
  auto score = macro_f1_matching({0, 0}, {0, 0});
  CHECK(score.per_class_f1[0] == 1.0);
  CHECK(score.per_class_f1[1] == 0.0);
  CHECK(score.f_sm == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK_THROWS_AS(macro_f1_matching({0}, {0, 1}), Error);
  CHECK_THROWS_AS(macro_f1_matching({3}, {0}), Error);
}

TEST_CASE("fsi_score averages per-case set F1") {
  CHECK(fsi_score({{1, 2}, {0}}, {{1, 2}, {0}}) == 1.0);
  // One perfect case and one at 2/3 average to 5/6.
  double score = fsi_score({{1, 2}, {1, 2, 3}}, {{1, 2}, {1, 3, 5}});
  CHECK(score == doctest::Approx(5.0 / 6).epsilon(1e-12));
  CHECK_THROWS_AS(fsi_score({{1}}, {{1}, {2}}), Error);
}

TEST_CASE("fsa_score scopes to gold match and partial-match pairs") {
  std::vector<FsaInstance> instances;
  instances.push_back({{{1, 1}}, {{1, 1}, {3, 5}}, MatchLabel::kMatch});
  // A not-match pair with garbage predictions must not affect the score.
  instances.push_back({{{7, 7}}, {}, MatchLabel::kNotMatch});
  double score = fsa_score(instances);
  CHECK(score == doctest::Approx(2.0 / 3).epsilon(1e-12));

  SUBCASE("prediction changes on ineligible pairs are invisible") {
    instances[1].predicted = {};
    CHECK(fsa_score(instances) == doctest::Approx(score).epsilon(1e-15));
  }
  SUBCASE("no eligible pairs degenerates to 1 with a flag") {
    std::vector<FsaInstance> only_not{{{}, {}, MatchLabel::kNotMatch}};
    bool degenerate = false;
    CHECK(fsa_score(only_not, &degenerate) == 1.0);
    CHECK(degenerate);
  }
}

TEST_CASE("final_score matches the reported table rows") {
  double baseline = final_score(0.6538, 0.2237, 0.2237);
  CHECK(std::fabs(baseline - 0.4388) < 5e-4);
  double best = final_score(0.7174, 0.8207, 0.8207);
  CHECK(std::fabs(best - 0.7691) < 5e-4);
  CHECK(final_score(1.0, 1.0, 1.0) == 1.0);
  CHECK_THROWS_AS(final_score(1.2, 0.0, 0.0), Error);
}

TEST_CASE("metric implementations match brute force on random instances") {
  Rng rng(2024);

  SUBCASE("macro f1") {
    for (int trial = 0; trial < 200; ++trial) {
      size_t n = 1 + rng.below(10);
      std::vector<int> gold(n), predicted(n);
      for (size_t i = 0; i < n; ++i) {
        gold[i] = static_cast<int>(rng.below(3));
        predicted[i] = static_cast<int>(rng.below(3));
      }
      double ours = macro_f1_matching(predicted, gold).f_sm;
      double brute = brute_force_macro_f1(predicted, gold);
      CHECK(std::fabs(ours - brute) <= 1e-12);
    }
  }

  SUBCASE("fsi score") {
    for (int trial = 0; trial < 200; ++trial) {
      size_t cases = 1 + rng.below(10);
      std::vector<std::set<int>> predicted(cases), gold(cases);
      for (size_t i = 0; i < cases; ++i) {
        size_t n_sentences = 1 + rng.below(8);
        for (size_t s = 0; s < n_sentences; ++s) {
          if (rng.next_unit() < 0.4) predicted[i].insert(static_cast<int>(s));
          if (rng.next_unit() < 0.4) gold[i].insert(static_cast<int>(s));
        }
      }
      double ours = fsi_score(predicted, gold);
      double brute = brute_force_fsi(predicted, gold);
      CHECK(std::fabs(ours - brute) <= 1e-12);
    }
  }

  SUBCASE("fsa score") {
    for (int trial = 0; trial < 200; ++trial) {
      size_t n = 1 + rng.below(10);
      std::vector<FsaInstance> instances(n);
      bool any_eligible = false;
      for (auto& inst : instances) {
        inst.gold_label = static_cast<MatchLabel>(rng.below(3));
        any_eligible =
            any_eligible || inst.gold_label != MatchLabel::kNotMatch;
        size_t m = 1 + rng.below(4), l = 1 + rng.below(4);
        for (size_t i = 0; i < m; ++i) {
          for (size_t j = 0; j < l; ++j) {
            if (rng.next_unit() < 0.3) {
              inst.predicted.emplace(static_cast<int>(i),
                                     static_cast<int>(j));
            }
            if (inst.gold_label != MatchLabel::kNotMatch &&
                rng.next_unit() < 0.3) {
              inst.gold.emplace(static_cast<int>(i), static_cast<int>(j));
            }
          }
        }
      }
      if (!any_eligible) continue;
      double ours = fsa_score(instances);
      double brute = brute_force_fsa(instances);
      CHECK(std::fabs(ours - brute) <= 1e-12);
    }
  }
}

TEST_CASE("scores are permutation invariant") {
  Rng rng(55);
  std::vector<int> gold, predicted;
  for (int i = 0; i < 30; ++i) {
    gold.push_back(static_cast<int>(rng.below(3)));
    predicted.push_back(static_cast<int>(rng.below(3)));
  }
  double base = macro_f1_matching(predicted, gold).f_sm;
  std::vector<size_t> order(gold.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<int> gold_shuffled, predicted_shuffled;
  for (size_t i : order) {
    gold_shuffled.push_back(gold[i]);
    predicted_shuffled.push_back(predicted[i]);
  }
  CHECK(macro_f1_matching(predicted_shuffled, gold_shuffled).f_sm ==
        doctest::Approx(base).epsilon(1e-15));
}

TEST_CASE("evaluate_predictions checks id alignment") {
  SyntheticSpec spec;
  spec.n_pairs = 12;
  auto corpus = generate_corpus(spec);
  std::vector<PredictionRecord> perfect;
  for (const auto& pair : corpus) {
    PredictionRecord r;
    r.pair_id = pair.pair_id;
    r.case_a = pair.case_a;
    r.case_b = pair.case_b;
    r.pred_label = static_cast<int>(pair.match_label);
    r.pred_features_a = pair.gold_features_a;
    r.pred_features_b = pair.gold_features_b;
    r.pred_aligned = pair.gold_aligned;
    perfect.push_back(std::move(r));
  }
  auto report = evaluate_predictions(perfect, corpus);
  CHECK(report.f_sm == 1.0);
  CHECK(report.f_fsi == 1.0);
  CHECK(report.f_fsa == 1.0);
  CHECK(report.f_final == 1.0);

  auto missing = perfect;
  missing.pop_back();
  CHECK_THROWS_WITH_AS(evaluate_predictions(missing, corpus),
                       doctest::Contains(corpus.back().pair_id), Error);
}

TEST_CASE("aggregate_folds averages metrics and keeps the identity") {
  EvaluationReport a;
  a.f_sm = 0.6;
  a.f_fsi = 0.8;
  a.f_fsa = 0.4;
  a.interpretation_score = 0.6;
  a.f_final = final_score(a.f_sm, a.f_fsi, a.f_fsa);
  EvaluationReport b = a;
  b.f_sm = 0.8;
  b.f_final = final_score(b.f_sm, b.f_fsi, b.f_fsa);

  SUBCASE("identical reports aggregate to themselves") {
    auto agg = aggregate_folds({a, a});
    CHECK(agg.f_sm == doctest::Approx(a.f_sm));
    CHECK(agg.f_final == doctest::Approx(a.f_final));
  }
  SUBCASE("mean of two folds") {
    auto agg = aggregate_folds({a, b});
    CHECK(agg.f_sm == doctest::Approx(0.7));
    CHECK(agg.f_final ==
          doctest::Approx(0.5 * 0.7 + 0.25 * (0.8 + 0.4)).epsilon(1e-12));
    // Linearity keeps the identity after averaging.
    CHECK(std::fabs(agg.f_final -
                    (0.5 * agg.f_sm + 0.25 * (agg.f_fsi + agg.f_fsa))) <
          1e-12);
  }
}

TEST_CASE("report json round-trips") {
  EvaluationReport report;
  report.f_sm = 0.625;
  report.f_fsi = 0.75;
  report.f_fsa = 0.5;
  report.interpretation_score = 0.625;
  report.f_final = final_score(0.625, 0.75, 0.5);
  report.per_class_f1 = {0.5, 0.625, 0.75};
  report.counts[1][2] = 4;
  report.fold_id = 3;
  auto text = report_to_json(report);
  auto loaded = report_from_json(text);
  CHECK(loaded.f_sm == report.f_sm);
  CHECK(loaded.f_final == report.f_final);
  CHECK(loaded.per_class_f1 == report.per_class_f1);
  CHECK(loaded.counts[1][2] == 4);
  CHECK(loaded.fold_id == 3);
}

TEST_CASE("report table mirrors the percentage layout") {
  EvaluationReport report;
  report.f_sm = 0.6538;
  report.f_fsi = 0.2237;
  report.f_fsa = 0.2237;
  report.interpretation_score = 0.2237;
  report.f_final = final_score(0.6538, 0.2237, 0.2237);
  report.fold_id = 0;
  std::string table = format_report_table({report}, nullptr);
  CHECK(table.find("65.38") != std::string::npos);
  CHECK(table.find("22.37") != std::string::npos);
  CHECK(table.find("43.87") != std::string::npos);
}
