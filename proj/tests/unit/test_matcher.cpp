#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unordered_map>

#include "../support/oracles.hpp"
#include "casematch/errors.hpp"
#include "casematch/matcher.hpp"
#include "casematch/metrics.hpp"
#include "casematch/rng.hpp"
#include "casematch/synthetic.hpp"
#include "casematch/text.hpp"

using namespace casematch;
using namespace casematch::testing;

namespace {

Case make_case(const std::string& id, std::vector<std::string> texts) {
  Case c;
  c.case_id = id;
  int index = 0;
  for (auto& t : texts) c.sentences.push_back(Sentence{index++, std::move(t)});
  return c;
}

FeatureSelection selection_of(const Case& c, std::vector<int> indices) {
  FeatureSelection sel;
  sel.case_id = c.case_id;
  sel.indices = std::move(indices);
  sel.probabilities.assign(c.sentences.size(), 0.0);
  for (int idx : sel.indices) {
    sel.probabilities[static_cast<size_t>(idx)] = 1.0;
  }
  return sel;
}

}  // namespace

TEST_CASE("compose_case_text joins sentences") {
  Case c = make_case("c", {"甲。", "乙", "丙！"});
  FeatureSelection all = selection_of(c, {0, 1, 2});
  FeatureSelection some = selection_of(c, {0, 2});

  SUBCASE("selected sentences join in ascending order") {
    CHECK(compose_case_text(c, some, InputSource::kFeatureSentences) ==
          "甲。丙！");
  }
  SUBCASE("a sentence without terminal punctuation gains one") {
    CHECK(compose_case_text(c, all, InputSource::kFeatureSentences) ==
          "甲。乙。丙！");
  }
  SUBCASE("full text ignores the selection") {
    CHECK(compose_case_text(c, some, InputSource::kFullText) == "甲。乙。丙！");
  }
  SUBCASE("selecting everything reduces to full text") {
    CHECK(compose_case_text(c, all, InputSource::kFeatureSentences) ==
          compose_case_text(c, all, InputSource::kFullText));
  }
  SUBCASE("an out-of-range selection index is a contract error") {
    FeatureSelection bad = selection_of(c, {0});
    bad.indices = {5};
    CHECK_THROWS_AS(
        compose_case_text(c, bad, InputSource::kFeatureSentences), Error);
  }
}

TEST_CASE("combine_siamese layout") {
  EmbeddingVector h_a{1.0, 2.0};
  EmbeddingVector h_b{4.0, 0.0};
  CHECK(combine_siamese(h_a, h_b) ==
        EmbeddingVector{1.0, 2.0, 4.0, 0.0, 3.0, 2.0});
  // Identical inputs zero the third block.
  auto same = combine_siamese(h_a, h_a);
  CHECK(same[4] == 0.0);
  CHECK(same[5] == 0.0);
}

TEST_CASE("match_features dimensions and symmetries") {
  EncoderConfig config;
  config.dim = 128;
  Encoder encoder(config);

  CHECK(match_features(encoder, "原告", "被告", MatchMode::kConcat).size() ==
        128);
  CHECK(match_features(encoder, "原告", "被告", MatchMode::kSiamese).size() ==
        3 * 128);
  CHECK(match_features(encoder, "原告", "被告", MatchMode::kMatching).size() ==
        128);
  CHECK(match_feature_dim(config, MatchMode::kSiamese) == 384);
  CHECK(match_feature_dim(config, MatchMode::kConcat) == 128);

  SUBCASE("matching mode commutes exactly") {
    CHECK(match_features(encoder, "原告甲", "被告乙", MatchMode::kMatching) ==
          match_features(encoder, "被告乙", "原告甲", MatchMode::kMatching));
  }
  SUBCASE("siamese third block is the absolute difference") {
    auto h_a = encoder.encode("原告甲", config.max_len_case);
    auto h_b = encoder.encode("被告乙", config.max_len_case);
    auto features =
        match_features(encoder, "原告甲", "被告乙", MatchMode::kSiamese);
    for (size_t i = 0; i < h_a.size(); ++i) {
      CHECK(features[2 * h_a.size() + i] ==
            doctest::Approx(std::abs(h_a[i] - h_b[i])).epsilon(1e-12));
    }
  }
}

TEST_CASE("zero head predicts not-match through the tie break") {
  EncoderConfig config;
  config.dim = 64;
  Encoder encoder(config);
  MatcherModel model(&encoder, MatchMode::kConcat);
  model.set_head(ClassifierHead::zeros(3, 64));
  Case a = make_case("a", {"甲。"});
  Case b = make_case("b", {"乙。"});
  auto sel_a = selection_of(a, {0});
  auto sel_b = selection_of(b, {0});
  auto prediction =
      model.predict(a, b, sel_a, sel_b, InputSource::kFeatureSentences);
  CHECK(prediction.label == MatchLabel::kNotMatch);
  for (double p : prediction.probabilities) {
    CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-12));
  }
}

TEST_CASE("prediction without a head is a state error") {
  Encoder encoder(EncoderConfig{});
  MatcherModel model(&encoder, MatchMode::kSiamese);
  Case a = make_case("a", {"甲。"});
  CHECK_THROWS_AS(model.predict(a, a, selection_of(a, {0}),
                                selection_of(a, {0}),
                                InputSource::kFullText),
                  Error);
}

TEST_CASE("matching-mode prediction is swap invariant") {
  EncoderConfig config;
  config.dim = 64;
  Encoder encoder(config);
  MatcherModel model(&encoder, MatchMode::kMatching);
  ClassifierHead head = ClassifierHead::zeros(3, 64);
  Rng rng(4);
  for (auto& w : head.weight) w = rng.next_unit() - 0.5;
  model.set_head(head);
  Case a = make_case("a", {"原告某某。", "事实如下。"});
  Case b = make_case("b", {"被告某某。"});
  auto sel_a = selection_of(a, {0, 1});
  auto sel_b = selection_of(b, {0});
  auto ab = model.predict(a, b, sel_a, sel_b, InputSource::kFullText);
  auto ba = model.predict(b, a, sel_b, sel_a, InputSource::kFullText);
  CHECK(ab.label == ba.label);
  CHECK(ab.probabilities == ba.probabilities);
}

TEST_CASE("train_matcher requires all three labels") {
  SyntheticSpec spec;
  spec.n_pairs = 12;
  auto pairs = generate_corpus(spec);
  std::vector<CasePair> two_classes;
  for (const auto& pair : pairs) {
    if (pair.match_label != MatchLabel::kMatch) two_classes.push_back(pair);
  }
  EncoderConfig config;
  config.dim = 128;
  Encoder encoder(config);
  std::unordered_map<std::string, FeatureSelection> selections;
  for (const auto& pair : two_classes) {
    selections.emplace(pair.case_a.case_id,
                       selection_from_gold(pair.case_a, pair.gold_features_a));
    selections.emplace(pair.case_b.case_id,
                       selection_from_gold(pair.case_b, pair.gold_features_b));
  }
  CHECK_THROWS_WITH_AS(
      train_matcher(two_classes, selections, encoder, MatchMode::kSiamese,
                    InputSource::kFeatureSentences, TrainingConfig{},
                    FgmConfig{}),
      doctest::Contains("all three labels"), Error);
}

TEST_CASE("trained matcher recovers labels on held-out pairs") {
  SyntheticSpec spec;
  spec.n_pairs = 150;
  spec.seed = 31;
  spec.fool_rate = 0.0;  // pure matching signal for this check
  auto pairs = generate_corpus(spec);
  std::vector<CasePair> train(pairs.begin(), pairs.begin() + 120);
  std::vector<CasePair> test(pairs.begin() + 120, pairs.end());

  auto oracle = score_oracle(spec, test);
  REQUIRE(oracle.matching >= 0.9);

  EncoderConfig encoder_config;
  encoder_config.dim = 1024;
  Encoder encoder(encoder_config);
  std::unordered_map<std::string, FeatureSelection> selections;
  for (const auto& pair : pairs) {
    selections.emplace(pair.case_a.case_id,
                       selection_from_gold(pair.case_a, pair.gold_features_a));
    selections.emplace(pair.case_b.case_id,
                       selection_from_gold(pair.case_b, pair.gold_features_b));
  }
  TrainingConfig config;
  config.seed = 13;
  ClassifierHead head = train_matcher(
      train, selections, encoder, MatchMode::kSiamese,
      InputSource::kFeatureSentences, config, FgmConfig{});
  MatcherModel model(&encoder, MatchMode::kSiamese);
  model.set_head(head);

  std::vector<int> predicted, gold;
  for (const auto& pair : test) {
    auto prediction = model.predict(
        pair.case_a, pair.case_b, selections.at(pair.case_a.case_id),
        selections.at(pair.case_b.case_id), InputSource::kFeatureSentences);
    predicted.push_back(static_cast<int>(prediction.label));
    gold.push_back(static_cast<int>(pair.match_label));
  }
  CHECK(macro_f1_matching(predicted, gold).f_sm >= 0.80);
}

TEST_CASE("matcher training is deterministic") {
  SyntheticSpec spec;
  spec.n_pairs = 24;
  auto pairs = generate_corpus(spec);
  EncoderConfig encoder_config;
  encoder_config.dim = 128;
  Encoder encoder(encoder_config);
  std::unordered_map<std::string, FeatureSelection> selections;
  for (const auto& pair : pairs) {
    selections.emplace(pair.case_a.case_id,
                       selection_from_gold(pair.case_a, pair.gold_features_a));
    selections.emplace(pair.case_b.case_id,
                       selection_from_gold(pair.case_b, pair.gold_features_b));
  }
  TrainingConfig config;
  config.epochs = 2;
  config.seed = 9;
  auto head_a = train_matcher(pairs, selections, encoder, MatchMode::kConcat,
                              InputSource::kFeatureSentences, config,
                              FgmConfig{});
  auto head_b = train_matcher(pairs, selections, encoder, MatchMode::kConcat,
                              InputSource::kFeatureSentences, config,
                              FgmConfig{});
  CHECK(head_a.weight == head_b.weight);
  CHECK(head_a.bias == head_b.bias);
}
