#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "../support/oracles.hpp"
#include "casematch/corpus.hpp"
#include "casematch/errors.hpp"
#include "casematch/fsi.hpp"
#include "casematch/synthetic.hpp"

using namespace casematch;
using namespace casematch::testing;

TEST_CASE("select_from_scores applies threshold then fallback") {
  SUBCASE("scores above threshold are kept in index order") {
    auto s = select_from_scores("c", {0.9, 0.2, 0.7}, 0.5, 3);
    CHECK(s.indices == std::vector<int>{0, 2});
    CHECK_FALSE(s.fallback_used);
    CHECK(s.probabilities == std::vector<double>{0.9, 0.2, 0.7});
  }
  SUBCASE("all below threshold falls back to top-k") {
    auto s = select_from_scores("c", {0.2, 0.5, 0.1, 0.4, 0.3}, 0.5, 3);
    CHECK(s.fallback_used);
    CHECK(s.indices == std::vector<int>{1, 3, 4});
  }
  SUBCASE("fallback caps at the sentence count") {
    auto s = select_from_scores("c", {0.2, 0.1}, 0.5, 3);
    CHECK(s.indices == std::vector<int>{0, 1});
    CHECK(s.fallback_used);
  }
  SUBCASE("fallback ties go to the lower index") {
    auto s = select_from_scores("c", {0.3, 0.3, 0.3, 0.3}, 0.5, 2);
    CHECK(s.indices == std::vector<int>{0, 1});
  }
  SUBCASE("a score exactly at the threshold is excluded") {
    auto s = select_from_scores("c", {0.5, 0.6}, 0.5, 1);
    CHECK(s.indices == std::vector<int>{1});
    CHECK_FALSE(s.fallback_used);
  }
  SUBCASE("raising the threshold never adds an index") {
    std::vector<double> scores{0.1, 0.8, 0.45, 0.62, 0.5};
    auto base = select_from_scores("c", scores, 0.3, 3);
    for (double t : {0.4, 0.5, 0.6, 0.7}) {
      auto tightened = select_from_scores("c", scores, t, 3);
      if (tightened.fallback_used) continue;
      for (int idx : tightened.indices) {
        CHECK(std::count(base.indices.begin(), base.indices.end(), idx) == 1);
      }
    }
  }
}

TEST_CASE("zero-weight head scores every sentence 0.5") {
  Encoder encoder(EncoderConfig{});
  FsiModel model(&encoder);
  model.set_head(ClassifierHead::zeros(2, 1024));
  Sentence s{0, "本院认为如下。"};
  CHECK(model.score_sentence(s) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(model.score_sentence(s) == model.score_sentence(s));
}

TEST_CASE("scoring without a head is a state error") {
  Encoder encoder(EncoderConfig{});
  FsiModel model(&encoder);
  CHECK_FALSE(model.has_head());
  CHECK_THROWS_AS(model.score_sentence(Sentence{0, "句子"}), Error);
  CHECK_THROWS_AS(model.select_features(Case{"c", {Sentence{0, "句子"}}}),
                  Error);
}

TEST_CASE("selection_from_gold marks gold indices") {
  Case c;
  c.case_id = "c";
  for (int i = 0; i < 4; ++i) c.sentences.push_back(Sentence{i, "句。"});
  auto sel = selection_from_gold(c, {3, 1});
  CHECK(sel.indices == std::vector<int>{1, 3});
  CHECK(sel.probabilities == std::vector<double>{0.0, 1.0, 0.0, 1.0});
}

TEST_CASE("train_fsi rejects degenerate datasets") {
  Encoder encoder(EncoderConfig{});
  TrainingConfig config;
  CHECK_THROWS_AS(train_fsi({}, encoder, config, FgmConfig{}), Error);
  std::vector<FsiExample> single_class{{"c", Sentence{0, "甲。"}, 1},
                                       {"c", Sentence{1, "乙。"}, 1}};
  CHECK_THROWS_WITH_AS(train_fsi(single_class, encoder, config, FgmConfig{}),
                       doctest::Contains("both classes"), Error);
}

TEST_CASE("trained identification separates marked sentences") {
  SyntheticSpec spec;
  spec.n_pairs = 60;
  spec.seed = 5;
  auto pairs = generate_corpus(spec);
  // Held-out split: train on the first 48 pairs, test on the rest.
  std::vector<CasePair> train(pairs.begin(), pairs.begin() + 48);
  std::vector<CasePair> test(pairs.begin() + 48, pairs.end());

  // The marker-token oracle must find the corpus separable first.
  auto oracle = score_oracle(spec, test);
  REQUIRE(oracle.fsi >= 0.9);

  EncoderConfig encoder_config;
  encoder_config.dim = 512;
  Encoder encoder(encoder_config);
  TrainingConfig config;
  config.seed = 7;
  ClassifierHead head =
      train_fsi(build_fsi_dataset(train), encoder, config, FgmConfig{});
  FsiModel model(&encoder);
  model.set_head(head);

  std::vector<std::set<int>> predicted, gold;
  for (const auto& pair : test) {
    for (const Case* c : {&pair.case_a, &pair.case_b}) {
      auto sel = model.select_features(*c);
      predicted.emplace_back(sel.indices.begin(), sel.indices.end());
      gold.push_back(c == &pair.case_a ? pair.gold_features_a
                                       : pair.gold_features_b);
    }
  }
  CHECK(fsi_score(predicted, gold) >= 0.95);

  // Marked held-out sentences score above 0.5.
  const auto& sample = test.front();
  for (int idx : sample.gold_features_a) {
    CHECK(model.score_sentence(
              sample.case_a.sentences[static_cast<size_t>(idx)]) > 0.5);
  }
}

TEST_CASE("fgm toggle trains to completion either way") {
  SyntheticSpec spec;
  spec.n_pairs = 24;
  spec.seed = 11;
  auto dataset = build_fsi_dataset(generate_corpus(spec));
  EncoderConfig encoder_config;
  encoder_config.dim = 256;
  Encoder encoder(encoder_config);
  TrainingConfig config;
  config.epochs = 2;
  config.seed = 3;
  FgmConfig off;
  FgmConfig on;
  on.enabled = true;
  ClassifierHead head_off = train_fsi(dataset, encoder, config, off);
  ClassifierHead head_on = train_fsi(dataset, encoder, config, on);
  CHECK(head_off.weight.size() == head_on.weight.size());
  CHECK(head_off.weight != head_on.weight);
}
