#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <map>

#include "casematch/corpus.hpp"
#include "casematch/errors.hpp"
#include "casematch/rng.hpp"
#include "casematch/synthetic.hpp"

using namespace casematch;

namespace {

Case make_case(const std::string& id, std::vector<std::string> texts) {
  Case c;
  c.case_id = id;
  int index = 0;
  for (auto& t : texts) c.sentences.push_back(Sentence{index++, std::move(t)});
  return c;
}

CasePair make_pair(const std::string& id, MatchLabel label) {
  CasePair pair;
  pair.pair_id = id;
  pair.case_a = make_case(id + "a", {"甲一。", "甲二。", "甲三。"});
  pair.case_b = make_case(id + "b", {"乙一。", "乙二。"});
  pair.match_label = label;
  pair.gold_features_a = {0, 2};
  pair.gold_features_b = {1};
  if (label != MatchLabel::kNotMatch) pair.gold_aligned = {{0, 1}};
  return pair;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("segment_sentences splits on terminal punctuation") {
  auto sentences = segment_sentences("甲。乙！");
  REQUIRE(sentences.size() == 2);
  CHECK(sentences[0].text == "甲。");
  CHECK(sentences[1].text == "乙！");
  CHECK(sentences[0].index == 0);
  CHECK(sentences[1].index == 1);
}

TEST_CASE("segment_sentences degenerate cases") {
  auto no_delim = segment_sentences("没有标点");
  REQUIRE(no_delim.size() == 1);
  CHECK(no_delim[0].text == "没有标点");

  CHECK(segment_sentences("。。").empty());
  CHECK(segment_sentences("。；！？").empty());

  auto trailing = segment_sentences("甲。尾巴");
  REQUIRE(trailing.size() == 2);
  CHECK(trailing[1].text == "尾巴");
}

TEST_CASE("validate_pair enforces the invariants") {
  CasePair ok = make_pair("p1", MatchLabel::kMatch);
  CHECK_NOTHROW(validate_pair(ok));

  CasePair bad_aligned = ok;
  bad_aligned.gold_aligned = {{1, 1}};  // 1 not in gold_features_a
  CHECK_THROWS_WITH_AS(validate_pair(bad_aligned),
                       doctest::Contains("not in features_a"), Error);

  CasePair bad_range = ok;
  bad_range.gold_features_b = {7};
  CHECK_THROWS_WITH_AS(validate_pair(bad_range),
                       doctest::Contains("out of range"), Error);

  CasePair bad_not_match = make_pair("p2", MatchLabel::kNotMatch);
  bad_not_match.gold_aligned = {{0, 1}};
  CHECK_THROWS_WITH_AS(validate_pair(bad_not_match),
                       doctest::Contains("not-match"), Error);

  CasePair empty_sentence = ok;
  empty_sentence.case_a.sentences[1].text = "  ";
  CHECK_THROWS_AS(validate_pair(empty_sentence), Error);

  CasePair with_separator = ok;
  with_separator.case_b.sentences[0].text += std::string(kSeparatorToken);
  CHECK_THROWS_WITH_AS(validate_pair(with_separator),
                       doctest::Contains("separator"), Error);
}

TEST_CASE("dataset save/load round-trips") {
  std::vector<CasePair> pairs{make_pair("p1", MatchLabel::kMatch),
                              make_pair("p2", MatchLabel::kNotMatch)};
  std::string path = temp_path("casematch_corpus_test.jsonl");
  save_dataset(path, pairs);
  auto loaded = load_dataset(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].pair_id == "p1");
  CHECK(loaded[0].case_a.sentences[2].text == "甲三。");
  CHECK(loaded[0].gold_features_a == std::set<int>{0, 2});
  CHECK(loaded[0].gold_aligned == std::set<IndexPair>{{0, 1}});
  CHECK(loaded[1].match_label == MatchLabel::kNotMatch);
  std::filesystem::remove(path);
}

TEST_CASE("load_dataset reports malformed lines by number") {
  std::string path = temp_path("casematch_corpus_bad.jsonl");
  {
    std::vector<CasePair> pairs{make_pair("p1", MatchLabel::kMatch)};
    save_dataset(path, pairs);
    FILE* f = std::fopen(path.c_str(), "a");
    std::fputs("{not json\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_WITH_AS(load_dataset(path), doctest::Contains("line 2"), Error);
  std::filesystem::remove(path);
}

TEST_CASE("stratified_kfold deals one of each label per fold") {
  // 9 pairs, 3 per label, k = 3: every valid outcome puts exactly one pair
  // of each label in every test fold.
  std::vector<CasePair> pairs;
  for (int i = 0; i < 9; ++i) {
    pairs.push_back(make_pair("p" + std::to_string(i),
                              static_cast<MatchLabel>(i % 3)));
  }
  auto folds = stratified_kfold(pairs, 3, 17);
  REQUIRE(folds.size() == 3);
  std::map<std::string, MatchLabel> label_of;
  for (const auto& pair : pairs) label_of[pair.pair_id] = pair.match_label;
  std::set<std::string> seen;
  for (const auto& fold : folds) {
    REQUIRE(fold.test_pair_ids.size() == 3);
    std::map<int, int> counts;
    for (const auto& id : fold.test_pair_ids) {
      counts[static_cast<int>(label_of[id])]++;
      CHECK(seen.insert(id).second);  // disjoint
    }
    CHECK(counts[0] == 1);
    CHECK(counts[1] == 1);
    CHECK(counts[2] == 1);
    CHECK(fold.train_pair_ids.size() == 6);
  }
  CHECK(seen.size() == 9);
}

TEST_CASE("stratified_kfold rejects k < 2 and starving classes") {
  std::vector<CasePair> pairs{make_pair("p1", MatchLabel::kMatch),
                              make_pair("p2", MatchLabel::kNotMatch)};
  CHECK_THROWS_AS(stratified_kfold(pairs, 1, 0), Error);
  CHECK_THROWS_WITH_AS(stratified_kfold(pairs, 2, 0),
                       doctest::Contains("need at least"), Error);
}

TEST_CASE("stratified_kfold is deterministic and balanced") {
  SyntheticSpec spec;
  spec.n_pairs = 100;
  auto pairs = generate_corpus(spec);
  auto folds_a = stratified_kfold(pairs, 5, 42);
  auto folds_b = stratified_kfold(pairs, 5, 42);
  for (size_t f = 0; f < folds_a.size(); ++f) {
    CHECK(folds_a[f].test_pair_ids == folds_b[f].test_pair_ids);
    CHECK(folds_a[f].train_pair_ids == folds_b[f].train_pair_ids);
  }
  auto folds_c = stratified_kfold(pairs, 5, 43);
  bool any_difference = false;
  for (size_t f = 0; f < folds_a.size(); ++f) {
    if (folds_a[f].test_pair_ids != folds_c[f].test_pair_ids) {
      any_difference = true;
    }
  }
  CHECK(any_difference);

  // Fold sizes within one of N/k, label counts within one of even.
  std::map<std::string, int> label_of;
  std::map<int, int> total_per_label;
  for (const auto& pair : pairs) {
    label_of[pair.pair_id] = static_cast<int>(pair.match_label);
    total_per_label[static_cast<int>(pair.match_label)]++;
  }
  for (const auto& fold : folds_a) {
    auto n = static_cast<int>(fold.test_pair_ids.size());
    CHECK(n >= 100 / 5);
    CHECK(n <= 100 / 5 + 1);
    std::map<int, int> counts;
    for (const auto& id : fold.test_pair_ids) counts[label_of[id]]++;
    for (const auto& [label, total] : total_per_label) {
      double expected = total / 5.0;
      CHECK(std::abs(counts[label] - expected) <= 1.0);
    }
  }
}

TEST_CASE("build_fsi_dataset labels and deduplicates") {
  CasePair pair = make_pair("p1", MatchLabel::kMatch);
  auto examples = build_fsi_dataset({pair});
  // 3 + 2 sentences, features {0,2} and {1}.
  REQUIRE(examples.size() == 5);
  int positives = 0;
  for (const auto& ex : examples) positives += ex.label;
  CHECK(positives == 3);

  // Same case in two pairs with identical annotations counts once.
  CasePair again = pair;
  again.pair_id = "p2";
  auto deduped = build_fsi_dataset({pair, again});
  CHECK(deduped.size() == 5);

  // Conflicting gold sets for a repeated case id fail loudly.
  CasePair conflict = pair;
  conflict.pair_id = "p3";
  conflict.gold_features_a = {1};
  conflict.gold_aligned = {};
  conflict.gold_features_b = {1};
  CHECK_THROWS_WITH_AS(build_fsi_dataset({pair, conflict}),
                       doctest::Contains("conflicts"), Error);
}

TEST_CASE("build_alignment_dataset is the labeled cross product") {
  CasePair pair;
  pair.pair_id = "p1";
  pair.case_a = make_case("a", {"一。", "二。", "三。", "四。"});
  pair.case_b = make_case("b", {"壹。", "贰。", "叁。", "肆。", "伍。"});
  pair.match_label = MatchLabel::kMatch;
  pair.gold_features_a = {0, 1, 2};
  pair.gold_features_b = {0, 1, 2, 3};
  pair.gold_aligned = {{0, 0}, {1, 1}, {2, 3}};
  auto examples = build_alignment_dataset({pair});
  REQUIRE(examples.size() == 12);
  int positives = 0;
  for (const auto& ex : examples) positives += ex.label;
  CHECK(positives == 3);

  CasePair not_match = make_pair("p2", MatchLabel::kNotMatch);
  auto negatives = build_alignment_dataset({not_match});
  REQUIRE(negatives.size() == 2);  // 2 x 1 features
  for (const auto& ex : negatives) CHECK(ex.label == 0);
}

TEST_CASE("alignment dataset size and positives properties") {
  SyntheticSpec spec;
  spec.n_pairs = 60;
  auto pairs = generate_corpus(spec);
  auto examples = build_alignment_dataset(pairs);
  size_t expected_size = 0, expected_positives = 0;
  for (const auto& pair : pairs) {
    expected_size += pair.gold_features_a.size() * pair.gold_features_b.size();
    expected_positives += pair.gold_aligned.size();
  }
  CHECK(examples.size() == expected_size);
  size_t positives = 0;
  for (const auto& ex : examples) positives += static_cast<size_t>(ex.label);
  CHECK(positives == expected_positives);
}

TEST_CASE("prediction records round-trip") {
  PredictionRecord record;
  record.pair_id = "p1";
  record.case_a = make_case("a", {"一。"});
  record.case_b = make_case("b", {"壹。", "贰。"});
  record.pred_label = 2;
  record.pred_features_a = {0};
  record.pred_features_b = {1};
  record.pred_aligned = {{0, 1}};
  std::string path = temp_path("casematch_pred_test.jsonl");
  save_predictions(path, {record});
  auto loaded = load_predictions(path);
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0].pred_label == 2);
  CHECK(loaded[0].pred_aligned == record.pred_aligned);
  CHECK(loaded[0].case_b.sentences.size() == 2);
  std::filesystem::remove(path);
}
