#include "casematch/corpus.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "casematch/errors.hpp"
#include "casematch/rng.hpp"
#include "casematch/text.hpp"

namespace casematch {

using nlohmann::json;

MatchLabel match_label_from_int(int value) {
  if (value < 0 || value > 2) {
    throw Error(ErrorKind::kValidation,
                "match label must be 0, 1 or 2, got " + std::to_string(value));
  }
  return static_cast<MatchLabel>(value);
}

std::vector<Sentence> segment_sentences(const std::string& raw_text) {
  std::vector<Sentence> sentences;
  auto offsets = utf8_offsets(raw_text);
  size_t n = offsets.size() - 1;
  size_t segment_begin = 0;  // byte offset of current segment start
  auto flush = [&](size_t content_end, size_t segment_end) {
    std::string_view content(raw_text.data() + segment_begin,
                             content_end - segment_begin);
    if (!trim_whitespace(content).empty()) {
      std::string_view segment(raw_text.data() + segment_begin,
                               segment_end - segment_begin);
      Sentence s;
      s.index = static_cast<int>(sentences.size());
      s.text = std::string(trim_whitespace(segment));
      sentences.push_back(std::move(s));
    }
    segment_begin = segment_end;
  };
  for (size_t i = 0; i < n; ++i) {
    std::string_view ch(raw_text.data() + offsets[i],
                        offsets[i + 1] - offsets[i]);
    if (is_terminal_punctuation(ch)) {
      flush(offsets[i], offsets[i + 1]);
    }
  }
  if (segment_begin < raw_text.size()) {
    flush(raw_text.size(), raw_text.size());
  }
  return sentences;
}

namespace {

void validate_case(const Case& c, const std::string& pair_id,
                   const std::string& field) {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorKind::kValidation,
                "pair " + pair_id + ": " + field + ": " + what);
  };
  if (c.case_id.empty()) fail("case_id is empty");
  if (c.sentences.empty()) fail("case has no sentences");
  for (size_t i = 0; i < c.sentences.size(); ++i) {
    const Sentence& s = c.sentences[i];
    if (s.index != static_cast<int>(i)) {
      fail("sentence indices are not contiguous at position " +
           std::to_string(i));
    }
    if (trim_whitespace(s.text).empty()) {
      fail("sentence " + std::to_string(i) + " is empty after trimming");
    }
    if (utf8_contains(s.text, kSeparatorToken)) {
      fail("sentence " + std::to_string(i) +
           " contains the reserved separator character U+241F");
    }
  }
}

void validate_feature_set(const std::set<int>& features, const Case& c,
                          const std::string& pair_id,
                          const std::string& field) {
  for (int idx : features) {
    if (idx < 0 || idx >= static_cast<int>(c.sentences.size())) {
      throw Error(ErrorKind::kValidation,
                  "pair " + pair_id + ": " + field + ": index " +
                      std::to_string(idx) + " out of range");
    }
  }
}

}  // namespace

void validate_pair(const CasePair& pair) {
  if (pair.pair_id.empty()) {
    throw Error(ErrorKind::kValidation, "pair with empty pair_id");
  }
  validate_case(pair.case_a, pair.pair_id, "case_a");
  validate_case(pair.case_b, pair.pair_id, "case_b");
  validate_feature_set(pair.gold_features_a, pair.case_a, pair.pair_id,
                       "features_a");
  validate_feature_set(pair.gold_features_b, pair.case_b, pair.pair_id,
                       "features_b");
  for (const auto& [ia, ib] : pair.gold_aligned) {
    if (pair.gold_features_a.count(ia) == 0) {
      throw Error(ErrorKind::kValidation,
                  "pair " + pair.pair_id + ": aligned: index " +
                      std::to_string(ia) + " not in features_a");
    }
    if (pair.gold_features_b.count(ib) == 0) {
      throw Error(ErrorKind::kValidation,
                  "pair " + pair.pair_id + ": aligned: index " +
                      std::to_string(ib) + " not in features_b");
    }
  }
  if (pair.match_label == MatchLabel::kNotMatch && !pair.gold_aligned.empty()) {
    throw Error(ErrorKind::kValidation,
                "pair " + pair.pair_id +
                    ": aligned: must be empty for a not-match pair");
  }
}

namespace {

json case_to_json(const Case& c) {
  json sentences = json::array();
  for (const auto& s : c.sentences) sentences.push_back(s.text);
  return json{{"case_id", c.case_id}, {"sentences", std::move(sentences)}};
}

Case case_from_json(const json& j) {
  Case c;
  c.case_id = j.at("case_id").get<std::string>();
  int index = 0;
  for (const auto& text : j.at("sentences")) {
    c.sentences.push_back(Sentence{index++, text.get<std::string>()});
  }
  return c;
}

json index_pairs_to_json(const std::set<IndexPair>& pairs) {
  json out = json::array();
  for (const auto& [a, b] : pairs) out.push_back(json::array({a, b}));
  return out;
}

std::set<IndexPair> index_pairs_from_json(const json& j) {
  std::set<IndexPair> out;
  for (const auto& entry : j) {
    if (!entry.is_array() || entry.size() != 2) {
      throw Error(ErrorKind::kParse, "aligned entry must be a 2-element array");
    }
    out.emplace(entry[0].get<int>(), entry[1].get<int>());
  }
  return out;
}

json pair_to_json(const CasePair& pair) {
  return json{{"pair_id", pair.pair_id},
              {"case_a", case_to_json(pair.case_a)},
              {"case_b", case_to_json(pair.case_b)},
              {"label", static_cast<int>(pair.match_label)},
              {"features_a", pair.gold_features_a},
              {"features_b", pair.gold_features_b},
              {"aligned", index_pairs_to_json(pair.gold_aligned)}};
}

CasePair pair_from_json(const json& j) {
  CasePair pair;
  pair.pair_id = j.at("pair_id").get<std::string>();
  pair.case_a = case_from_json(j.at("case_a"));
  pair.case_b = case_from_json(j.at("case_b"));
  pair.match_label = match_label_from_int(j.at("label").get<int>());
  pair.gold_features_a = j.at("features_a").get<std::set<int>>();
  pair.gold_features_b = j.at("features_b").get<std::set<int>>();
  pair.gold_aligned = index_pairs_from_json(j.at("aligned"));
  return pair;
}

std::vector<json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kValidation, "cannot open file: " + path);
  }
  std::vector<json> lines;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim_whitespace(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw Error(ErrorKind::kParse, path + ": line " +
                                         std::to_string(line_number) +
                                         ": malformed JSON");
    }
    lines.push_back(std::move(j));
  }
  return lines;
}

}  // namespace

std::vector<CasePair> load_dataset(const std::string& path) {
  std::vector<CasePair> pairs;
  int line_number = 0;
  for (const auto& j : read_jsonl(path)) {
    ++line_number;
    try {
      pairs.push_back(pair_from_json(j));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kParse, path + ": line " +
                                         std::to_string(line_number) + ": " +
                                         e.what());
    }
    validate_pair(pairs.back());
  }
  return pairs;
}

void save_dataset(const std::string& path, const std::vector<CasePair>& pairs) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorKind::kValidation, "cannot write file: " + path);
  }
  for (const auto& pair : pairs) {
    out << pair_to_json(pair).dump() << "\n";
  }
}

std::vector<PredictionRecord> load_predictions(const std::string& path) {
  std::vector<PredictionRecord> records;
  int line_number = 0;
  for (const auto& j : read_jsonl(path)) {
    ++line_number;
    try {
      PredictionRecord r;
      r.pair_id = j.at("pair_id").get<std::string>();
      r.case_a = case_from_json(j.at("case_a"));
      r.case_b = case_from_json(j.at("case_b"));
      r.pred_label = j.at("pred_label").get<int>();
      if (r.pred_label < 0 || r.pred_label > 2) {
        throw Error(ErrorKind::kValidation,
                    path + ": line " + std::to_string(line_number) +
                        ": pred_label out of range");
      }
      r.pred_features_a = j.at("pred_features_a").get<std::set<int>>();
      r.pred_features_b = j.at("pred_features_b").get<std::set<int>>();
      r.pred_aligned = index_pairs_from_json(j.at("pred_aligned"));
      records.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kParse, path + ": line " +
                                         std::to_string(line_number) + ": " +
                                         e.what());
    }
  }
  return records;
}

void save_predictions(const std::string& path,
                      const std::vector<PredictionRecord>& records) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorKind::kValidation, "cannot write file: " + path);
  }
  for (const auto& r : records) {
    json j{{"pair_id", r.pair_id},
           {"case_a", case_to_json(r.case_a)},
           {"case_b", case_to_json(r.case_b)},
           {"pred_label", r.pred_label},
           {"pred_features_a", r.pred_features_a},
           {"pred_features_b", r.pred_features_b},
           {"pred_aligned", index_pairs_to_json(r.pred_aligned)}};
    out << j.dump() << "\n";
  }
}

std::vector<FoldSplit> stratified_kfold(const std::vector<CasePair>& pairs,
                                        int k, uint64_t seed) {
  if (k < 2) {
    throw Error(ErrorKind::kConfig,
                "k must be at least 2, got " + std::to_string(k));
  }
  // Group pair ids by label, preserving input order within each class.
  std::map<int, std::vector<std::string>> by_label;
  for (const auto& pair : pairs) {
    by_label[static_cast<int>(pair.match_label)].push_back(pair.pair_id);
  }
  for (const auto& [label, ids] : by_label) {
    if (static_cast<int>(ids.size()) < k) {
      throw Error(ErrorKind::kConfig,
                  "label class " + std::to_string(label) + " has " +
                      std::to_string(ids.size()) + " members, need at least " +
                      std::to_string(k));
    }
  }

  Rng rng(seed);
  std::vector<std::vector<std::string>> test_sets(static_cast<size_t>(k));
  // The fold cursor carries over between classes so that total fold sizes
  // stay within one of each other.
  size_t cursor = 0;
  for (auto& [label, ids] : by_label) {
    rng.shuffle(ids);
    for (auto& id : ids) {
      test_sets[cursor % static_cast<size_t>(k)].push_back(std::move(id));
      ++cursor;
    }
  }

  std::vector<FoldSplit> folds;
  folds.reserve(static_cast<size_t>(k));
  for (int f = 0; f < k; ++f) {
    FoldSplit fold;
    fold.fold_id = f;
    std::set<std::string> test_ids(test_sets[static_cast<size_t>(f)].begin(),
                                   test_sets[static_cast<size_t>(f)].end());
    for (const auto& pair : pairs) {
      if (test_ids.count(pair.pair_id)) {
        fold.test_pair_ids.push_back(pair.pair_id);
      } else {
        fold.train_pair_ids.push_back(pair.pair_id);
      }
    }
    folds.push_back(std::move(fold));
  }
  return folds;
}

std::vector<FsiExample> build_fsi_dataset(const std::vector<CasePair>& pairs) {
  struct CaseEntry {
    const Case* c;
    const std::set<int>* gold;
  };
  std::vector<std::pair<std::string, CaseEntry>> ordered;
  std::map<std::string, CaseEntry> seen;
  auto add_case = [&](const Case& c, const std::set<int>& gold,
                      const std::string& pair_id) {
    auto it = seen.find(c.case_id);
    if (it == seen.end()) {
      CaseEntry entry{&c, &gold};
      seen.emplace(c.case_id, entry);
      ordered.emplace_back(c.case_id, entry);
      return;
    }
    // Same case repeated across pairs: sentence lists and gold sets must
    // agree exactly.
    const CaseEntry& prev = it->second;
    bool same_sentences =
        prev.c->sentences.size() == c.sentences.size();
    if (same_sentences) {
      for (size_t i = 0; i < c.sentences.size(); ++i) {
        if (prev.c->sentences[i].text != c.sentences[i].text) {
          same_sentences = false;
          break;
        }
      }
    }
    if (!same_sentences || *prev.gold != gold) {
      throw Error(ErrorKind::kValidation,
                  "case " + c.case_id + " (pair " + pair_id +
                      ") conflicts with an earlier occurrence of the same "
                      "case_id");
    }
  };
  for (const auto& pair : pairs) {
    add_case(pair.case_a, pair.gold_features_a, pair.pair_id);
    add_case(pair.case_b, pair.gold_features_b, pair.pair_id);
  }

  std::vector<FsiExample> examples;
  for (const auto& [case_id, entry] : ordered) {
    for (const auto& sentence : entry.c->sentences) {
      FsiExample ex;
      ex.case_id = case_id;
      ex.sentence = sentence;
      ex.label = entry.gold->count(sentence.index) ? 1 : 0;
      examples.push_back(std::move(ex));
    }
  }
  return examples;
}

std::vector<AlignExample> build_alignment_dataset(
    const std::vector<CasePair>& pairs) {
  std::vector<AlignExample> examples;
  for (const auto& pair : pairs) {
    for (int ia : pair.gold_features_a) {
      for (int ib : pair.gold_features_b) {
        AlignExample ex;
        ex.pair_id = pair.pair_id;
        ex.sentence_a = pair.case_a.sentences[static_cast<size_t>(ia)];
        ex.sentence_b = pair.case_b.sentences[static_cast<size_t>(ib)];
        ex.label = pair.gold_aligned.count({ia, ib}) ? 1 : 0;
        examples.push_back(std::move(ex));
      }
    }
  }
  return examples;
}

}  // namespace casematch
