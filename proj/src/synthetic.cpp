#include "casematch/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "casematch/errors.hpp"
#include "casematch/rng.hpp"
#include "casematch/text.hpp"

namespace casematch {

std::vector<std::string> char_range(char32_t start, int count) {
  std::vector<std::string> out;
  out.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    out.push_back(utf8_encode(start + static_cast<char32_t>(i)));
  }
  return out;
}

void SyntheticSpec::validate(int k_folds) const {
  if (n_pairs < 3 * k_folds) {
    throw Error(ErrorKind::kConfig,
                "n_pairs must be at least 3 * k_folds (" +
                    std::to_string(3 * k_folds) + "), got " +
                    std::to_string(n_pairs));
  }
  if (min_sentences < 3 || max_sentences < min_sentences) {
    throw Error(ErrorKind::kConfig,
                "sentences_per_case range must satisfy 3 <= min <= max");
  }
  if (!(feature_rate > 0.0 && feature_rate < 1.0)) {
    throw Error(ErrorKind::kConfig, "feature_rate must lie in (0, 1)");
  }
  if (fool_rate < 0.0 || fool_rate > 1.0) {
    throw Error(ErrorKind::kConfig, "fool_rate must lie in [0, 1]");
  }
  auto check_vocab = [&](const std::vector<std::string>& vocab,
                         const std::string& name) {
    if (vocab.empty()) {
      throw Error(ErrorKind::kConfig, name + " vocabulary is empty");
    }
    for (const auto& token : vocab) {
      if (token.empty() || token.find(kSeparatorToken) != std::string::npos) {
        throw Error(ErrorKind::kConfig,
                    name + " vocabulary contains the reserved separator");
      }
    }
  };
  check_vocab(feature_markers, "feature marker");
  check_vocab(filler_chars, "filler");
  check_vocab(topic_chars, "topic");
  check_vocab(noise_chars, "noise");
  for (const auto& vocab : register_vocab) check_vocab(vocab, "register");
  if (topic_count() < 2 * max_sentences) {
    throw Error(ErrorKind::kConfig,
                "topic vocabulary too small for the sentence range");
  }
}

namespace {

struct CaseDraft {
  int n_sentences = 0;
  std::vector<int> feature_indices;         // ascending
  std::vector<std::string> feature_topics;  // parallel to feature_indices
};

int draw_feature_count(Rng& rng, double rate, int n) {
  double target = rate * static_cast<double>(n);
  int f = static_cast<int>(std::floor(target));
  if (rng.next_unit() < target - std::floor(target)) ++f;
  return std::clamp(f, 2, n);
}

CaseDraft draw_case_shape(Rng& rng, const SyntheticSpec& spec) {
  CaseDraft draft;
  draft.n_sentences = rng.range(spec.min_sentences, spec.max_sentences);
  int f = draw_feature_count(rng, spec.feature_rate, draft.n_sentences);
  draft.feature_indices = rng.sample_indices(draft.n_sentences, f);
  return draft;
}

const std::string& pick(Rng& rng, const std::vector<std::string>& vocab) {
  return vocab[rng.below(vocab.size())];
}

std::string noise_run(Rng& rng, const SyntheticSpec& spec, int lo, int hi) {
  std::string out;
  int n = rng.range(lo, hi);
  for (int i = 0; i < n; ++i) out += pick(rng, spec.noise_chars);
  return out;
}

// Feature sentence: topic token at both ends, marker characters inside.
std::string feature_sentence_text(Rng& rng, const SyntheticSpec& spec,
                                  const std::string& topic,
                                  const std::vector<std::string>& registers) {
  std::string text = topic;
  text += pick(rng, registers);
  text += pick(rng, spec.feature_markers);
  text += pick(rng, spec.feature_markers);
  text += noise_run(rng, spec, 1, 1);
  text += pick(rng, registers);
  text += topic;
  return text;
}

std::string filler_sentence_text(Rng& rng, const SyntheticSpec& spec,
                                 const std::vector<std::string>& registers) {
  std::string text = pick(rng, spec.filler_chars);
  text += pick(rng, spec.filler_chars);
  text += pick(rng, registers);
  text += noise_run(rng, spec, 1, 2);
  text += pick(rng, spec.filler_chars);
  return text;
}

Case materialize_case(Rng& rng, const SyntheticSpec& spec,
                      const CaseDraft& draft, const std::string& case_id,
                      const std::vector<std::string>& registers) {
  Case c;
  c.case_id = case_id;
  size_t feature_pos = 0;
  for (int i = 0; i < draft.n_sentences; ++i) {
    bool is_feature = feature_pos < draft.feature_indices.size() &&
                      draft.feature_indices[feature_pos] == i;
    std::string text =
        is_feature
            ? feature_sentence_text(rng, spec,
                                    draft.feature_topics[feature_pos],
                                    registers)
            : filler_sentence_text(rng, spec, registers);
    if (is_feature) ++feature_pos;
    c.sentences.push_back(Sentence{i, std::move(text)});
  }
  return c;
}

}  // namespace

std::vector<CasePair> generate_corpus(const SyntheticSpec& spec) {
  Rng rng(spec.seed);

  // Near-uniform label sequence, order shuffled.
  std::vector<int> labels(static_cast<size_t>(spec.n_pairs));
  for (size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 3);
  rng.shuffle(labels);

  std::vector<CasePair> pairs;
  pairs.reserve(labels.size());
  for (size_t p = 0; p < labels.size(); ++p) {
    int label = labels[p];
    bool fooling = label == 0 && rng.next_unit() < spec.fool_rate;
    const auto& registers =
        spec.register_vocab[static_cast<size_t>(fooling ? 2 : label)];

    CaseDraft draft_a = draw_case_shape(rng, spec);
    CaseDraft draft_b = draw_case_shape(rng, spec);
    int f_a = static_cast<int>(draft_a.feature_indices.size());
    int f_b = static_cast<int>(draft_b.feature_indices.size());
    int min_f = std::min(f_a, f_b);

    // Match pairs align everything alignable; partial pairs a strict
    // subset, preferring at least two aligned pairs so single-miss
    // alignment noise cannot erase the evidence.
    int shared = 0;
    if (label == 2) {
      shared = min_f;
    } else if (label == 1) {
      int lo = std::min(2, min_f - 1);
      shared = lo + static_cast<int>(rng.below(
                        static_cast<size_t>(min_f - lo)));
    }

    // Distinct topics for the whole pair; the first `shared` are common to
    // both cases, the rest are unique to one sentence.
    std::vector<int> topic_ids =
        rng.sample_indices(spec.topic_count(), f_a + f_b - shared);
    rng.shuffle(topic_ids);
    auto topic_at = [&](int i) {
      return spec.topic_token(topic_ids[static_cast<size_t>(i)]);
    };

    // Which feature slots carry the shared topics.
    std::vector<int> slots_a(static_cast<size_t>(f_a));
    std::vector<int> slots_b(static_cast<size_t>(f_b));
    for (int i = 0; i < f_a; ++i) slots_a[static_cast<size_t>(i)] = i;
    for (int i = 0; i < f_b; ++i) slots_b[static_cast<size_t>(i)] = i;
    rng.shuffle(slots_a);
    rng.shuffle(slots_b);

    draft_a.feature_topics.assign(static_cast<size_t>(f_a), "");
    draft_b.feature_topics.assign(static_cast<size_t>(f_b), "");
    CasePair pair;
    for (int s = 0; s < shared; ++s) {
      int slot_a = slots_a[static_cast<size_t>(s)];
      int slot_b = slots_b[static_cast<size_t>(s)];
      draft_a.feature_topics[static_cast<size_t>(slot_a)] = topic_at(s);
      draft_b.feature_topics[static_cast<size_t>(slot_b)] = topic_at(s);
      pair.gold_aligned.emplace(
          draft_a.feature_indices[static_cast<size_t>(slot_a)],
          draft_b.feature_indices[static_cast<size_t>(slot_b)]);
    }
    int next_topic = shared;
    for (int i = 0; i < f_a; ++i) {
      auto& topic = draft_a.feature_topics[static_cast<size_t>(i)];
      if (topic.empty()) topic = topic_at(next_topic++);
    }
    for (int i = 0; i < f_b; ++i) {
      auto& topic = draft_b.feature_topics[static_cast<size_t>(i)];
      if (topic.empty()) topic = topic_at(next_topic++);
    }

    char id_buf[32];
    std::snprintf(id_buf, sizeof(id_buf), "p%05zu", p);
    pair.pair_id = id_buf;
    pair.match_label = static_cast<MatchLabel>(label);
    pair.case_a =
        materialize_case(rng, spec, draft_a, pair.pair_id + "a", registers);
    pair.case_b =
        materialize_case(rng, spec, draft_b, pair.pair_id + "b", registers);
    pair.gold_features_a.insert(draft_a.feature_indices.begin(),
                                draft_a.feature_indices.end());
    pair.gold_features_b.insert(draft_b.feature_indices.begin(),
                                draft_b.feature_indices.end());
    validate_pair(pair);
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

}  // namespace casematch
