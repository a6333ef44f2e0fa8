#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "casematch/corpus.hpp"

namespace casematch {

// count consecutive characters starting at code point start, one string each.
std::vector<std::string> char_range(char32_t start, int count);

// Synthetic stand-in for an annotated case-pair corpus. Feature sentences
// carry marker characters and a two-character topic token at both ends;
// gold-aligned sentences share their topic. Every sentence also carries
// characters from a per-label register vocabulary, so the match label is
// learnable from case-level text. A configurable slice of the not-match
// pairs borrows the match register while sharing no topics, which yields
// matcher mistakes that only evidence alignment can correct.
struct SyntheticSpec {
  int n_pairs = 300;
  int min_sentences = 4;
  int max_sentences = 10;
  double feature_rate = 0.45;
  double fool_rate = 0.2;  // fraction of not-match pairs styled as match
  uint64_t seed = 7;

  // Per-label register vocabularies (not match, partial match, match).
  std::array<std::vector<std::string>, 3> register_vocab = {
      char_range(0x9100, 20), char_range(0x9300, 20), char_range(0x9500, 20)};
  std::vector<std::string> feature_markers = char_range(0x5B00, 40);
  std::vector<std::string> filler_chars = char_range(0x6C00, 40);
  // Consecutive character triples form the topic tokens.
  std::vector<std::string> topic_chars = char_range(0x7A00, 180);
  std::vector<std::string> noise_chars = char_range(0x8C00, 60);

  int topic_count() const {
    return static_cast<int>(topic_chars.size()) / 3;
  }
  std::string topic_token(int topic) const {
    return topic_chars[static_cast<size_t>(3 * topic)] +
           topic_chars[static_cast<size_t>(3 * topic + 1)] +
           topic_chars[static_cast<size_t>(3 * topic + 2)];
  }

  void validate(int k_folds) const;
};

std::vector<CasePair> generate_corpus(const SyntheticSpec& spec);

}  // namespace casematch
