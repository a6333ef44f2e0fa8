#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace casematch {

using EmbeddingVector = std::vector<double>;

enum class EncoderBackend {
  kHashedNgram,
  kExternal,
};

struct EncoderConfig {
  EncoderBackend backend = EncoderBackend::kHashedNgram;
  int dim = 1024;
  int max_len_sentence = 128;  // characters; sentence-level encoding
  int max_len_case = 512;      // characters; composed case text encoding
  std::vector<int> ngram_orders = {1, 2, 3};
  std::string endpoint;  // external backend, e.g. "http://127.0.0.1:8600"
  int max_retries = 2;
  int max_in_flight = 4;

  void validate() const;
};

// Character n-gram counts hashed into dim buckets with FNV-1a, then
// L2-normalized when any bucket is nonzero. Stateless and deterministic.
EmbeddingVector hashed_ngram_encode(std::string_view text,
                                    const EncoderConfig& config);

class ExternalEncoderClient;

// Sentence encoder facade. The hashed n-gram backend runs in-process; the
// external backend talks to an embedding service over HTTP.
class Encoder {
 public:
  explicit Encoder(EncoderConfig config);
  ~Encoder();
  Encoder(Encoder&&) noexcept;
  Encoder& operator=(Encoder&&) noexcept;
  Encoder(const Encoder&) = delete;
  Encoder& operator=(const Encoder&) = delete;

  // Truncates to max_len characters, then encodes. Output length = dim.
  EmbeddingVector encode(std::string_view text, int max_len) const;

  // Encodes the pair as one separator-delimited sequence. Each side is
  // truncated to (max_len - 3) / 2 characters, reserving the marker slots.
  EmbeddingVector encode_joint(std::string_view text_a, std::string_view text_b,
                               int max_len) const;

  const EncoderConfig& config() const { return config_; }

 private:
  EncoderConfig config_;
  std::unique_ptr<ExternalEncoderClient> external_;
};

// HTTP client for the external encoder protocol:
//   GET  /info   -> {"dim": int}
//   POST /encode -> {"vectors": [[float; dim]]}
//                   request {"texts": [string], "pair": bool, "max_len": int}
// In pair mode, texts holds 2*n strings laid out (a_1, b_1, ..., a_n, b_n)
// and the response holds n vectors.
class ExternalEncoderClient {
 public:
  ExternalEncoderClient(std::string endpoint, int expected_dim,
                        int max_retries, int max_in_flight);
  ~ExternalEncoderClient();

  // Advertised dimension from GET /info.
  int fetch_dim();

  std::vector<EmbeddingVector> encode(const std::vector<std::string>& texts,
                                      bool pair, int max_len);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace casematch
