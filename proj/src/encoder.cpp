#include "casematch/encoder.hpp"

#include <cmath>
#include <string>

#include "casematch/errors.hpp"
#include "casematch/text.hpp"

namespace casematch {

void EncoderConfig::validate() const {
  if (dim <= 0) {
    throw Error(ErrorKind::kConfig, "encoder dim must be positive");
  }
  if (max_len_sentence <= 0 || max_len_case <= 0) {
    throw Error(ErrorKind::kConfig, "encoder max lengths must be positive");
  }
  if (ngram_orders.empty()) {
    throw Error(ErrorKind::kConfig, "ngram_orders must not be empty");
  }
  for (int order : ngram_orders) {
    if (order <= 0) {
      throw Error(ErrorKind::kConfig, "ngram orders must be positive");
    }
  }
  if (backend == EncoderBackend::kExternal && endpoint.empty()) {
    throw Error(ErrorKind::kConfig,
                "external encoder backend requires an endpoint");
  }
}

EmbeddingVector hashed_ngram_encode(std::string_view text,
                                    const EncoderConfig& config) {
  EmbeddingVector vec(static_cast<size_t>(config.dim), 0.0);
  auto offsets = utf8_offsets(text);
  size_t n_chars = offsets.size() - 1;
  for (int order : config.ngram_orders) {
    size_t len = static_cast<size_t>(order);
    if (n_chars < len) continue;
    for (size_t i = 0; i + len <= n_chars; ++i) {
      std::string_view gram(text.data() + offsets[i],
                            offsets[i + len] - offsets[i]);
      size_t bucket = static_cast<size_t>(fnv1a64(gram) %
                                          static_cast<uint64_t>(config.dim));
      vec[bucket] += 1.0;
    }
  }
  double norm_sq = 0.0;
  for (double v : vec) norm_sq += v * v;
  if (norm_sq > 0.0) {
    double inv = 1.0 / std::sqrt(norm_sq);
    for (double& v : vec) v *= inv;
  }
  return vec;
}

Encoder::Encoder(EncoderConfig config) : config_(std::move(config)) {
  config_.validate();
  if (config_.backend == EncoderBackend::kExternal) {
    external_ = std::make_unique<ExternalEncoderClient>(
        config_.endpoint, config_.dim, config_.max_retries,
        config_.max_in_flight);
    int advertised = external_->fetch_dim();
    if (advertised != config_.dim) {
      throw Error(ErrorKind::kProtocol,
                  "external encoder advertises dim " +
                      std::to_string(advertised) + ", configured " +
                      std::to_string(config_.dim));
    }
  }
}

Encoder::~Encoder() = default;
Encoder::Encoder(Encoder&&) noexcept = default;
Encoder& Encoder::operator=(Encoder&&) noexcept = default;

EmbeddingVector Encoder::encode(std::string_view text, int max_len) const {
  if (config_.backend == EncoderBackend::kHashedNgram) {
    // One unit = one Unicode character for the character n-gram backend.
    std::string_view truncated =
        utf8_prefix(text, static_cast<size_t>(max_len));
    return hashed_ngram_encode(truncated, config_);
  }
  // External backends tokenize and truncate on their side of the protocol.
  auto vectors = external_->encode({std::string(text)}, false, max_len);
  return vectors.at(0);
}

EmbeddingVector Encoder::encode_joint(std::string_view text_a,
                                      std::string_view text_b,
                                      int max_len) const {
  if (config_.backend == EncoderBackend::kHashedNgram) {
    // Each side gets (max_len - 3) / 2 characters, reserving the slots a
    // transformer backend would spend on sequence markers.
    size_t side_budget = static_cast<size_t>(std::max(max_len - 3, 0)) / 2;
    std::string_view a = utf8_prefix(text_a, side_budget);
    std::string_view b = utf8_prefix(text_b, side_budget);
    std::string joined;
    joined.reserve(a.size() + kSeparatorToken.size() + b.size());
    joined.append(a);
    joined.append(kSeparatorToken);
    joined.append(b);
    return hashed_ngram_encode(joined, config_);
  }
  auto vectors = external_->encode({std::string(text_a), std::string(text_b)},
                                   true, max_len);
  return vectors.at(0);
}

}  // namespace casematch
