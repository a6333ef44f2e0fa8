#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <mutex>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "casematch/encoder.hpp"
#include "casematch/errors.hpp"

namespace casematch {

using nlohmann::json;

namespace {

// Bounded-concurrency guard for in-flight requests.
class FlightLimiter {
 public:
  explicit FlightLimiter(int limit) : available_(limit) {}

  void acquire() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return available_ > 0; });
    --available_;
  }

  void release() {
    {
      std::lock_guard lock(mutex_);
      ++available_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  int available_;
};

}  // namespace

struct ExternalEncoderClient::Impl {
  std::string endpoint;
  int expected_dim;
  int max_retries;
  FlightLimiter limiter;

  Impl(std::string ep, int dim, int retries, int in_flight)
      : endpoint(std::move(ep)),
        expected_dim(dim),
        max_retries(retries),
        limiter(in_flight) {}

  httplib::Client make_client() const {
    httplib::Client client(endpoint);
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(30, 0);
    return client;
  }

  // POST/GET with retries; each attempt uses a fresh connection so responses
  // cannot interleave across concurrent callers.
  json request(const std::string& path, const json* body) {
    limiter.acquire();
    struct Release {
      FlightLimiter* l;
      ~Release() { l->release(); }
    } release{&limiter};

    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt <= max_retries; ++attempt) {
      auto client = make_client();
      httplib::Result result =
          body ? client.Post(path, body->dump(), "application/json")
               : client.Get(path);
      if (!result) {
        last_error = httplib::to_string(result.error());
        continue;
      }
      if (result->status != 200) {
        last_error = "HTTP status " + std::to_string(result->status);
        continue;
      }
      json parsed = json::parse(result->body, nullptr, false);
      if (parsed.is_discarded()) {
        throw Error(ErrorKind::kProtocol,
                    "external encoder returned malformed JSON from " + path);
      }
      return parsed;
    }
    throw Error(ErrorKind::kTransport,
                "external encoder unreachable at " + endpoint + path +
                    " after " + std::to_string(max_retries + 1) +
                    " attempts: " + last_error);
  }
};

ExternalEncoderClient::ExternalEncoderClient(std::string endpoint,
                                             int expected_dim, int max_retries,
                                             int max_in_flight)
    : impl_(std::make_unique<Impl>(std::move(endpoint), expected_dim,
                                   max_retries, std::max(max_in_flight, 1))) {}

ExternalEncoderClient::~ExternalEncoderClient() = default;

int ExternalEncoderClient::fetch_dim() {
  json info = impl_->request("/info", nullptr);
  if (!info.contains("dim") || !info["dim"].is_number_integer()) {
    throw Error(ErrorKind::kProtocol,
                "external encoder /info response lacks an integer dim");
  }
  return info["dim"].get<int>();
}

std::vector<EmbeddingVector> ExternalEncoderClient::encode(
    const std::vector<std::string>& texts, bool pair, int max_len) {
  if (pair && texts.size() % 2 != 0) {
    throw Error(ErrorKind::kContract,
                "pair encoding requires an even number of texts");
  }
  json body{{"texts", texts}, {"pair", pair}, {"max_len", max_len}};
  json response = impl_->request("/encode", &body);
  if (!response.contains("vectors") || !response["vectors"].is_array()) {
    throw Error(ErrorKind::kProtocol,
                "external encoder /encode response lacks vectors");
  }
  size_t expected_count = pair ? texts.size() / 2 : texts.size();
  const json& vectors = response["vectors"];
  if (vectors.size() != expected_count) {
    throw Error(ErrorKind::kProtocol,
                "external encoder returned " + std::to_string(vectors.size()) +
                    " vectors, expected " + std::to_string(expected_count));
  }
  std::vector<EmbeddingVector> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) {
    EmbeddingVector vec = v.get<EmbeddingVector>();
    if (static_cast<int>(vec.size()) != impl_->expected_dim) {
      throw Error(ErrorKind::kProtocol,
                  "external encoder returned a vector of length " +
                      std::to_string(vec.size()) + ", expected dim " +
                      std::to_string(impl_->expected_dim));
    }
    for (double x : vec) {
      if (!std::isfinite(x)) {
        throw Error(ErrorKind::kProtocol,
                    "external encoder returned a non-finite value");
      }
    }
    out.push_back(std::move(vec));
  }
  return out;
}

}  // namespace casematch
