#ifndef BENCHBIAS_EMBEDDING_CLIENT_HPP
#define BENCHBIAS_EMBEDDING_CLIENT_HPP

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "benchbias/data_model.hpp"
#include "benchbias/io.hpp"

namespace benchbias {

struct EmbeddingServiceConfig {
  std::string endpoint;  // full URL, e.g. https://host/v1/embeddings
  std::string model;
  std::string token;     // sent as "Authorization: Bearer <token>" when non-empty
  std::size_t batch_size = 64;
  std::chrono::milliseconds timeout{30000};
  unsigned max_in_flight = 4;
  unsigned max_attempts = 5;
  std::chrono::milliseconds initial_backoff{500};

  /// Reads BENCHBIAS_EMBED_{ENDPOINT,MODEL,TOKEN,BATCH,TIMEOUT} (timeout in
  /// seconds); unset variables keep the defaults above.
  static EmbeddingServiceConfig from_environment();
};

struct HttpResult {
  bool transport_ok = false;
  int status = 0;
  std::string body;
  std::string error;  // transport failure description
};

/// One POST of a JSON body to the configured endpoint. Implementations must be
/// safe to call from several threads at once.
class EmbeddingTransport {
 public:
  virtual ~EmbeddingTransport() = default;
  virtual HttpResult post(const std::string& json_body) = 0;
};

std::unique_ptr<EmbeddingTransport> make_http_transport(const EmbeddingServiceConfig& config);

/// Serves cached vectors from cache_dir (file per SHA-256 of the prompt text),
/// fetches the rest in batches, persists new vectors, then returns the matrix
/// in prompt order. Retries transport errors, 429 and 5xx with exponential
/// backoff. Throws AuthError on 401/403, NetworkError when every uncached
/// batch failed, PartialFailureError listing ids otherwise.
EmbeddingMatrix fetch_embeddings(const std::vector<PromptText>& prompts,
                                 const EmbeddingServiceConfig& config,
                                 const std::filesystem::path& cache_dir);

EmbeddingMatrix fetch_embeddings(const std::vector<PromptText>& prompts,
                                 const EmbeddingServiceConfig& config,
                                 const std::filesystem::path& cache_dir,
                                 EmbeddingTransport& transport);

/// Parses {"data": [{"index": i, "embedding": [...]}, ...]} or
/// {"embeddings": [[...], ...]}. Entries that are missing come back empty.
std::vector<std::vector<double>> parse_embedding_response(const std::string& body, std::size_t expected);

}  // namespace benchbias

#endif  // BENCHBIAS_EMBEDDING_CLIENT_HPP
