#include "benchbias/embedding_client.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "benchbias/error.hpp"
#include "benchbias/hash.hpp"
#include "benchbias/parallel.hpp"

namespace benchbias {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : std::move(fallback);
}

class HttpTransport final : public EmbeddingTransport {
 public:
  explicit HttpTransport(const EmbeddingServiceConfig& config) : config_(config) {
    const auto scheme_end = config.endpoint.find("://");
    if (scheme_end == std::string::npos) {
      throw Error(ErrorCode::InvalidConfig, "embedding endpoint must be an absolute URL: " + config.endpoint);
    }
    const auto path_start = config.endpoint.find('/', scheme_end + 3);
    origin_ = config.endpoint.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : config.endpoint.substr(path_start);
  }

  HttpResult post(const std::string& json_body) override {
    httplib::Client client(origin_);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto usec = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - seconds);
    client.set_connection_timeout(seconds.count(), usec.count());
    client.set_read_timeout(seconds.count(), usec.count());
    client.set_write_timeout(seconds.count(), usec.count());
    httplib::Headers headers;
    if (!config_.token.empty()) headers.emplace("Authorization", "Bearer " + config_.token);
    HttpResult out;
    auto res = client.Post(path_, headers, json_body, "application/json");
    if (!res) {
      out.error = httplib::to_string(res.error());
      return out;
    }
    out.transport_ok = true;
    out.status = res->status;
    out.body = std::move(res->body);
    return out;
  }

 private:
  EmbeddingServiceConfig config_;
  std::string origin_;
  std::string path_;
};

enum class BatchStatus { Ok, Network, Rejected, Auth };

struct BatchOutcome {
  BatchStatus status = BatchStatus::Ok;
  std::vector<std::vector<double>> vectors;
  std::string detail;
};

BatchOutcome run_batch(const std::vector<std::string>& texts, const EmbeddingServiceConfig& config,
                       EmbeddingTransport& transport) {
  json body = {{"input", texts}};
  if (!config.model.empty()) body["model"] = config.model;
  const auto payload = body.dump();
  auto backoff = config.initial_backoff;
  BatchOutcome out;
  const unsigned attempts = std::max(1u, config.max_attempts);
  for (unsigned attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    const auto res = transport.post(payload);
    if (!res.transport_ok) {
      out.status = BatchStatus::Network;
      out.detail = res.error;
      continue;
    }
    if (res.status == 401 || res.status == 403) {
      out.status = BatchStatus::Auth;
      out.detail = "HTTP " + std::to_string(res.status);
      return out;
    }
    if (res.status == 429 || res.status >= 500) {
      out.status = BatchStatus::Network;
      out.detail = "HTTP " + std::to_string(res.status);
      continue;
    }
    if (res.status < 200 || res.status >= 300) {
      out.status = BatchStatus::Rejected;
      out.detail = "HTTP " + std::to_string(res.status);
      return out;
    }
    try {
      out.vectors = parse_embedding_response(res.body, texts.size());
      out.status = BatchStatus::Ok;
    } catch (const Error& e) {
      out.status = BatchStatus::Rejected;
      out.detail = e.what();
    }
    return out;
  }
  return out;
}

fs::path cache_file(const fs::path& dir, const std::string& text) { return dir / (sha256_hex(text) + ".json"); }

bool read_cached(const fs::path& file, const std::string& model, std::vector<double>& out) {
  std::error_code ec;
  if (!fs::is_regular_file(file, ec)) return false;
  try {
    const auto doc = json::parse(read_text_file(file));
    if (!model.empty() && doc.value("model", std::string()) != model) return false;
    out = doc.at("vector").get<std::vector<double>>();
    return !out.empty();
  } catch (const std::exception&) {
    return false;  // unreadable entries are refetched and overwritten
  }
}

void write_cached(const fs::path& file, const std::string& model, const std::vector<double>& vector) {
  std::string body = "{\"model\":" + json(model).dump() + ",\"vector\":[";
  for (std::size_t i = 0; i < vector.size(); ++i) {
    if (i) body += ",";
    body += format_double(vector[i]);
  }
  body += "]}\n";
  write_text_file_atomic(file, body);
}

}  // namespace

EmbeddingServiceConfig EmbeddingServiceConfig::from_environment() {
  EmbeddingServiceConfig c;
  c.endpoint = env_or("BENCHBIAS_EMBED_ENDPOINT", c.endpoint);
  c.model = env_or("BENCHBIAS_EMBED_MODEL", c.model);
  c.token = env_or("BENCHBIAS_EMBED_TOKEN", c.token);
  if (const auto batch = env_or("BENCHBIAS_EMBED_BATCH", ""); !batch.empty()) {
    c.batch_size = static_cast<std::size_t>(std::stoul(batch));
  }
  if (const auto timeout = env_or("BENCHBIAS_EMBED_TIMEOUT", ""); !timeout.empty()) {
    c.timeout = std::chrono::milliseconds(static_cast<long long>(std::stod(timeout) * 1000.0));
  }
  return c;
}

std::unique_ptr<EmbeddingTransport> make_http_transport(const EmbeddingServiceConfig& config) {
  return std::make_unique<HttpTransport>(config);
}

std::vector<std::vector<double>> parse_embedding_response(const std::string& body, std::size_t expected) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error&) {
    throw Error(ErrorCode::NetworkError, "embedding response is not JSON");
  }
  std::vector<std::vector<double>> out(expected);
  const auto take = [&](std::size_t index, const json& v) {
    if (index >= expected || !v.is_array()) return;
    std::vector<double> vec;
    vec.reserve(v.size());
    for (const auto& x : v) {
      if (!x.is_number()) return;
      vec.push_back(x.get<double>());
    }
    out[index] = std::move(vec);
  };
  if (doc.contains("data") && doc["data"].is_array()) {
    const auto& data = doc["data"];
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto& item = data[i];
      if (!item.is_object() || !item.contains("embedding")) continue;
      const std::size_t index = item.contains("index") && item["index"].is_number_unsigned()
                                    ? item["index"].get<std::size_t>()
                                    : i;
      take(index, item["embedding"]);
    }
  } else if (doc.contains("embeddings") && doc["embeddings"].is_array()) {
    const auto& data = doc["embeddings"];
    for (std::size_t i = 0; i < data.size(); ++i) take(i, data[i]);
  } else {
    throw Error(ErrorCode::NetworkError, "embedding response has neither data nor embeddings");
  }
  return out;
}

EmbeddingMatrix fetch_embeddings(const std::vector<PromptText>& prompts, const EmbeddingServiceConfig& config,
                                 const fs::path& cache_dir) {
  if (prompts.empty()) return {};
  // The transport is built lazily so a fully cached run needs no endpoint.
  class Lazy final : public EmbeddingTransport {
   public:
    explicit Lazy(const EmbeddingServiceConfig& c) : config_(c) {}
    HttpResult post(const std::string& body) override {
      std::call_once(once_, [&] { inner_ = make_http_transport(config_); });
      return inner_->post(body);
    }

   private:
    const EmbeddingServiceConfig& config_;
    std::once_flag once_;
    std::unique_ptr<EmbeddingTransport> inner_;
  } transport(config);
  return fetch_embeddings(prompts, config, cache_dir, transport);
}

EmbeddingMatrix fetch_embeddings(const std::vector<PromptText>& prompts, const EmbeddingServiceConfig& config,
                                 const fs::path& cache_dir, EmbeddingTransport& transport) {
  if (prompts.empty()) return {};
  if (config.batch_size == 0) throw Error(ErrorCode::InvalidConfig, "embedding batch size must be >= 1");
  {
    std::vector<std::string> ids;
    for (const auto& p : prompts) ids.push_back(p.first);
    require_unique_ids(ids, "prompt");
  }

  // Distinct texts, in first-appearance order.
  std::map<std::string, std::size_t> slot_of;
  std::vector<const std::string*> texts;
  std::vector<std::size_t> slot(prompts.size());
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    auto [it, inserted] = slot_of.emplace(prompts[i].second, texts.size());
    if (inserted) texts.push_back(&it->first);
    slot[i] = it->second;
  }

  std::vector<std::vector<double>> vectors(texts.size());
  std::vector<std::size_t> missing;
  for (std::size_t t = 0; t < texts.size(); ++t) {
    if (!read_cached(cache_file(cache_dir, *texts[t]), config.model, vectors[t])) missing.push_back(t);
  }

  const std::size_t batches = (missing.size() + config.batch_size - 1) / config.batch_size;
  std::vector<BatchOutcome> outcomes(batches);
  parallel_for(batches, std::max(1u, config.max_in_flight), [&](std::size_t b, unsigned) {
    const std::size_t begin = b * config.batch_size;
    const std::size_t end = std::min(missing.size(), begin + config.batch_size);
    std::vector<std::string> batch;
    for (std::size_t m = begin; m < end; ++m) batch.push_back(*texts[missing[m]]);
    outcomes[b] = run_batch(batch, config, transport);
  });

  bool any_network = false;
  bool any_success = false;
  std::string auth_detail;
  std::string last_detail;
  std::vector<char> failed(texts.size(), 0);
  if (!missing.empty()) fs::create_directories(cache_dir);
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t begin = b * config.batch_size;
    const std::size_t end = std::min(missing.size(), begin + config.batch_size);
    const auto& outcome = outcomes[b];
    if (outcome.status == BatchStatus::Auth) auth_detail = outcome.detail;
    if (outcome.status == BatchStatus::Network) any_network = true;
    if (!outcome.detail.empty()) last_detail = outcome.detail;
    for (std::size_t m = begin; m < end; ++m) {
      const std::size_t t = missing[m];
      if (outcome.status != BatchStatus::Ok || outcome.vectors[m - begin].empty()) {
        failed[t] = 1;
        continue;
      }
      vectors[t] = outcome.vectors[m - begin];
      write_cached(cache_file(cache_dir, *texts[t]), config.model, vectors[t]);
      any_success = true;
    }
  }
  if (!auth_detail.empty()) throw Error(ErrorCode::AuthError, "embedding service refused credentials: " + auth_detail);

  std::vector<std::string> failed_ids;
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    if (failed[slot[i]]) failed_ids.push_back(prompts[i].first);
  }
  if (!failed_ids.empty()) {
    const bool all_network = any_network && !any_success &&
                             std::all_of(outcomes.begin(), outcomes.end(),
                                         [](const BatchOutcome& o) { return o.status == BatchStatus::Network; });
    if (all_network) throw Error(ErrorCode::NetworkError, "embedding service unreachable: " + last_detail);
    throw PartialFailureError(std::move(failed_ids), last_detail);
  }

  const std::size_t s = vectors.front().size();
  DenseMatrix matrix(prompts.size(), s);
  std::vector<std::string> ids;
  ids.reserve(prompts.size());
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    const auto& v = vectors[slot[i]];
    if (v.size() != s) {
      throw Error(ErrorCode::DimensionMismatch, "embedding for " + prompts[i].first + " has " +
                                                    std::to_string(v.size()) + " values, expected " +
                                                    std::to_string(s));
    }
    std::copy(v.begin(), v.end(), matrix.row(i).begin());
    ids.push_back(prompts[i].first);
  }
  return EmbeddingMatrix(std::move(ids), std::move(matrix));
}

}  // namespace benchbias
