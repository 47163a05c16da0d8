#include <doctest.h>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <mutex>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "benchbias/embedding_client.hpp"
#include "benchbias/hash.hpp"
#include "test_support.hpp"

using namespace benchbias;
using testing::error_code_of;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_cache(const char* name) {
  const auto dir = fs::temp_directory_path() / ("benchbias_cache_" + std::string(name));
  fs::remove_all(dir);
  return dir;
}

// Deterministic fake embedding: length-2 vector derived from the text.
std::vector<double> fake_vector(const std::string& text) {
  return {1.0 + static_cast<double>(text.size()), static_cast<double>(static_cast<unsigned char>(text.front()))};
}

std::string respond(const std::string& body) {
  const auto req = json::parse(body);
  json data = json::array();
  std::size_t i = 0;
  for (const auto& t : req.at("input")) {
    data.push_back({{"index", i++}, {"embedding", fake_vector(t.get<std::string>())}});
  }
  return json{{"data", data}}.dump();
}

class ScriptedTransport final : public EmbeddingTransport {
 public:
  std::function<HttpResult(const json&, int)> script;

  HttpResult post(const std::string& body) override {
    const int n = calls.fetch_add(1);
    const auto req = json::parse(body);
    {
      std::lock_guard lock(mutex);
      for (const auto& t : req.at("input")) seen.push_back(t.get<std::string>());
    }
    return script(req, n);
  }

  std::atomic<int> calls{0};
  std::mutex mutex;
  std::vector<std::string> seen;
};

HttpResult ok(const json& req) { return {true, 200, respond(req.dump()), ""}; }

EmbeddingServiceConfig quick_config() {
  EmbeddingServiceConfig c;
  c.model = "test-model";
  c.batch_size = 2;
  c.max_in_flight = 2;
  c.max_attempts = 3;
  c.initial_backoff = std::chrono::milliseconds(1);
  return c;
}

const std::vector<PromptText> kPrompts = {{"a", "alpha"}, {"b", "beta"}, {"c", "gamma"}, {"d", "alpha"}, {"e", "delta"}};

}  // namespace

TEST_CASE("empty prompt list needs no network") {
  ScriptedTransport t;
  t.script = [](const json&, int) -> HttpResult { throw std::logic_error("called"); };
  const auto m = fetch_embeddings({}, quick_config(), fresh_cache("empty"), t);
  CHECK(m.prompt_count() == 0);
  CHECK(t.calls == 0);
}

TEST_CASE("batches, dedup and cache reuse") {
  const auto cache = fresh_cache("reuse");
  ScriptedTransport t;
  t.script = [](const json& req, int) { return ok(req); };
  const auto m = fetch_embeddings(kPrompts, quick_config(), cache, t);
  CHECK(m.prompt_ids() == std::vector<std::string>{"a", "b", "c", "d", "e"});
  CHECK(t.seen.size() == 4);  // "alpha" sent once
  CHECK(t.calls == 2);
  CHECK(m.row(0)[0] == m.row(3)[0]);
  CHECK(m.row(2)[0] == 6.0);
  CHECK(fs::exists(cache / (sha256_hex("gamma") + ".json")));

  ScriptedTransport offline;
  offline.script = [](const json&, int) -> HttpResult { return {false, 0, "", "offline"}; };
  const auto again = fetch_embeddings(kPrompts, quick_config(), cache, offline);
  CHECK(offline.calls == 0);
  CHECK(again.vectors() == m.vectors());

  auto other = quick_config();
  other.model = "other-model";
  CHECK(error_code_of([&] { fetch_embeddings(kPrompts, other, cache, offline); }) == ErrorCode::NetworkError);
}

TEST_CASE("auth failures are not retried") {
  ScriptedTransport t;
  t.script = [](const json&, int) { return HttpResult{true, 401, "{}", ""}; };
  auto c = quick_config();
  c.max_in_flight = 1;
  CHECK(error_code_of([&] { fetch_embeddings(kPrompts, c, fresh_cache("auth"), t); }) == ErrorCode::AuthError);
  CHECK(t.calls == 2);
}

TEST_CASE("transient failures are retried") {
  ScriptedTransport t;
  auto c = quick_config();
  c.max_in_flight = 1;
  c.batch_size = 10;
  t.script = [](const json& req, int n) {
    if (n == 0) return HttpResult{true, 503, "", ""};
    if (n == 1) return HttpResult{true, 429, "", ""};
    return ok(req);
  };
  const auto m = fetch_embeddings(kPrompts, c, fresh_cache("retry"), t);
  CHECK(m.prompt_count() == 5);
  CHECK(t.calls == 3);

  ScriptedTransport down;
  down.script = [](const json&, int) { return HttpResult{true, 500, "", ""}; };
  CHECK(error_code_of([&] { fetch_embeddings(kPrompts, c, fresh_cache("down"), down); }) == ErrorCode::NetworkError);
  CHECK(down.calls == 3);
}

TEST_CASE("partial failure names the affected prompts") {
  ScriptedTransport t;
  auto c = quick_config();
  c.max_in_flight = 1;
  t.script = [](const json& req, int) {
    for (const auto& x : req.at("input")) {
      if (x == "gamma") return HttpResult{true, 400, "bad input", ""};
    }
    return ok(req);
  };
  const auto cache = fresh_cache("partial");
  try {
    fetch_embeddings(kPrompts, c, cache, t);
    FAIL("expected PartialFailureError");
  } catch (const PartialFailureError& e) {
    CHECK(e.code() == ErrorCode::PartialFailure);
    CHECK(e.failed_ids() == std::vector<std::string>{"c", "e"});
  }
  CHECK(fs::exists(cache / (sha256_hex("alpha") + ".json")));
}

TEST_CASE("response shapes") {
  const auto a = parse_embedding_response(R"({"data":[{"index":1,"embedding":[3]},{"index":0,"embedding":[1,2]}]})", 2);
  CHECK(a[0] == std::vector<double>{1, 2});
  CHECK(a[1] == std::vector<double>{3});
  const auto b = parse_embedding_response(R"({"embeddings":[[1],[2]]})", 3);
  CHECK(b[1] == std::vector<double>{2});
  CHECK(b[2].empty());
  CHECK(error_code_of([] { parse_embedding_response("nope", 1); }) == ErrorCode::NetworkError);
}

TEST_CASE("http transport against a local server") {
  httplib::Server server;
  std::atomic<int> hits{0};
  std::string auth;
  server.Post("/v1/embeddings", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    auth = req.get_header_value("Authorization");
    res.set_content(respond(req.body), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  auto c = quick_config();
  c.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/embeddings";
  c.token = "secret";
  const auto cache = fresh_cache("http");
  const auto m = fetch_embeddings(kPrompts, c, cache);
  CHECK(m.prompt_count() == 5);
  CHECK(m.row(1)[0] == 5.0);
  CHECK(auth == "Bearer secret");
  const int first = hits.load();
  CHECK(first == 2);

  c.endpoint = "not a url";
  const auto cached = fetch_embeddings(kPrompts, c, cache);
  CHECK(cached.vectors() == m.vectors());
  CHECK(hits.load() == first);

  server.stop();
  worker.join();
}
