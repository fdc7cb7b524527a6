#include <doctest.h>

#include <atomic>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "fixtures.hpp"
#include "livrank/error.hpp"
#include "livrank/remote.hpp"

using namespace livrank;
using nlohmann::json;

namespace {

json chat_reply(const std::string& text) {
  return {{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", text}}}}})}};
}

/// Local chat-completions stub. The handler sees the request index (0-based) and the parsed body.
class StubServer {
 public:
  using Handler = std::function<void(int, const json&, httplib::Response&)>;

  explicit StubServer(Handler h) : handler_(std::move(h)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const int idx = hits_++;
      last_auth_ = req.get_header_value("Authorization");
      handler_(idx, json::parse(req.body), res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  RemoteJudgeConfig config() const {
    RemoteJudgeConfig cfg;
    cfg.endpoint_url = "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
    cfg.model_name = "stub-vlm";
    cfg.api_key = "secret-token";
    cfg.rate_limit = 0.0;
    cfg.max_retries = 2;
    cfg.timeout = std::chrono::milliseconds(2000);
    return cfg;
  }
  int hits() const { return hits_; }
  std::string last_auth() const { return last_auth_; }

 private:
  httplib::Server server_;
  Handler handler_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> hits_{0};
  std::string last_auth_;
};

struct PairFixture {
  Item left{"v1", "One", "P", "C", "", std::nullopt};
  Item right{"v2", "Two", "P", "C", "", std::nullopt};
  CriteriaConfig crit = CriteriaConfig::defaults();
};

}  // namespace

TEST_CASE("chat request carries model, sampling settings and both content parts") {
  RemoteJudgeConfig cfg;
  cfg.endpoint_url = "https://example.org/v1/chat/completions";
  cfg.model_name = "m";
  cfg.temperature = 0.0;
  cfg.max_tokens = 77;
  const json body = build_chat_request(cfg, "hello", "data:image/png;base64,AAAA");
  CHECK(body["model"] == "m");
  CHECK(body["temperature"] == 0.0);
  CHECK(body["max_tokens"] == 77);
  const json& content = body["messages"][0]["content"];
  REQUIRE(content.size() == 2);
  CHECK(content[0]["text"] == "hello");
  CHECK(content[1]["image_url"]["url"] == "data:image/png;base64,AAAA");
  CHECK(build_chat_request(cfg, "text only", "")["messages"][0]["content"].size() == 1);
}

TEST_CASE("message text extraction") {
  CHECK(extract_message_text(chat_reply("Final: A")) == "Final: A");
  json parts = {{"choices", json::array({{{"message",
                                           {{"content", json::array({{{"type", "text"}, {"text", "Fin"}},
                                                                     {{"type", "text"}, {"text", "al: B"}}})}}}}})}};
  CHECK(extract_message_text(parts) == "Final: B");
  CHECK_THROWS_AS(extract_message_text(json::object()), RemoteJudgeError);
}

TEST_CASE("config validation") {
  RemoteJudgeConfig cfg;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.endpoint_url = "ftp://x";
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.endpoint_url = "http://x/y";
  CHECK_NOTHROW(cfg.validate());
  cfg.max_retries = -1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("stub endpoint answering A yields a left win with the raw text kept") {
  StubServer server([](int, const json& body, httplib::Response& res) {
    CHECK(body["model"] == "stub-vlm");
    res.set_content(chat_reply("Step 1 ... Final: A").dump(), "application/json");
  });
  RemoteClient client(server.config(), nullptr);
  PairFixture f;
  const Outcome o = remote_compare(f.left, f.right, "paved roads", "dirt roads", client, f.crit, {});
  CHECK(o.winner == Side::Left);
  CHECK(o.raw_text.value() == "Step 1 ... Final: A");
  CHECK(o.judge_kind == JudgeKind::Remote);
  CHECK(o.attempts == 1);
  CHECK(server.last_auth() == "Bearer secret-token");
}

TEST_CASE("an unparseable reply is retried once and the second answer is used") {
  StubServer server([](int idx, const json&, httplib::Response& res) {
    res.set_content(chat_reply(idx == 0 ? "both look nice" : "Final: B").dump(), "application/json");
  });
  RemoteClient client(server.config(), nullptr);
  PairFixture f;
  const Outcome o = remote_compare(f.left, f.right, "a", "b", client, f.crit, {});
  CHECK(o.winner == Side::Right);
  CHECK(o.attempts == 2);
  CHECK(server.hits() == 2);
}

TEST_CASE("persistent garbage exhausts the retry budget as an unparseable verdict") {
  StubServer server([](int, const json&, httplib::Response& res) {
    res.set_content(chat_reply("no idea").dump(), "application/json");
  });
  RemoteClient client(server.config(), nullptr);
  PairFixture f;
  CHECK_THROWS_AS(remote_compare(f.left, f.right, "a", "b", client, f.crit, {}), UnparseableVerdict);
  CHECK(server.hits() == 3);
}

TEST_CASE("repeated timeouts raise a remote error naming the pair") {
  StubServer server([](int, const json&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(400));
    res.set_content(chat_reply("Final: A").dump(), "application/json");
  });
  RemoteJudgeConfig cfg = server.config();
  cfg.timeout = std::chrono::milliseconds(100);
  cfg.max_retries = 1;
  RemoteClient client(cfg, nullptr);
  PairFixture f;
  try {
    remote_compare(f.left, f.right, "a", "b", client, f.crit, {});
    FAIL("expected RemoteJudgeError");
  } catch (const RemoteJudgeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("v1") != std::string::npos);
    CHECK(msg.find("v2") != std::string::npos);
    CHECK(msg.find("2 attempts") != std::string::npos);
  }
}

TEST_CASE("HTTP errors are retried then surfaced") {
  StubServer server([](int idx, const json&, httplib::Response& res) {
    if (idx == 0) {
      res.status = 503;
      return;
    }
    res.set_content(chat_reply("Final: A").dump(), "application/json");
  });
  RemoteClient client(server.config(), nullptr);
  PairFixture f;
  CHECK(remote_compare(f.left, f.right, "a", "b", client, f.crit, {}).winner == Side::Left);
}

TEST_CASE("description cache round-trips through JSONL") {
  const auto dir = fixtures::scratch("desc_cache");
  const auto path = dir / "descriptions.jsonl";
  {
    std::ofstream out(path);
    out << DescriptionCache::to_jsonl_line("v1", "tiled roofs, \"quoted\"\nnew line");
    out << "\n";
    out << DescriptionCache::to_jsonl_line("v2", "mud houses");
  }
  DescriptionCache cache = DescriptionCache::load(path);
  CHECK(cache.size() == 2);
  CHECK(cache.at("v1") == "tiled roofs, \"quoted\"\nnew line");
  CHECK_THROWS_AS(cache.at("v3"), DataError);
  CHECK(DescriptionCache::load(dir / "absent.jsonl").size() == 0);
  {
    std::ofstream out(path, std::ios::app);
    out << "{not json\n";
  }
  CHECK_THROWS_AS(DescriptionCache::load(path), DataError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("describe fills only the missing descriptions and appends them") {
  const auto dir = fixtures::scratch("describe");
  {
    std::ofstream m(dir / "m.csv");
    m << "id,name,province,county,image_ref\n"
         "a,A,P,C,https://example.org/a.png\n"
         "b,B,P,C,https://example.org/b.png\n";
  }
  const Cohort cohort = load_manifest(dir / "m.csv");
  StubServer server([](int, const json& body, httplib::Response& res) {
    const std::string url = body["messages"][0]["content"][1]["image_url"]["url"];
    res.set_content(chat_reply("village at " + url).dump(), "application/json");
  });
  RemoteClient client(server.config(), nullptr);
  DescriptionCache cache;
  cache.put("a", "already known");
  describe_cohort(cohort, client, CriteriaConfig::defaults(), cache, dir / "d.jsonl");
  CHECK(server.hits() == 1);
  CHECK(cache.at("b") == "village at https://example.org/b.png");
  CHECK(DescriptionCache::load(dir / "d.jsonl").size() == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("rate limiter spaces requests") {
  RateLimiter limiter(50.0);
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 6; ++i) limiter.acquire();
  const auto elapsed = std::chrono::steady_clock::now() - start;
  CHECK(elapsed >= std::chrono::milliseconds(95));
  RateLimiter unlimited(0.0);
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 1000; ++i) unlimited.acquire();
  CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::milliseconds(50));
}
