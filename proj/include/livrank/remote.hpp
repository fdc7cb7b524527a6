#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include <json.hpp>

#include "livrank/composer.hpp"
#include "livrank/corpus.hpp"
#include "livrank/judge.hpp"
#include "livrank/prompts.hpp"

namespace livrank {

struct RemoteJudgeConfig {
  std::string endpoint_url;  // full chat-completions URL
  std::string model_name;
  std::string api_key;       // sent as a Bearer token when non-empty
  double temperature = 0.2;
  int max_tokens = 1024;
  std::chrono::milliseconds timeout{120'000};
  int max_retries = 3;
  double rate_limit = 2.0;   // requests per second; <= 0 disables

  void validate() const;
};

/// Chat-completion request body with one text part and one image part.
nlohmann::json build_chat_request(const RemoteJudgeConfig& cfg, std::string_view prompt,
                                  std::string_view image_url);

/// choices[0].message.content, accepting either a string or a list of text parts.
std::string extract_message_text(const nlohmann::json& response);

/// Moves a JSON body to the endpoint and returns the response body.
/// Throws RemoteJudgeError on transport failure or HTTP non-success.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string post_json(const std::string& body) = 0;
};

class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(const RemoteJudgeConfig& cfg);
  std::string post_json(const std::string& body) override;

 private:
  std::string base_;
  std::string path_;
  std::string api_key_;
  std::chrono::milliseconds timeout_;
};

/// Spaces request starts at least 1/rate seconds apart across threads.
class RateLimiter {
 public:
  explicit RateLimiter(double per_second);
  void acquire();

 private:
  std::mutex mutex_;
  std::chrono::steady_clock::duration interval_{};
  std::chrono::steady_clock::time_point next_{};
};

/// Rate-limited, retrying access to the chat endpoint.
class RemoteClient {
 public:
  RemoteClient(RemoteJudgeConfig cfg, std::shared_ptr<Transport> transport);

  struct Reply {
    std::string text;
    int attempts = 1;
  };

  /// Sends prompt + image and returns the message text. `accept` may throw
  /// UnparseableVerdict to request another attempt. Transport and parse
  /// failures share one budget of 1 + max_retries attempts; `context` names
  /// the request in errors and log lines.
  Reply complete(std::string_view prompt, std::string_view image_url, std::string_view context,
                 const std::function<void(const std::string&)>& accept = {});

  const RemoteJudgeConfig& config() const noexcept { return cfg_; }

 private:
  RemoteJudgeConfig cfg_;
  std::shared_ptr<Transport> transport_;
  RateLimiter limiter_;
};

/// item_id -> description, persisted as JSONL {"item_id": ..., "description": ...}.
class DescriptionCache {
 public:
  DescriptionCache() = default;
  DescriptionCache(DescriptionCache&& other) noexcept : entries_(std::move(other.entries_)) {}
  DescriptionCache& operator=(DescriptionCache&& other) noexcept {
    entries_ = std::move(other.entries_);
    return *this;
  }
  static DescriptionCache load(const std::filesystem::path& path);

  bool contains(const std::string& id) const;
  const std::string& at(const std::string& id) const;
  void put(const std::string& id, std::string description);
  std::size_t size() const;
  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

  static std::string to_jsonl_line(const std::string& id, const std::string& description);

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::string> entries_;
};

/// Builds the image URL for one item: http(s) refs pass through, files become data URLs.
std::string item_image_url(const Cohort& cohort, const Item& item);

/// Loads an image_ref (local file or http(s) URL) as a raster.
Raster load_item_image(const Cohort& cohort, const Item& item);

/// Describes every item missing from `cache` with the single-image prompt,
/// appending each new entry to `cache_path` as it completes. Items are
/// processed concurrently; `progress` receives one line per item.
void describe_cohort(const Cohort& cohort, RemoteClient& client, const CriteriaConfig& crit,
                     DescriptionCache& cache, const std::filesystem::path& cache_path,
                     const std::function<void(const std::string&)>& progress = {});

/// Produces the image URL attached to a comparison of (left, right).
using CompositeSource = std::function<std::string(const Item& left, const Item& right)>;

/// Default composite source: loads both images, composes them, returns a PNG data URL.
CompositeSource make_composite_source(const Cohort& cohort, ComposeConfig cfg = {});

/// The text-assisted MLLM judge: composite image + both cached descriptions
/// + chain-of-thought comparison prompt, verdict parsed from the reply.
class RemoteJudge final : public Judge {
 public:
  RemoteJudge(RemoteClient& client, CriteriaConfig crit, const DescriptionCache& descriptions,
              CompositeSource composite);

  Outcome compare(const JudgeRequest& request) override;
  JudgeKind kind() const noexcept override { return JudgeKind::Remote; }
  bool parallel_votes() const noexcept override { return true; }

 private:
  RemoteClient& client_;
  CriteriaConfig crit_;
  const DescriptionCache& descriptions_;
  CompositeSource composite_;
};

/// Outcome of a single remote comparison (used by RemoteJudge and callers
/// that already hold both descriptions).
Outcome remote_compare(const Item& left, const Item& right, std::string_view desc_a,
                       std::string_view desc_b, RemoteClient& client, const CriteriaConfig& crit,
                       const CompositeSource& composite);

}  // namespace livrank
