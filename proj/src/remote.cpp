#include "livrank/remote.hpp"

#include <exception>
#include <fstream>
#include <optional>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "livrank/error.hpp"
#include "livrank/image_io.hpp"
#include "livrank/io.hpp"

namespace livrank {

using nlohmann::json;

void RemoteJudgeConfig::validate() const {
  if (endpoint_url.empty()) throw ConfigError("remote judge needs an endpoint URL");
  if (!is_url(endpoint_url)) throw ConfigError("endpoint must be an http(s) URL: " + endpoint_url);
  if (!(temperature >= 0.0 && temperature <= 2.0)) throw ConfigError("temperature must lie in [0, 2]");
  if (max_tokens < 1) throw ConfigError("max_tokens must be at least 1");
  if (max_retries < 0) throw ConfigError("max_retries must be non-negative");
  if (timeout.count() <= 0) throw ConfigError("timeout must be positive");
}

json build_chat_request(const RemoteJudgeConfig& cfg, std::string_view prompt, std::string_view image_url) {
  json content = json::array();
  content.push_back({{"type", "text"}, {"text", std::string(prompt)}});
  if (!image_url.empty()) content.push_back({{"type", "image_url"}, {"image_url", {{"url", std::string(image_url)}}}});
  return {{"model", cfg.model_name},
          {"temperature", cfg.temperature},
          {"max_tokens", cfg.max_tokens},
          {"messages", json::array({{{"role", "user"}, {"content", content}}})}};
}

std::string extract_message_text(const json& response) {
  const json* content = nullptr;
  try {
    content = &response.at("choices").at(0).at("message").at("content");
  } catch (const json::exception&) {
    throw RemoteJudgeError("response has no choices[0].message.content");
  }
  if (content->is_string()) return content->get<std::string>();
  if (content->is_array()) {
    std::string text;
    for (const auto& part : *content)
      if (part.is_object() && part.value("type", "") == "text") text += part.value("text", "");
    return text;
  }
  throw RemoteJudgeError("message content is neither text nor a list of parts");
}

// --- transport ---------------------------------------------------------------

HttpTransport::HttpTransport(const RemoteJudgeConfig& cfg) : api_key_(cfg.api_key), timeout_(cfg.timeout) {
  cfg.validate();
  const auto scheme_end = cfg.endpoint_url.find("://");
  const auto path_start = cfg.endpoint_url.find('/', scheme_end + 3);
  base_ = cfg.endpoint_url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : cfg.endpoint_url.substr(path_start);
}

std::string HttpTransport::post_json(const std::string& body) {
  httplib::Client client(base_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  auto res = client.Post(path_, headers, body, "application/json");
  if (!res) throw RemoteJudgeError("transport failure: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300)
    throw RemoteJudgeError("HTTP " + std::to_string(res->status) + " from endpoint");
  return res->body;
}

RateLimiter::RateLimiter(double per_second) {
  if (per_second > 0.0)
    interval_ = std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(1.0 / per_second));
}

void RateLimiter::acquire() {
  if (interval_.count() == 0) return;
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(mutex_);
    const auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_);
    next_ = slot + interval_;
  }
  std::this_thread::sleep_until(slot);
}

// --- client ------------------------------------------------------------------

RemoteClient::RemoteClient(RemoteJudgeConfig cfg, std::shared_ptr<Transport> transport)
    : cfg_(std::move(cfg)), transport_(std::move(transport)), limiter_(cfg_.rate_limit) {
  cfg_.validate();
  if (!transport_) transport_ = std::make_shared<HttpTransport>(cfg_);
}

RemoteClient::Reply RemoteClient::complete(std::string_view prompt, std::string_view image_url,
                                           std::string_view context,
                                           const std::function<void(const std::string&)>& accept) {
  const std::string body = build_chat_request(cfg_, prompt, image_url).dump();
  const int budget = 1 + cfg_.max_retries;
  std::string last_error;
  bool last_was_parse = false;
  for (int attempt = 1; attempt <= budget; ++attempt) {
    limiter_.acquire();
    try {
      const std::string raw = transport_->post_json(body);
      json response;
      try {
        response = json::parse(raw);
      } catch (const json::exception&) {
        throw RemoteJudgeError("response body is not JSON");
      }
      std::string text = extract_message_text(response);
      if (accept) accept(text);
      if (attempt > 1) spdlog::info("{}: succeeded after {} retr{}", context, attempt - 1, attempt == 2 ? "y" : "ies");
      return {std::move(text), attempt};
    } catch (const UnparseableVerdict& e) {
      last_error = e.what();
      last_was_parse = true;
    } catch (const RemoteJudgeError& e) {
      last_error = e.what();
      last_was_parse = false;
    }
    if (attempt < budget)
      spdlog::warn("{}: attempt {}/{} failed ({}); retrying", context, attempt, budget, last_error);
  }
  const std::string msg = std::string(context) + ": " + last_error + " after " + std::to_string(budget) + " attempts";
  if (last_was_parse) throw UnparseableVerdict(msg);
  throw RemoteJudgeError(msg);
}

// --- descriptions --------------------------------------------------------------

DescriptionCache DescriptionCache::load(const std::filesystem::path& path) {
  DescriptionCache cache;
  std::ifstream in(path);
  if (!in) return cache;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = json::parse(line);
      cache.entries_[j.at("item_id").get<std::string>()] = j.at("description").get<std::string>();
    } catch (const json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": invalid description record: " + e.what());
    }
  }
  return cache;
}

bool DescriptionCache::contains(const std::string& id) const {
  std::lock_guard lock(mutex_);
  return entries_.contains(id);
}

const std::string& DescriptionCache::at(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(id);
  if (it == entries_.end()) throw DataError("no description cached for item \"" + id + "\" (run describe first)");
  return it->second;
}

void DescriptionCache::put(const std::string& id, std::string description) {
  std::lock_guard lock(mutex_);
  entries_[id] = std::move(description);
}

std::size_t DescriptionCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::string DescriptionCache::to_jsonl_line(const std::string& id, const std::string& description) {
  return json{{"item_id", id}, {"description", description}}.dump() + "\n";
}

namespace {

std::string http_get(const std::string& url) {
  const auto scheme_end = url.find("://");
  const auto path_start = url.find('/', scheme_end + 3);
  httplib::Client client(url.substr(0, path_start));
  client.set_follow_location(true);
  auto res = client.Get(path_start == std::string::npos ? "/" : url.substr(path_start));
  if (!res) throw DataError(url + ": download failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw DataError(url + ": HTTP " + std::to_string(res->status));
  return res->body;
}

std::string mime_for(const std::string& path) {
  std::string ext = std::filesystem::path(path).extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".png") return "image/png";
  if (ext == ".webp") return "image/webp";
  return "application/octet-stream";
}

}  // namespace

std::string item_image_url(const Cohort& cohort, const Item& item) {
  if (item.image_ref.empty()) throw DataError("item \"" + item.id + "\" has no image_ref");
  const std::string ref = cohort.resolve_image(item);
  if (is_url(ref)) return ref;
  return "data:" + mime_for(ref) + ";base64," + base64_encode(read_text_file(ref));
}

Raster load_item_image(const Cohort& cohort, const Item& item) {
  if (item.image_ref.empty()) throw DataError("item \"" + item.id + "\" has no image_ref");
  const std::string ref = cohort.resolve_image(item);
  if (is_url(ref)) return decode_image(http_get(ref), ref);
  return read_image(ref);
}

void describe_cohort(const Cohort& cohort, RemoteClient& client, const CriteriaConfig& crit, DescriptionCache& cache,
                     const std::filesystem::path& cache_path,
                     const std::function<void(const std::string&)>& progress) {
  const std::string prompt = build_describe_prompt(crit);
  std::vector<const Item*> todo;
  for (const Item& it : cohort.items())
    if (!cache.contains(it.id)) todo.push_back(&it);

  if (cache_path.has_parent_path()) std::filesystem::create_directories(cache_path.parent_path());
  std::ofstream out(cache_path, std::ios::app);
  if (!out) throw DataError("cannot append to " + cache_path.string());
  std::mutex out_mutex;
  std::exception_ptr failure;
  std::size_t done = 0;

  const auto n = static_cast<std::ptrdiff_t>(todo.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Item& item = *todo[static_cast<std::size_t>(i)];
    try {
      {
        std::lock_guard lock(out_mutex);
        if (failure) continue;
      }
      auto reply = client.complete(prompt, item_image_url(cohort, item), "describe " + item.id,
                                   [](const std::string& text) {
                                     if (text.find_first_not_of(" \t\r\n") == std::string::npos)
                                       throw UnparseableVerdict("empty description");
                                   });
      cache.put(item.id, reply.text);
      std::lock_guard lock(out_mutex);
      out << DescriptionCache::to_jsonl_line(item.id, reply.text) << std::flush;
      ++done;
      if (progress)
        progress("[describe] " + item.id + " (" + std::to_string(done) + "/" + std::to_string(todo.size()) + ")");
    } catch (...) {
      std::lock_guard lock(out_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

CompositeSource make_composite_source(const Cohort& cohort, ComposeConfig cfg) {
  cfg.validate();
  struct State {
    std::mutex mutex;
    std::map<std::pair<std::string, std::string>, std::string> recent;
  };
  auto state = std::make_shared<State>();
  return [&cohort, cfg, state](const Item& left, const Item& right) {
    const auto key = std::make_pair(left.id, right.id);
    {
      std::lock_guard lock(state->mutex);
      if (auto it = state->recent.find(key); it != state->recent.end()) return it->second;
    }
    std::string url = png_data_url(compose(load_item_image(cohort, left), load_item_image(cohort, right), cfg));
    std::lock_guard lock(state->mutex);
    if (state->recent.size() >= 8) state->recent.clear();  // votes of one pair arrive together
    state->recent.emplace(key, url);
    return url;
  };
}

Outcome remote_compare(const Item& left, const Item& right, std::string_view desc_a, std::string_view desc_b,
                       RemoteClient& client, const CriteriaConfig& crit, const CompositeSource& composite) {
  const std::string prompt = build_compare_prompt(desc_a, desc_b, crit);
  const std::string image = composite ? composite(left, right) : std::string();
  auto reply = client.complete(prompt, image, "pair " + left.id + " vs " + right.id,
                               [](const std::string& text) { parse_verdict(text); });
  Outcome out = parse_verdict(reply.text);
  out.attempts = reply.attempts;
  return out;
}

RemoteJudge::RemoteJudge(RemoteClient& client, CriteriaConfig crit, const DescriptionCache& descriptions,
                         CompositeSource composite)
    : client_(client), crit_(std::move(crit)), descriptions_(descriptions), composite_(std::move(composite)) {
  crit_.validate();
}

Outcome RemoteJudge::compare(const JudgeRequest& r) {
  return remote_compare(r.left, r.right, descriptions_.at(r.left.id), descriptions_.at(r.right.id), client_, crit_,
                        composite_);
}

}  // namespace livrank
