#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "livrank/judge.hpp"

namespace livrank {

enum class Phase { Seed, Insert, NeighborCheck, TopUp };
std::string_view to_string(Phase p) noexcept;
Phase parse_phase(std::string_view text);

/// One adjudicated pair. Memoized re-queries are logged with cached=true and
/// no votes; they are not new games.
struct ComparisonRecord {
  std::uint64_t seq = 0;
  std::string left_id;
  std::string right_id;
  std::vector<Outcome> votes;
  std::string final_winner;
  Phase phase = Phase::Insert;
  bool cached = false;
  int calls = 0;  // base-judge calls spent (>= votes.size())

  const std::string& loser_id() const { return final_winner == left_id ? right_id : left_id; }
  friend bool operator==(const ComparisonRecord&, const ComparisonRecord&) = default;
};

nlohmann::json to_json(const ComparisonRecord& r);
ComparisonRecord record_from_json(const nlohmann::json& j);

/// Append-only JSONL writer; one line per record, flushed per record,
/// safe to share between threads.
class LogWriter {
 public:
  explicit LogWriter(const std::filesystem::path& path, bool truncate = true);
  void append(const ComparisonRecord& r);
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::mutex mutex_;
  std::ofstream out_;
};

/// Reads a JSONL comparison log; blank lines are skipped. Errors carry line numbers.
std::vector<ComparisonRecord> read_log(const std::filesystem::path& path);
std::vector<ComparisonRecord> parse_log(std::istream& in, std::string_view source);
std::string to_jsonl(std::span<const ComparisonRecord> records);

}  // namespace livrank
