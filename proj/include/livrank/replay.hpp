#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "livrank/comparison_log.hpp"
#include "livrank/judge.hpp"

namespace livrank {

/// Answers comparisons from a stored log, so a ranking can be recomputed
/// offline without remote calls. Each unordered pair consumes the logged
/// adjudications for that pair in log order; orientation is corrected when
/// the request's left/right assignment differs from the log's.
class ReplayJudge final : public Judge {
 public:
  explicit ReplayJudge(const std::vector<ComparisonRecord>& log);

  Outcome compare(const JudgeRequest& request) override;
  JudgeKind kind() const noexcept override { return JudgeKind::Replay; }

 private:
  using PairKey = std::pair<std::string, std::string>;
  static PairKey key(const std::string& a, const std::string& b);

  std::mutex mutex_;
  std::map<PairKey, std::deque<ComparisonRecord>> pending_;
  std::map<std::uint64_t, ComparisonRecord> active_;  // adjudication -> record being replayed
};

}  // namespace livrank
