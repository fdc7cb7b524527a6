#include "livrank/replay.hpp"

#include "livrank/error.hpp"

namespace livrank {

ReplayJudge::PairKey ReplayJudge::key(const std::string& a, const std::string& b) {
  return a < b ? PairKey{a, b} : PairKey{b, a};
}

ReplayJudge::ReplayJudge(const std::vector<ComparisonRecord>& log) {
  for (const auto& r : log)
    if (!r.cached) pending_[key(r.left_id, r.right_id)].push_back(r);
}

Outcome ReplayJudge::compare(const JudgeRequest& req) {
  std::lock_guard lock(mutex_);
  if (req.vote == 0) {
    auto it = pending_.find(key(req.left.id, req.right.id));
    if (it == pending_.end() || it->second.empty())
      throw DataError("replay log has no further adjudication of " + req.left.id + " vs " + req.right.id);
    active_[req.adjudication] = std::move(it->second.front());
    it->second.pop_front();
  }
  auto rec = active_.find(req.adjudication);
  if (rec == active_.end())
    throw DataError("replay request for vote " + std::to_string(req.vote) + " of an adjudication that never started");
  const ComparisonRecord& r = rec->second;
  if (static_cast<std::size_t>(req.vote) >= r.votes.size())
    throw DataError("replay log holds " + std::to_string(r.votes.size()) + " votes for " + r.left_id + " vs " +
                    r.right_id + ", vote " + std::to_string(req.vote) + " requested");

  Outcome out = r.votes[static_cast<std::size_t>(req.vote)];
  if (r.left_id != req.left.id) out.winner = opposite(out.winner);
  out.judge_kind = JudgeKind::Replay;
  out.attempts = 1;
  return out;
}

}  // namespace livrank
