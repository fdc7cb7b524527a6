#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "livrank/ranker.hpp"
#include "livrank/rating.hpp"

namespace livrank {

/// Ranking CSV `rank,item_id`. Ranks must be exactly 1..n in any row order.
Ranking read_ranking(const std::filesystem::path& path);
std::string format_ranking(const Ranking& ranking);

/// Ledger CSV `item_id,appearances`, in the given id order.
std::string format_ledger(const BudgetLedger& ledger, const Cohort& cohort);

/// Per-insertion diagnostics CSV.
std::string format_insertions(std::span<const InsertionStats> stats);

/// Scores CSV `item_id,mu,sigma,score,province,county`.
struct ScoreRow {
  ScoredItem score;
  std::string province;
  std::string county;
};
std::string format_scores(std::span<const ScoredItem> scores, const Cohort& cohort);
std::vector<ScoreRow> read_scores(const std::filesystem::path& path);

/// Aggregate CSV `group,mean,count,min,max`.
std::string format_aggregate(std::span<const GroupStat> groups);
std::vector<GroupStat> read_aggregate(const std::filesystem::path& path);

}  // namespace livrank
