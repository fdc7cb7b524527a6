#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "livrank/comparison_log.hpp"
#include "livrank/corpus.hpp"

namespace livrank {

/// Two-player, no-draw TrueSkill parameters.
struct RatingParams {
  double mu0 = 25.0;
  double sigma0 = 25.0 / 3.0;
  double beta = 25.0 / 6.0;
  double tau_dyn = 25.0 / 300.0;
  double draw_prob = 0.0;

  void validate() const;
};

struct Rating {
  std::string item_id;
  double mu = 25.0;
  double sigma = 25.0 / 3.0;
  int games = 0;

  friend bool operator==(const Rating&, const Rating&) = default;
};

/// v(t) = phi(t) / Phi(t) and w(t) = v(t) (v(t) + t), stable in the left tail.
double truncation_v(double t) noexcept;
double truncation_w(double t) noexcept;

/// Moment-matched update after `winner` beat `loser`. Dynamics variance
/// tau_dyn^2 is added to both before the update.
std::pair<Rating, Rating> update_pair(const Rating& winner, const Rating& loser,
                                      const RatingParams& p = {});

class RatingTable {
 public:
  RatingTable() = default;
  RatingTable(std::span<const std::string> ids, const RatingParams& p);

  const std::vector<Rating>& ratings() const noexcept { return ratings_; }
  const Rating& at(std::string_view id) const;
  Rating& at(std::string_view id);
  bool contains(std::string_view id) const;
  std::size_t size() const noexcept { return ratings_.size(); }

 private:
  std::vector<Rating> ratings_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Prior for every id, then update_pair over non-cached records in log order.
RatingTable rate_log(std::span<const ComparisonRecord> log, std::span<const std::string> ids,
                     const RatingParams& p = {});
RatingTable rate_log(std::span<const ComparisonRecord> log, const Cohort& cohort,
                     const RatingParams& p = {});

struct ScoreStrategy {
  enum class Kind { RawMu, Conservative, MinMax };
  Kind kind = Kind::MinMax;
  double k = 3.0;     // Conservative: mu - k sigma
  double lo = 0.0;    // MinMax range
  double hi = 100.0;

  static ScoreStrategy raw_mu() { return {Kind::RawMu}; }
  static ScoreStrategy conservative(double k = 3.0) { return {Kind::Conservative, k}; }
  static ScoreStrategy min_max(double lo = 0.0, double hi = 100.0) { return {Kind::MinMax, 3.0, lo, hi}; }
};
std::string_view to_string(ScoreStrategy::Kind k) noexcept;
ScoreStrategy::Kind parse_score_kind(std::string_view text);

struct ScoredItem {
  std::string item_id;
  double mu = 0.0;
  double sigma = 0.0;
  double score = 0.0;
};

std::vector<ScoredItem> to_scores(const RatingTable& table, const ScoreStrategy& strategy);

enum class GroupBy { County, Province };
std::string_view to_string(GroupBy g) noexcept;

struct GroupStat {
  std::string group;
  double mean = 0.0;
  std::size_t count = 0;
  double min = 0.0;
  double max = 0.0;
};

inline constexpr std::string_view kGlobalGroup = "ALL";

/// Per-group mean/count/min/max sorted by group name, followed by the global row.
std::vector<GroupStat> aggregate(std::span<const ScoredItem> scores, const Cohort& cohort, GroupBy by);

}  // namespace livrank
