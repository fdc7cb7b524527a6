#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "livrank/comparison_log.hpp"
#include "livrank/corpus.hpp"
#include "livrank/judge.hpp"

namespace livrank {

/// Item ids, best (most livable) first.
struct Ranking {
  std::vector<std::string> ordered_ids;

  std::size_t size() const noexcept { return ordered_ids.size(); }
  bool empty() const noexcept { return ordered_ids.empty(); }
  bool contains(std::string_view id) const;
  /// Throws DataError on duplicates or ids outside `cohort`.
  void validate(const Cohort& cohort) const;

  friend bool operator==(const Ranking&, const Ranking&) = default;
};

/// Per-item appearance counts plus totals, aggregated from non-cached records.
struct BudgetLedger {
  std::map<std::string, std::int64_t> appearances;
  std::int64_t adjudications = 0;
  std::int64_t judge_calls = 0;

  void add(const ComparisonRecord& r);
  std::int64_t count(const std::string& id) const;
  static BudgetLedger from_log(std::span<const ComparisonRecord> log, const Cohort& cohort);

  friend bool operator==(const BudgetLedger&, const BudgetLedger&) = default;
};

enum class InsertionRule {
  /// Midpoint probes only; the slot's neighbours are always among the probes.
  Bisection,
  /// The printed pseudocode: a win (loss) against the midpoint is confirmed
  /// against the midpoint's upper (lower) neighbour before inserting.
  NeighborConfirm,
};
std::string_view to_string(InsertionRule r) noexcept;
InsertionRule parse_insertion_rule(std::string_view text);

/// ceil(log2 n) + 1 for n >= 1.
int comparison_bound(std::size_t n) noexcept;

using RecordSink = std::function<void(const ComparisonRecord&)>;

/// Runs majority-voted pair adjudications, randomizing left/right per pair,
/// numbering records and maintaining the ledger.
class Adjudicator {
 public:
  Adjudicator(Judge& judge, VotePolicy policy, std::uint64_t rng_seed = 0, RecordSink sink = {});

  /// Returns the winner's id. Appends the record (and forwards it to the sink).
  const std::string& adjudicate(const Item& a, const Item& b, Phase phase);
  /// Logs a memoized re-query without calling the judge.
  void note_cached(const Item& a, const Item& b, const std::string& winner, Phase phase);

  const std::vector<ComparisonRecord>& records() const noexcept { return records_; }
  const BudgetLedger& ledger() const noexcept { return ledger_; }
  std::uint64_t next_seq() const noexcept { return seq_; }

 private:
  void emit(ComparisonRecord r);

  Judge& judge_;
  VotePolicy policy_;
  std::uint64_t rng_seed_;
  RecordSink sink_;
  std::uint64_t seq_ = 0;
  std::vector<ComparisonRecord> records_;
  BudgetLedger ledger_;
};

struct InsertionStats {
  std::string item_id;
  std::size_t ranking_size = 0;  // n before insertion
  std::size_t position = 0;      // 0-based slot chosen
  int adjudications = 0;         // distinct pairs adjudicated
  int memo_hits = 0;
  int bound = 0;                 // ceil(log2 n) + 1
  bool within_bound() const noexcept { return adjudications <= bound; }
};

struct InsertResult {
  Ranking ranking;
  std::vector<ComparisonRecord> records;
  InsertionStats stats;
};

/// Inserts `item` into a non-empty ranking. Outcomes of (item, opponent) are
/// memoized for the duration of this insertion.
InsertResult binary_insert(const Ranking& ranking, const Item& item, const Cohort& cohort,
                           Adjudicator& adjudicator, InsertionRule rule = InsertionRule::Bisection,
                           Phase phase = Phase::Insert);

struct SeedResult {
  Ranking ranking;
  std::vector<ComparisonRecord> records;
  std::vector<InsertionStats> insertions;
};

/// Explicit `order` is taken verbatim (zero judge calls); otherwise the seed
/// is built from a singleton by binary insertion with phase Seed.
SeedResult seed_ranking(std::span<const Item> first_items, const Cohort& cohort,
                        Adjudicator& adjudicator, std::span<const std::string> order = {},
                        InsertionRule rule = InsertionRule::Bisection);

struct RankerConfig {
  std::size_t seed_size = 10;
  std::vector<std::string> seed_order;  // explicit predetermined seed ranking
  bool top_up = true;
  int top_up_threshold = 20;
  int top_up_window = 10;               // preferred partner distance for top-up
  InsertionRule rule = InsertionRule::Bisection;
  bool shuffle = false;                 // seeded shuffle of the insertion order
  std::uint64_t rng_seed = 0;
  VotePolicy votes;

  void validate() const;
};

struct RankResult {
  Ranking ranking;
  std::vector<ComparisonRecord> log;
  BudgetLedger ledger;
  std::vector<InsertionStats> insertions;
  std::size_t bound_violations = 0;
  std::size_t top_up_adjudications = 0;
};

/// Progress callback: (stage, item id, done, total).
using ProgressFn = std::function<void(std::string_view, const std::string&, std::size_t, std::size_t)>;

/// Seeds, inserts the remaining items, then tops up under-compared items
/// against unplayed rank neighbours. Records reach `sink` as they happen, so
/// a judge failure leaves the log complete up to the failing pair.
RankResult rank_cohort(const Cohort& cohort, Judge& judge, const RankerConfig& config,
                       RecordSink sink = {}, ProgressFn progress = {});

}  // namespace livrank
