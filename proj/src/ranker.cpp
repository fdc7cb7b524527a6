#include "livrank/ranker.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "livrank/error.hpp"
#include "livrank/rng.hpp"

namespace livrank {

bool Ranking::contains(std::string_view id) const {
  return std::find(ordered_ids.begin(), ordered_ids.end(), id) != ordered_ids.end();
}

void Ranking::validate(const Cohort& cohort) const {
  std::unordered_set<std::string_view> seen;
  for (const auto& id : ordered_ids) {
    if (!cohort.contains(id)) throw DataError("ranking references unknown id \"" + id + "\"");
    if (!seen.insert(id).second) throw DataError("ranking lists \"" + id + "\" twice");
  }
}

void BudgetLedger::add(const ComparisonRecord& r) {
  if (r.cached) return;
  ++appearances[r.left_id];
  ++appearances[r.right_id];
  ++adjudications;
  judge_calls += r.calls;
}

std::int64_t BudgetLedger::count(const std::string& id) const {
  auto it = appearances.find(id);
  return it == appearances.end() ? 0 : it->second;
}

BudgetLedger BudgetLedger::from_log(std::span<const ComparisonRecord> log, const Cohort& cohort) {
  BudgetLedger l;
  for (const Item& it : cohort.items()) l.appearances[it.id] = 0;
  for (const auto& r : log) {
    if (!cohort.contains(r.left_id) || !cohort.contains(r.right_id))
      throw DataError("log record " + std::to_string(r.seq) + " references an item outside the cohort");
    l.add(r);
  }
  return l;
}

std::string_view to_string(InsertionRule r) noexcept {
  return r == InsertionRule::Bisection ? "bisection" : "neighbor-confirm";
}

InsertionRule parse_insertion_rule(std::string_view text) {
  if (text == "bisection") return InsertionRule::Bisection;
  if (text == "neighbor-confirm") return InsertionRule::NeighborConfirm;
  throw ConfigError("unknown insertion rule \"" + std::string(text) + "\" (bisection, neighbor-confirm)");
}

int comparison_bound(std::size_t n) noexcept {
  int bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  return bits + 1;
}

// --- adjudicator -----------------------------------------------------------------

Adjudicator::Adjudicator(Judge& judge, VotePolicy policy, std::uint64_t rng_seed, RecordSink sink)
    : judge_(judge), policy_(policy), rng_seed_(rng_seed), sink_(std::move(sink)) {
  policy_.validate();
}

void Adjudicator::emit(ComparisonRecord r) {
  ledger_.add(r);
  records_.push_back(std::move(r));
  if (sink_) sink_(records_.back());
}

const std::string& Adjudicator::adjudicate(const Item& a, const Item& b, Phase phase) {
  const std::uint64_t seq = seq_++;
  const bool swap = unit_uniform(derive_key(rng_seed_, seq, 0x51DEULL)) < 0.5;
  const Item& left = swap ? b : a;
  const Item& right = swap ? a : b;

  VoteResult vr = vote(left, right, judge_, policy_, seq);
  ComparisonRecord r;
  r.seq = seq;
  r.left_id = left.id;
  r.right_id = right.id;
  r.final_winner = vr.outcome.winner == Side::Left ? left.id : right.id;
  r.votes = std::move(vr.votes);
  r.phase = phase;
  r.calls = vr.calls;
  emit(std::move(r));
  return records_.back().final_winner;
}

void Adjudicator::note_cached(const Item& a, const Item& b, const std::string& winner, Phase phase) {
  ComparisonRecord r;
  r.seq = seq_++;
  r.left_id = a.id;
  r.right_id = b.id;
  r.final_winner = winner;
  r.phase = phase;
  r.cached = true;
  emit(std::move(r));
}

// --- insertion -------------------------------------------------------------------

InsertResult binary_insert(const Ranking& ranking, const Item& item, const Cohort& cohort, Adjudicator& adjudicator,
                           InsertionRule rule, Phase phase) {
  if (ranking.empty()) throw DataError("cannot binary-insert into an empty ranking");
  if (ranking.contains(item.id)) throw DataError("\"" + item.id + "\" is already ranked");

  const auto& ids = ranking.ordered_ids;
  const std::size_t n = ids.size();
  const std::size_t first_record = adjudicator.records().size();

  InsertResult res;
  res.stats.item_id = item.id;
  res.stats.ranking_size = n;
  res.stats.bound = comparison_bound(n);

  std::unordered_map<std::string, bool> memo;  // opponent -> item won
  auto item_beats = [&](std::size_t idx, Phase ph) {
    const Item& opponent = cohort.at(ids[idx]);
    if (auto it = memo.find(opponent.id); it != memo.end()) {
      ++res.stats.memo_hits;
      adjudicator.note_cached(item, opponent, it->second ? item.id : opponent.id, ph);
      return it->second;
    }
    const bool won = adjudicator.adjudicate(item, opponent, ph) == item.id;
    memo.emplace(opponent.id, won);
    ++res.stats.adjudications;
    return won;
  };

  std::size_t slot = 0;
  if (rule == InsertionRule::Bisection) {
    std::size_t lo = 0, hi = n;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (item_beats(mid, phase)) hi = mid;
      else lo = mid + 1;
    }
    slot = lo;
  } else {
    std::ptrdiff_t left = 0, right = static_cast<std::ptrdiff_t>(n) - 1;
    for (;;) {
      if (left > right) {  // unreachable while outcomes are memoized; kept as a guard
        slot = static_cast<std::size_t>(left);
        break;
      }
      const auto mid = static_cast<std::size_t>((left + right) / 2);
      if (item_beats(mid, phase)) {
        if (mid == 0 || !item_beats(mid - 1, Phase::NeighborCheck)) {
          slot = mid;
          break;
        }
        right = static_cast<std::ptrdiff_t>(mid) - 1;
      } else {
        if (mid == n - 1 || item_beats(mid + 1, Phase::NeighborCheck)) {
          slot = mid + 1;
          break;
        }
        left = static_cast<std::ptrdiff_t>(mid) + 1;
      }
    }
  }

  res.stats.position = slot;
  res.ranking.ordered_ids.reserve(n + 1);
  res.ranking.ordered_ids.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(slot));
  res.ranking.ordered_ids.push_back(item.id);
  res.ranking.ordered_ids.insert(res.ranking.ordered_ids.end(), ids.begin() + static_cast<std::ptrdiff_t>(slot), ids.end());
  const auto& all = adjudicator.records();
  res.records.assign(all.begin() + static_cast<std::ptrdiff_t>(first_record), all.end());
  return res;
}

SeedResult seed_ranking(std::span<const Item> first_items, const Cohort& cohort, Adjudicator& adjudicator,
                        std::span<const std::string> order, InsertionRule rule) {
  SeedResult res;
  if (!order.empty()) {
    res.ranking.ordered_ids.assign(order.begin(), order.end());
    for (const auto& id : order)
      if (!cohort.contains(id)) throw DataError("seed order references unknown id \"" + id + "\"");
    res.ranking.validate(cohort);
    return res;
  }
  if (first_items.empty()) throw DataError("seed ranking needs at least one item");
  res.ranking.ordered_ids = {first_items.front().id};
  for (const Item& it : first_items.subspan(1)) {
    InsertResult ins = binary_insert(res.ranking, it, cohort, adjudicator, rule, Phase::Seed);
    res.ranking = std::move(ins.ranking);
    res.records.insert(res.records.end(), ins.records.begin(), ins.records.end());
    res.insertions.push_back(ins.stats);
  }
  return res;
}

// --- whole cohort ------------------------------------------------------------------

void RankerConfig::validate() const {
  votes.validate();
  if (seed_size < 1) throw ConfigError("seed size must be at least 1");
  if (top_up_threshold < 0) throw ConfigError("top-up threshold must be non-negative");
  if (top_up_window < 1) throw ConfigError("top-up window must be at least 1");
  std::unordered_set<std::string> seen;
  for (const auto& id : seed_order)
    if (!seen.insert(id).second) throw ConfigError("seed order lists \"" + id + "\" twice");
}

namespace {

std::uint64_t pair_key(std::size_t a, std::size_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

void top_up(const Cohort& cohort, const Ranking& ranking, Adjudicator& adj, const RankerConfig& cfg,
            RankResult& res, const ProgressFn& progress) {
  const auto& ids = ranking.ordered_ids;
  const std::size_t n = ids.size();
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < n; ++i) pos.emplace(ids[i], i);

  std::unordered_set<std::uint64_t> played;
  for (const auto& r : adj.records())
    if (!r.cached) played.insert(pair_key(pos.at(r.left_id), pos.at(r.right_id)));

  const auto threshold = static_cast<std::int64_t>(cfg.top_up_threshold);
  std::vector<bool> exhausted(n, false);
  auto count = [&](std::size_t i) { return adj.ledger().count(ids[i]); };

  for (;;) {
    std::optional<std::size_t> x;
    for (std::size_t i = 0; i < n; ++i)
      if (!exhausted[i] && count(i) < threshold && (!x || count(i) < count(*x))) x = i;
    if (!x) break;

    auto search = [&](std::size_t max_distance, bool need_under) -> std::optional<std::size_t> {
      for (std::size_t d = 1; d <= max_distance; ++d) {
        for (int dir : {-1, 1}) {
          if (dir < 0 && d > *x) continue;
          const std::size_t q = dir < 0 ? *x - d : *x + d;
          if (q >= n || played.contains(pair_key(*x, q))) continue;
          if (need_under && count(q) >= threshold) continue;
          return q;
        }
      }
      return std::nullopt;
    };
    auto partner = search(static_cast<std::size_t>(cfg.top_up_window), true);
    if (!partner) partner = search(n, false);
    if (!partner) {
      exhausted[*x] = true;
      continue;
    }
    adj.adjudicate(cohort.at(ids[*x]), cohort.at(ids[*partner]), Phase::TopUp);
    played.insert(pair_key(*x, *partner));
    ++res.top_up_adjudications;
    if (progress) progress("top-up", ids[*x], static_cast<std::size_t>(count(*x)), static_cast<std::size_t>(threshold));
  }
}

}  // namespace

RankResult rank_cohort(const Cohort& cohort, Judge& judge, const RankerConfig& config, RecordSink sink,
                       ProgressFn progress) {
  config.validate();
  if (cohort.size() < 2) throw DataError("ranking needs at least 2 items, cohort has " + std::to_string(cohort.size()));

  std::vector<const Item*> order;
  for (const Item& it : cohort.items()) order.push_back(&it);
  if (config.shuffle) {
    std::mt19937_64 rng(derive_key(config.rng_seed, 0x5AFF1EULL));
    std::shuffle(order.begin(), order.end(), rng);
  }

  Adjudicator adj(judge, config.votes, config.rng_seed, std::move(sink));
  RankResult res;

  std::vector<Item> seed_items;
  std::vector<const Item*> rest;
  if (!config.seed_order.empty()) {
    for (const Item* it : order)
      if (std::find(config.seed_order.begin(), config.seed_order.end(), it->id) == config.seed_order.end())
        rest.push_back(it);
  } else {
    const std::size_t k = std::min(config.seed_size, order.size());
    for (std::size_t i = 0; i < k; ++i) seed_items.push_back(*order[i]);
    rest.assign(order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
  }

  SeedResult seed = seed_ranking(seed_items, cohort, adj, config.seed_order, config.rule);
  Ranking ranking = std::move(seed.ranking);
  res.insertions = std::move(seed.insertions);
  if (progress)
    for (std::size_t i = 0; i < ranking.size(); ++i) progress("seed", ranking.ordered_ids[i], i + 1, cohort.size());

  for (const Item* it : rest) {
    InsertResult ins = binary_insert(ranking, *it, cohort, adj, config.rule, Phase::Insert);
    ranking = std::move(ins.ranking);
    res.insertions.push_back(ins.stats);
    if (progress) progress("insert", it->id, ranking.size(), cohort.size());
  }

  if (config.top_up && config.top_up_threshold > 0) top_up(cohort, ranking, adj, config, res, progress);

  for (const auto& s : res.insertions)
    if (!s.within_bound()) ++res.bound_violations;
  res.ranking = std::move(ranking);
  res.log = adj.records();
  res.ledger = adj.ledger();
  for (const Item& it : cohort.items()) res.ledger.appearances.try_emplace(it.id, 0);
  return res;
}

}  // namespace livrank
