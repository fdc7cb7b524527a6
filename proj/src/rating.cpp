#include "livrank/rating.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "livrank/error.hpp"

namespace livrank {

void RatingParams::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!std::isfinite(mu0)) throw ConfigError("rating mu0 must be finite");
  if (!positive(sigma0)) throw ConfigError("rating sigma0 must be positive");
  if (!positive(beta)) throw ConfigError("rating beta must be positive");
  if (!std::isfinite(tau_dyn) || tau_dyn < 0.0) throw ConfigError("rating tau must be non-negative");
  if (draw_prob != 0.0) throw ConfigError("draw probability must be 0: comparisons never end in a draw");
}

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

double normal_pdf(double t) { return kInvSqrt2Pi * std::exp(-0.5 * t * t); }

// Mills ratio Q(x)/phi(x) for x > 0 by its continued fraction, evaluated
// bottom-up. Converges quickly for the x >= 5 range where it is used.
double mills_ratio(double x) {
  double acc = x;
  for (int k = 60; k >= 1; --k) acc = x + k / acc;
  return 1.0 / acc;
}

}  // namespace

double truncation_v(double t) noexcept {
  if (t < -5.0) return 1.0 / mills_ratio(-t);
  const double cdf = 0.5 * std::erfc(-t / std::numbers::sqrt2);
  return normal_pdf(t) / cdf;
}

double truncation_w(double t) noexcept {
  const double v = truncation_v(t);
  return std::clamp(v * (v + t), 0.0, 1.0);
}

std::pair<Rating, Rating> update_pair(const Rating& winner, const Rating& loser, const RatingParams& p) {
  const double tau2 = p.tau_dyn * p.tau_dyn;
  const double var_w = winner.sigma * winner.sigma + tau2;
  const double var_l = loser.sigma * loser.sigma + tau2;
  const double c2 = 2.0 * p.beta * p.beta + var_w + var_l;
  const double c = std::sqrt(c2);
  const double t = (winner.mu - loser.mu) / c;
  const double v = truncation_v(t);
  const double w = truncation_w(t);

  Rating nw = winner, nl = loser;
  nw.mu = winner.mu + var_w / c * v;
  nl.mu = loser.mu - var_l / c * v;
  nw.sigma = std::sqrt(var_w * (1.0 - var_w / c2 * w));
  nl.sigma = std::sqrt(var_l * (1.0 - var_l / c2 * w));
  ++nw.games;
  ++nl.games;
  if (!std::isfinite(nw.mu) || !std::isfinite(nl.mu) || !std::isfinite(nw.sigma) || !std::isfinite(nl.sigma))
    throw DataError("rating update for \"" + winner.item_id + "\" over \"" + loser.item_id + "\" is not finite");
  return {nw, nl};
}

RatingTable::RatingTable(std::span<const std::string> ids, const RatingParams& p) {
  p.validate();
  ratings_.reserve(ids.size());
  for (const auto& id : ids) {
    if (!index_.emplace(id, ratings_.size()).second) throw DataError("duplicate rating id \"" + id + "\"");
    ratings_.push_back({id, p.mu0, p.sigma0, 0});
  }
}

const Rating& RatingTable::at(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) throw DataError("no rating for \"" + std::string(id) + "\"");
  return ratings_[it->second];
}

Rating& RatingTable::at(std::string_view id) {
  return const_cast<Rating&>(static_cast<const RatingTable&>(*this).at(id));
}

bool RatingTable::contains(std::string_view id) const { return index_.contains(std::string(id)); }

RatingTable rate_log(std::span<const ComparisonRecord> log, std::span<const std::string> ids, const RatingParams& p) {
  RatingTable table(ids, p);
  for (const auto& r : log) {
    if (r.cached) continue;
    if (!table.contains(r.left_id) || !table.contains(r.right_id))
      throw DataError("log record " + std::to_string(r.seq) + " references an id missing from the manifest");
    if (r.final_winner != r.left_id && r.final_winner != r.right_id)
      throw DataError("log record " + std::to_string(r.seq) + " names a winner outside its pair");
    const std::string loser = r.loser_id();
    auto [w, l] = update_pair(table.at(r.final_winner), table.at(loser), p);
    table.at(r.final_winner) = std::move(w);
    table.at(loser) = std::move(l);
  }
  return table;
}

RatingTable rate_log(std::span<const ComparisonRecord> log, const Cohort& cohort, const RatingParams& p) {
  std::vector<std::string> ids;
  ids.reserve(cohort.size());
  for (const Item& it : cohort.items()) ids.push_back(it.id);
  return rate_log(log, ids, p);
}

std::string_view to_string(ScoreStrategy::Kind k) noexcept {
  switch (k) {
    case ScoreStrategy::Kind::RawMu: return "raw-mu";
    case ScoreStrategy::Kind::Conservative: return "conservative";
    case ScoreStrategy::Kind::MinMax: return "minmax";
  }
  return "?";
}

ScoreStrategy::Kind parse_score_kind(std::string_view text) {
  if (text == "raw-mu" || text == "mu") return ScoreStrategy::Kind::RawMu;
  if (text == "conservative") return ScoreStrategy::Kind::Conservative;
  if (text == "minmax") return ScoreStrategy::Kind::MinMax;
  throw ConfigError("unknown score strategy \"" + std::string(text) + "\" (raw-mu, conservative, minmax)");
}

std::vector<ScoredItem> to_scores(const RatingTable& table, const ScoreStrategy& strategy) {
  std::vector<ScoredItem> out;
  out.reserve(table.size());
  for (const Rating& r : table.ratings()) out.push_back({r.item_id, r.mu, r.sigma, r.mu});
  switch (strategy.kind) {
    case ScoreStrategy::Kind::RawMu:
      break;
    case ScoreStrategy::Kind::Conservative:
      for (auto& s : out) s.score = s.mu - strategy.k * s.sigma;
      break;
    case ScoreStrategy::Kind::MinMax: {
      if (!(strategy.hi > strategy.lo)) throw ConfigError("minmax range needs hi > lo");
      if (out.size() < 2) throw DataError("minmax scaling needs at least 2 rated items");
      auto [mn, mx] = std::minmax_element(out.begin(), out.end(),
                                          [](const ScoredItem& a, const ScoredItem& b) { return a.mu < b.mu; });
      const double lo = mn->mu, span = mx->mu - mn->mu;
      if (!(span > 0.0)) throw DataError("minmax scaling is undefined when every item has the same mu");
      for (auto& s : out) s.score = strategy.lo + (strategy.hi - strategy.lo) * ((s.mu - lo) / span);
      break;
    }
  }
  return out;
}

std::string_view to_string(GroupBy g) noexcept { return g == GroupBy::County ? "county" : "province"; }

namespace {

struct Accum {
  double sum = 0.0;
  std::size_t count = 0;
  double min = 0.0, max = 0.0;

  void add(double v) {
    if (count == 0) min = max = v;
    min = std::min(min, v);
    max = std::max(max, v);
    sum += v;
    ++count;
  }
  GroupStat stat(std::string name) const { return {std::move(name), sum / static_cast<double>(count), count, min, max}; }
};

}  // namespace

std::vector<GroupStat> aggregate(std::span<const ScoredItem> scores, const Cohort& cohort, GroupBy by) {
  std::map<std::string, Accum> groups;
  Accum all;
  for (const auto& s : scores) {
    const Item& it = cohort.at(s.item_id);
    const std::string& key = by == GroupBy::County ? it.county : it.province;
    if (key == kGlobalGroup)
      throw DataError("group name \"" + key + "\" collides with the global aggregate row");
    groups[key].add(s.score);
    all.add(s.score);
  }
  if (all.count == 0) throw DataError("nothing to aggregate: the score table is empty");
  std::vector<GroupStat> out;
  for (const auto& [name, acc] : groups) out.push_back(acc.stat(name));
  out.push_back(all.stat(std::string(kGlobalGroup)));
  return out;
}

}  // namespace livrank
