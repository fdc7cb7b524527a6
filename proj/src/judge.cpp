#include "livrank/judge.hpp"

#include <array>
#include <cmath>
#include <exception>
#include <future>

#include "livrank/error.hpp"
#include "livrank/rng.hpp"

namespace livrank {

std::string_view to_string(Side s) noexcept { return s == Side::Left ? "left" : "right"; }

std::string_view to_string(JudgeKind k) noexcept {
  switch (k) {
    case JudgeKind::Simulated: return "simulated";
    case JudgeKind::Remote: return "remote";
    case JudgeKind::Replay: return "replay";
  }
  return "?";
}

Side parse_side(std::string_view text) {
  if (text == "left") return Side::Left;
  if (text == "right") return Side::Right;
  throw DataError("unknown side \"" + std::string(text) + "\"");
}

JudgeKind parse_judge_kind(std::string_view text) {
  if (text == "simulated" || text == "sim") return JudgeKind::Simulated;
  if (text == "remote") return JudgeKind::Remote;
  if (text == "replay") return JudgeKind::Replay;
  throw ConfigError("unknown judge kind \"" + std::string(text) + "\"");
}

std::string_view to_string(NoiseKind k) noexcept {
  switch (k) {
    case NoiseKind::Deterministic: return "deterministic";
    case NoiseKind::BradleyTerry: return "bradley-terry";
    case NoiseKind::Thurstone: return "thurstone";
  }
  return "?";
}

NoiseKind parse_noise_kind(std::string_view text) {
  if (text == "deterministic") return NoiseKind::Deterministic;
  if (text == "bradley-terry" || text == "bt") return NoiseKind::BradleyTerry;
  if (text == "thurstone") return NoiseKind::Thurstone;
  throw ConfigError("unknown noise model \"" + std::string(text) + "\" (deterministic, bradley-terry, thurstone)");
}

void NoiseModel::validate() const {
  if (kind != NoiseKind::Deterministic && !(sensitivity > 0.0 && std::isfinite(sensitivity)))
    throw ConfigError("noise sensitivity must be a positive finite number");
}

double bradley_terry_probability(double diff, double sensitivity) noexcept {
  return 1.0 / (1.0 + std::exp(-sensitivity * diff));
}

Outcome simulated_compare(const Item& left, const Item& right, const NoiseModel& noise, std::uint64_t call_index) {
  if (!left.latent_score || !right.latent_score)
    throw DataError("simulated judge needs latent_score for \"" + (left.latent_score ? right.id : left.id) + "\"");
  const double sa = *left.latent_score;
  const double sb = *right.latent_score;
  const std::uint64_t key = derive_key(noise.rng_seed, fnv1a(left.id), fnv1a(right.id), call_index);

  Outcome out;
  out.judge_kind = JudgeKind::Simulated;
  switch (noise.kind) {
    case NoiseKind::Deterministic:
      if (sa == sb) {
        out.winner = left.id < right.id ? Side::Left : Side::Right;
        out.raw_text = "latent tie between " + left.id + " and " + right.id + "; resolved by id order";
      } else {
        out.winner = sa > sb ? Side::Left : Side::Right;
      }
      break;
    case NoiseKind::BradleyTerry:
      out.winner = unit_uniform(key) < bradley_terry_probability(sa - sb, noise.sensitivity) ? Side::Left : Side::Right;
      break;
    case NoiseKind::Thurstone: {
      const double sd = 1.0 / noise.sensitivity;
      const double pa = sa + sd * unit_normal(splitmix64(key ^ 0xA1ULL));
      const double pb = sb + sd * unit_normal(splitmix64(key ^ 0xB2ULL));
      out.winner = pa > pb ? Side::Left : Side::Right;
      break;
    }
  }
  return out;
}

SimulatedJudge::SimulatedJudge(NoiseModel noise) : noise_(noise) { noise_.validate(); }

Outcome SimulatedJudge::compare(const JudgeRequest& r) {
  return simulated_compare(r.left, r.right, noise_, (r.adjudication << 8) | static_cast<std::uint64_t>(r.vote & 0xFF));
}

void VotePolicy::validate() const {
  if (min_votes < 1) throw ConfigError("min_votes must be at least 1");
  if (min_votes > max_votes) throw ConfigError("min_votes must not exceed max_votes");
  if (required_agreement < 1 || required_agreement > max_votes)
    throw ConfigError("required_agreement must lie in [1, max_votes]");
  if (max_votes > 255) throw ConfigError("max_votes must be at most 255");
}

namespace {

std::optional<Outcome> call_once(Judge& judge, const Item& left, const Item& right, std::uint64_t adjudication,
                                 int index) {
  try {
    return judge.compare({left, right, adjudication, index});
  } catch (const UnparseableVerdict&) {
    return std::nullopt;
  }
}

}  // namespace

VoteResult vote(const Item& left, const Item& right, Judge& judge, const VotePolicy& policy,
                std::uint64_t adjudication) {
  policy.validate();
  if (left.id == right.id) throw DataError("an item cannot be compared with itself (\"" + left.id + "\")");

  std::vector<std::optional<Outcome>> issued;
  issued.reserve(static_cast<std::size_t>(policy.max_votes));

  if (judge.parallel_votes() && policy.min_votes > 1) {
    std::vector<std::future<std::optional<Outcome>>> batch;
    for (int i = 0; i < policy.min_votes; ++i)
      batch.push_back(std::async(std::launch::async, call_once, std::ref(judge), std::cref(left), std::cref(right),
                                 adjudication, i));
    std::exception_ptr failure;
    for (auto& f : batch) {
      try {
        issued.push_back(f.get());
      } catch (...) {
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (int i = 0; i < policy.min_votes; ++i) issued.push_back(call_once(judge, left, right, adjudication, i));
  }

  VoteResult res;
  std::array<int, 2> tally{0, 0};
  std::optional<Side> decided;
  auto absorb = [&](const std::optional<Outcome>& o) {
    ++res.calls;
    if (!o) return;
    res.votes.push_back(*o);
    const int side = o->winner == Side::Left ? 0 : 1;
    if (++tally[side] >= policy.required_agreement && !decided) {
      decided = o->winner;
      res.outcome = *o;
    }
  };
  for (const auto& o : issued) absorb(o);
  while (!decided && res.calls < policy.max_votes) absorb(call_once(judge, left, right, adjudication, res.calls));

  if (!decided)
    throw UndecidedError("no verdict for " + left.id + " vs " + right.id + ": " + std::to_string(res.calls) +
                         " calls gave " + std::to_string(tally[0]) + " left / " + std::to_string(tally[1]) +
                         " right, needed " + std::to_string(policy.required_agreement));
  return res;
}

}  // namespace livrank
