#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "livrank/corpus.hpp"

namespace livrank {

enum class Side { Left, Right };
enum class JudgeKind { Simulated, Remote, Replay };

constexpr Side opposite(Side s) noexcept { return s == Side::Left ? Side::Right : Side::Left; }
std::string_view to_string(Side s) noexcept;
std::string_view to_string(JudgeKind k) noexcept;
Side parse_side(std::string_view text);
JudgeKind parse_judge_kind(std::string_view text);

/// A forced-choice verdict: there is no draw.
struct Outcome {
  Side winner = Side::Left;
  std::optional<std::string> raw_text;
  JudgeKind judge_kind = JudgeKind::Simulated;
  int attempts = 1;  // transport/parse attempts spent by the judge

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// One base-judge call. `adjudication` is the ranker's pair sequence number and
/// `vote` the index of this call within the majority vote for that pair.
struct JudgeRequest {
  const Item& left;
  const Item& right;
  std::uint64_t adjudication = 0;
  int vote = 0;
};

/// Pairwise comparator. Implementations must tolerate concurrent calls.
class Judge {
 public:
  virtual ~Judge() = default;
  virtual Outcome compare(const JudgeRequest& request) = 0;
  virtual JudgeKind kind() const noexcept = 0;
  /// Whether the votes of one pair may be issued concurrently.
  virtual bool parallel_votes() const noexcept { return false; }
};

enum class NoiseKind { Deterministic, BradleyTerry, Thurstone };
std::string_view to_string(NoiseKind k) noexcept;
NoiseKind parse_noise_kind(std::string_view text);

struct NoiseModel {
  NoiseKind kind = NoiseKind::BradleyTerry;
  double sensitivity = 1.0;  // ignored by Deterministic
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// P(left wins) under Bradley-Terry for latent difference `diff`.
double bradley_terry_probability(double diff, double sensitivity) noexcept;

/// Simulated verdict from latent scores. Randomness is a pure function of
/// (rng_seed, both ids, call_index). Exact latent ties under Deterministic
/// are resolved in favour of the lexicographically smaller id and noted in
/// raw_text.
Outcome simulated_compare(const Item& left, const Item& right, const NoiseModel& noise,
                          std::uint64_t call_index);

class SimulatedJudge final : public Judge {
 public:
  explicit SimulatedJudge(NoiseModel noise);
  Outcome compare(const JudgeRequest& request) override;
  JudgeKind kind() const noexcept override { return JudgeKind::Simulated; }
  const NoiseModel& noise() const noexcept { return noise_; }

 private:
  NoiseModel noise_;
};

struct VotePolicy {
  int min_votes = 2;
  int max_votes = 3;
  int required_agreement = 2;

  void validate() const;
};

struct VoteResult {
  Outcome outcome;             // the winning verdict (first vote for that side)
  std::vector<Outcome> votes;  // every parsed vote, in call order
  int calls = 0;               // base-judge calls, including unparseable ones
};

/// Majority vote: issues min_votes calls, then one at a time up to max_votes,
/// stopping as soon as one side has required_agreement votes. Unparseable
/// votes count as calls but not as votes.
VoteResult vote(const Item& left, const Item& right, Judge& judge, const VotePolicy& policy,
                std::uint64_t adjudication = 0);

}  // namespace livrank
