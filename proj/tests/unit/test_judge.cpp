#include <doctest.h>

#include <atomic>
#include <cmath>
#include <deque>
#include <mutex>

#include "livrank/error.hpp"
#include "livrank/judge.hpp"

using namespace livrank;

namespace {

Item item(std::string id, double latent) { return {std::move(id), "", "", "", "", latent}; }

/// Plays back a fixed script of verdicts ('A', 'B', or '?' for unparseable).
class ScriptedJudge : public Judge {
 public:
  explicit ScriptedJudge(std::string script, bool parallel = false) : script_(std::move(script)), parallel_(parallel) {}
  Outcome compare(const JudgeRequest& r) override {
    ++calls;
    const char c = script_.at(static_cast<std::size_t>(r.vote));
    if (c == '?') throw UnparseableVerdict("garbage");
    return {c == 'A' ? Side::Left : Side::Right, std::string(1, c), JudgeKind::Simulated, 1};
  }
  JudgeKind kind() const noexcept override { return JudgeKind::Simulated; }
  bool parallel_votes() const noexcept override { return parallel_; }
  std::atomic<int> calls{0};

 private:
  std::string script_;
  bool parallel_;
};

double left_win_rate(const Item& a, const Item& b, const NoiseModel& m, int draws) {
  int wins = 0;
  for (int i = 0; i < draws; ++i) wins += simulated_compare(a, b, m, static_cast<std::uint64_t>(i)).winner == Side::Left;
  return static_cast<double>(wins) / draws;
}

}  // namespace

TEST_CASE("deterministic judge follows the latent order") {
  const NoiseModel m{NoiseKind::Deterministic, 1.0, 0};
  CHECK(simulated_compare(item("a", 0.9), item("b", 0.1), m, 0).winner == Side::Left);
  CHECK(simulated_compare(item("a", 0.1), item("b", 0.9), m, 0).winner == Side::Right);
}

TEST_CASE("deterministic latent ties go to the smaller id and are reported") {
  const NoiseModel m{NoiseKind::Deterministic, 1.0, 0};
  const Outcome o1 = simulated_compare(item("b", 0.5), item("a", 0.5), m, 0);
  CHECK(o1.winner == Side::Right);
  REQUIRE(o1.raw_text.has_value());
  CHECK(o1.raw_text->find("tie") != std::string::npos);
  CHECK(simulated_compare(item("a", 0.5), item("b", 0.5), m, 0).winner == Side::Left);
}

TEST_CASE("missing latent score is a data error") {
  const Item bare{"x", "", "", "", "", std::nullopt};
  CHECK_THROWS_AS(simulated_compare(bare, item("y", 1), NoiseModel{}, 0), DataError);
}

TEST_CASE("Bradley-Terry equal scores win half the time") {
  for (double k : {0.5, 2.0, 10.0}) {
    const NoiseModel m{NoiseKind::BradleyTerry, k, 99};
    CHECK(std::abs(left_win_rate(item("a", 0.3), item("b", 0.3), m, 10000) - 0.5) <= 0.02);
  }
}

TEST_CASE("Bradley-Terry win rate matches the logistic curve") {
  const double expected = 1.0 / (1.0 + std::exp(-2.0));
  CHECK(expected == doctest::Approx(0.880797).epsilon(1e-6));
  CHECK(bradley_terry_probability(1.0, 2.0) == doctest::Approx(expected));
  const NoiseModel m{NoiseKind::BradleyTerry, 2.0, 1234};
  const double rate = left_win_rate(item("a", 1.0), item("b", 0.0), m, 10000);
  CHECK(std::abs(rate - expected) <= 0.01);
}

TEST_CASE("simulated win rates are symmetric in position") {
  for (NoiseKind kind : {NoiseKind::BradleyTerry, NoiseKind::Thurstone}) {
    const NoiseModel m{kind, 1.5, 77};
    const Item x = item("x", 0.8), y = item("y", 0.2);
    const double x_left = left_win_rate(x, y, m, 20000);
    const double x_right = 1.0 - left_win_rate(y, x, m, 20000);
    CHECK(std::abs(x_left - x_right) <= 0.02);
  }
}

TEST_CASE("Bradley-Terry and Thurstone win rates increase with the latent gap") {
  for (NoiseKind kind : {NoiseKind::BradleyTerry, NoiseKind::Thurstone}) {
    const NoiseModel m{kind, 1.0, 5};
    double previous = 0.0;
    for (double gap = 0.0; gap <= 3.0; gap += 0.5) {
      const double rate = left_win_rate(item("a", gap), item("b", 0.0), m, 20000);
      CHECK(rate > previous);
      if (gap > 0) CHECK(rate > 0.5);
      previous = rate;
    }
  }
}

TEST_CASE("Thurstone win rate matches the normal CDF") {
  // Left wins iff sA - sB + (eA - eB) / k > 0, eA - eB ~ N(0, 2).
  const double k = 1.5, gap = 0.6;
  const double expected = 0.5 * std::erfc(-(gap * k) / 2.0);
  const NoiseModel m{NoiseKind::Thurstone, k, 321};
  CHECK(std::abs(left_win_rate(item("a", gap), item("b", 0), m, 20000) - expected) <= 0.01);
}

TEST_CASE("simulated verdicts are reproducible from seed and call index") {
  const NoiseModel m{NoiseKind::BradleyTerry, 1.0, 42};
  const Item a = item("a", 0.2), b = item("b", 0.1);
  for (std::uint64_t i = 0; i < 100; ++i) CHECK(simulated_compare(a, b, m, i).winner == simulated_compare(a, b, m, i).winner);
  NoiseModel other = m;
  other.rng_seed = 43;
  int differ = 0;
  for (std::uint64_t i = 0; i < 200; ++i) differ += simulated_compare(a, b, m, i).winner != simulated_compare(a, b, other, i).winner;
  CHECK(differ > 0);
}

TEST_CASE("noise model validation") {
  CHECK_THROWS_AS((NoiseModel{NoiseKind::BradleyTerry, 0.0, 0}.validate()), ConfigError);
  CHECK_THROWS_AS((NoiseModel{NoiseKind::Thurstone, -1.0, 0}.validate()), ConfigError);
  CHECK_NOTHROW((NoiseModel{NoiseKind::Deterministic, 0.0, 0}.validate()));
  CHECK(parse_noise_kind("thurstone") == NoiseKind::Thurstone);
  CHECK_THROWS_AS(parse_noise_kind("gaussian"), ConfigError);
}

TEST_CASE("vote: two agreeing votes stop early") {
  ScriptedJudge j("AAB");
  const VoteResult r = vote(item("a", 0), item("b", 0), j, VotePolicy{});
  CHECK(r.outcome.winner == Side::Left);
  CHECK(r.calls == 2);
  CHECK(r.votes.size() == 2);
}

TEST_CASE("vote: split votes go to a third") {
  ScriptedJudge j("ABA");
  const VoteResult r = vote(item("a", 0), item("b", 0), j, VotePolicy{});
  CHECK(r.outcome.winner == Side::Left);
  CHECK(r.calls == 3);
  CHECK(r.votes.size() == 3);

  ScriptedJudge k("BAB");
  CHECK(vote(item("a", 0), item("b", 0), k, VotePolicy{}).outcome.winner == Side::Right);
}

TEST_CASE("vote: deterministic judge always uses exactly min_votes calls") {
  SimulatedJudge j(NoiseModel{NoiseKind::Deterministic, 1.0, 0});
  for (int i = 0; i < 50; ++i) {
    const VoteResult r = vote(item("a", i), item("b", 25), j, VotePolicy{}, static_cast<std::uint64_t>(i));
    CHECK(r.calls == 2);
  }
}

TEST_CASE("vote: unparseable replies count as calls and can leave the pair undecided") {
  ScriptedJudge j("?AA");
  const VoteResult r = vote(item("a", 0), item("b", 0), j, VotePolicy{});
  CHECK(r.calls == 3);
  CHECK(r.votes.size() == 2);
  CHECK(r.outcome.winner == Side::Left);

  ScriptedJudge k("?AB");
  CHECK_THROWS_AS(vote(item("a", 0), item("b", 0), k, VotePolicy{}), UndecidedError);
  CHECK(k.calls == 3);
}

TEST_CASE("vote never exceeds max_votes, also with parallel first votes") {
  for (bool parallel : {false, true}) {
    for (const char* script : {"AB?B?", "??A??", "BBBBB", "ABABA"}) {
      ScriptedJudge j(script, parallel);
      const VotePolicy policy{2, 4, 3};
      try {
        const VoteResult r = vote(item("a", 0), item("b", 0), j, policy);
        CHECK(r.calls <= policy.max_votes);
      } catch (const UndecidedError&) {
      }
      CHECK(j.calls <= policy.max_votes);
    }
  }
}

TEST_CASE("vote policy validation and self-comparison") {
  CHECK_THROWS_AS((VotePolicy{3, 2, 2}.validate()), ConfigError);
  CHECK_THROWS_AS((VotePolicy{2, 3, 4}.validate()), ConfigError);
  CHECK_THROWS_AS((VotePolicy{0, 3, 2}.validate()), ConfigError);
  ScriptedJudge j("AAA");
  CHECK_THROWS_AS(vote(item("a", 0), item("a", 0), j, VotePolicy{}), DataError);
}
