#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "livrank/comparison_log.hpp"
#include "livrank/error.hpp"
#include "livrank/replay.hpp"

using namespace livrank;

namespace {

ComparisonRecord sample(std::uint64_t seq, std::string l, std::string r, std::vector<Side> votes, std::string winner,
                        Phase phase = Phase::Insert) {
  ComparisonRecord rec;
  rec.seq = seq;
  rec.left_id = std::move(l);
  rec.right_id = std::move(r);
  for (Side s : votes) rec.votes.push_back(Outcome{s, std::nullopt, JudgeKind::Simulated, 1});
  rec.final_winner = std::move(winner);
  rec.phase = phase;
  rec.calls = static_cast<int>(rec.votes.size());
  return rec;
}

}  // namespace

TEST_CASE("records survive a JSON round trip") {
  ComparisonRecord r = sample(7, "a", "b", {Side::Left, Side::Right, Side::Left}, "a", Phase::TopUp);
  r.votes[1].raw_text = "long reasoning\nFinal: B";
  r.votes[1].judge_kind = JudgeKind::Remote;
  r.votes[1].attempts = 3;
  r.calls = 5;
  CHECK(record_from_json(to_json(r)) == r);

  ComparisonRecord cached = sample(8, "b", "c", {}, "c", Phase::NeighborCheck);
  cached.cached = true;
  CHECK(record_from_json(to_json(cached)) == cached);
  CHECK(cached.loser_id() == "b");
}

TEST_CASE("phase names") {
  for (Phase p : {Phase::Seed, Phase::Insert, Phase::NeighborCheck, Phase::TopUp}) CHECK(parse_phase(to_string(p)) == p);
  CHECK_THROWS_AS(parse_phase("bogus"), DataError);
}

TEST_CASE("writer appends one line per record and the reader restores them") {
  const auto dir = fixtures::scratch("log_rw");
  const auto path = dir / "sub" / "log.jsonl";
  std::vector<ComparisonRecord> recs = {sample(0, "a", "b", {Side::Left, Side::Left}, "a"),
                                        sample(1, "c", "a", {Side::Right, Side::Left, Side::Right}, "a")};
  {
    LogWriter w(path);
    for (const auto& r : recs) w.append(r);
  }
  CHECK(read_log(path) == recs);
  {
    LogWriter w(path, false);
    w.append(sample(2, "b", "c", {Side::Right, Side::Right}, "c"));
  }
  CHECK(read_log(path).size() == 3);
  {
    LogWriter w(path);
  }
  CHECK(read_log(path).empty());
  CHECK_THROWS_AS(read_log(dir / "missing.jsonl"), DataError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("parse errors name the offending line") {
  const std::string good = to_json(sample(0, "a", "b", {Side::Left, Side::Left}, "a")).dump();
  auto message_for = [&](const std::string& bad) {
    std::istringstream in(good + "\n\n" + bad + "\n");
    try {
      parse_log(in, "log.jsonl");
    } catch (const DataError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message_for("{oops").find("log.jsonl:3") != std::string::npos);
  CHECK(message_for(R"({"seq":1,"phase":"insert","left":"a","right":"b","votes":[],"winner":"z"})").find("log.jsonl:3") !=
        std::string::npos);
  CHECK(message_for(R"({"seq":1,"phase":"warp","left":"a","right":"b","votes":[],"winner":"a"})").find("phase") !=
        std::string::npos);
  CHECK(message_for(R"({"seq":1,"phase":"insert","left":"a","right":"a","votes":[],"winner":"a"})").find("itself") !=
        std::string::npos);
  CHECK(message_for(R"({"seq":1,"phase":"insert","left":"a","right":"b","votes":[{"winner":"up"}],"winner":"a"})") !=
        "");
}

TEST_CASE("to_jsonl matches the writer format") {
  std::vector<ComparisonRecord> recs = {sample(0, "a", "b", {Side::Left, Side::Left}, "a")};
  std::istringstream in(to_jsonl(recs));
  CHECK(parse_log(in, "mem") == recs);
}

TEST_CASE("replay judge serves recorded votes and flips them for swapped orientation") {
  const Item a{"a", "", "", "", "", std::nullopt};
  const Item b{"b", "", "", "", "", std::nullopt};
  std::vector<ComparisonRecord> log = {sample(0, "a", "b", {Side::Left, Side::Right, Side::Left}, "a"),
                                       sample(5, "a", "b", {Side::Right, Side::Right}, "b")};
  ComparisonRecord cached = sample(3, "a", "b", {}, "b");
  cached.cached = true;
  log.insert(log.begin() + 1, cached);
  ReplayJudge judge(log);

  // first adjudication, same orientation
  CHECK(judge.compare({a, b, 10, 0}).winner == Side::Left);
  CHECK(judge.compare({a, b, 10, 1}).winner == Side::Right);
  const Outcome third = judge.compare({a, b, 10, 2});
  CHECK(third.winner == Side::Left);
  CHECK(third.judge_kind == JudgeKind::Replay);
  CHECK_THROWS_AS(judge.compare({a, b, 10, 3}), DataError);

  // second adjudication presented as (b, a): votes for the recorded right side now read as left
  CHECK(judge.compare({b, a, 11, 0}).winner == Side::Left);
  CHECK(judge.compare({b, a, 11, 1}).winner == Side::Left);

  // the cached record is not a judge call, so the log is exhausted
  CHECK_THROWS_AS(judge.compare({a, b, 12, 0}), DataError);
  CHECK_THROWS_AS(judge.compare({a, b, 99, 1}), DataError);
}
