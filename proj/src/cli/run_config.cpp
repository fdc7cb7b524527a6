#include <chrono>
#include <cstdlib>
#include <filesystem>

#include "livrank/cli.hpp"
#include "livrank/comparison_log.hpp"
#include "livrank/error.hpp"
#include "livrank/replay.hpp"
#include "livrank/tables.hpp"

#ifndef LIVRANK_VERSION
#define LIVRANK_VERSION "unknown"
#endif

namespace livrank::cli {

using nlohmann::json;

namespace {

json judge_json(const RunConfig& c) {
  json j = {{"judge", c.judge},
            {"rng_seed", c.rng_seed},
            {"min_votes", c.votes.min_votes},
            {"max_votes", c.votes.max_votes},
            {"agreement", c.votes.required_agreement}};
  if (c.judge == "sim") {
    j["noise"] = c.noise;
    j["sensitivity"] = c.sensitivity;
  } else if (c.judge == "replay") {
    j["replay_log"] = c.replay_log;
  }
  return j;
}

json remote_json(const RunConfig& c) {
  return {{"endpoint", c.endpoint},        {"model", c.model},           {"api_key_env", c.api_key_env},
          {"temperature", c.temperature},  {"max_tokens", c.max_tokens}, {"timeout_s", c.timeout_s},
          {"max_retries", c.max_retries},  {"rate_limit", c.rate_limit}, {"descriptions", c.descriptions},
          {"criteria", c.criteria.empty() ? json("builtin") : json(c.criteria)}};
}

json compose_json(const ComposeConfig& c) {
  return {{"gap", c.gap_px}, {"border", c.border_px}, {"max_width", c.max_width_px}, {"max_height", c.max_height_px}};
}

json ranker_json(const RunConfig& c) {
  return {{"seed_size", c.seed_size},
          {"seed_order", c.seed_order},
          {"top_up", c.top_up},
          {"top_up_threshold", c.top_up_threshold},
          {"top_up_window", c.top_up_window},
          {"insertion_rule", c.insertion_rule},
          {"shuffle", c.shuffle}};
}

json rating_json(const RunConfig& c) {
  return {{"mu0", c.rating.mu0},   {"sigma0", c.rating.sigma0},   {"beta", c.rating.beta},
          {"tau", c.rating.tau_dyn}, {"strategy", c.strategy},   {"k", c.k},
          {"lo", c.lo},            {"hi", c.hi}};
}

}  // namespace

json to_json(const RunConfig& c) {
  json j = {{"command", c.command}, {"version", LIVRANK_VERSION}};
  if (!c.config_file.empty()) j["config_file"] = c.config_file;
  if (c.command == "describe") {
    j["inputs"] = {{"manifest", c.manifest}};
    j["out"] = c.out;
    j["remote"] = remote_json(c);
  } else if (c.command == "compose") {
    j["inputs"] = {{"left", c.left}, {"right", c.right}};
    j["out"] = c.out;
    j["compose"] = compose_json(c.compose);
  } else if (c.command == "rank") {
    j["inputs"] = {{"manifest", c.manifest}};
    j["out"] = c.out;
    j["judge"] = judge_json(c);
    j["ranker"] = ranker_json(c);
    if (c.judge == "remote") {
      j["remote"] = remote_json(c);
      j["compose"] = compose_json(c.compose);
    }
  } else if (c.command == "rate") {
    j["inputs"] = {{"manifest", c.manifest}, {"log", c.log}};
    j["out"] = c.out;
    j["rating"] = rating_json(c);
  } else if (c.command == "eval") {
    j["inputs"] = {{"ranking", c.ranking}, {"truth", c.truth}};
    j["out"] = c.out;
    j["json"] = c.json;
  } else if (c.command == "regress") {
    j["inputs"] = {{"survey", c.survey}, {"scores", c.scores}};
    j["out"] = c.out;
    j["models"] = c.models;
    j["json"] = c.json;
  } else if (c.command == "report") {
    j["inputs"] = {{"scores", c.scores}};
    j["out"] = c.out;
  }
  return j;
}

NoiseModel noise_model(const RunConfig& c) {
  NoiseModel m{parse_noise_kind(c.noise), c.sensitivity, c.rng_seed};
  m.validate();
  return m;
}

RankerConfig ranker_config(const RunConfig& c) {
  RankerConfig r;
  r.seed_size = c.seed_size;
  if (!c.seed_order.empty()) r.seed_order = read_ranking(c.seed_order).ordered_ids;
  r.top_up = c.top_up;
  r.top_up_threshold = c.top_up_threshold;
  r.top_up_window = c.top_up_window;
  r.rule = parse_insertion_rule(c.insertion_rule);
  r.shuffle = c.shuffle;
  r.rng_seed = c.rng_seed;
  r.votes = c.votes;
  r.validate();
  return r;
}

RemoteJudgeConfig remote_config(const RunConfig& c) {
  RemoteJudgeConfig r;
  r.endpoint_url = c.endpoint;
  r.model_name = c.model;
  if (const char* key = std::getenv(c.api_key_env.c_str())) r.api_key = key;
  r.temperature = c.temperature;
  r.max_tokens = c.max_tokens;
  if (!(c.timeout_s > 0.0)) throw ConfigError("timeout must be positive");
  r.timeout = std::chrono::milliseconds(static_cast<long long>(c.timeout_s * 1000.0));
  r.max_retries = c.max_retries;
  r.rate_limit = c.rate_limit;
  r.validate();
  return r;
}

ScoreStrategy score_strategy(const RunConfig& c) {
  switch (parse_score_kind(c.strategy)) {
    case ScoreStrategy::Kind::RawMu: return ScoreStrategy::raw_mu();
    case ScoreStrategy::Kind::Conservative: return ScoreStrategy::conservative(c.k);
    case ScoreStrategy::Kind::MinMax:
      if (!(c.hi > c.lo)) throw ConfigError("minmax range needs --hi greater than --lo");
      return ScoreStrategy::min_max(c.lo, c.hi);
  }
  throw ConfigError("unknown score strategy");
}

JudgeBundle make_judge(const RunConfig& c, const Cohort& cohort) {
  JudgeBundle b;
  switch (parse_judge_kind(c.judge)) {
    case JudgeKind::Simulated:
      if (!cohort.has_latent_scores())
        throw DataError("the simulated judge needs a latent_score column in the manifest");
      b.judge = std::make_unique<SimulatedJudge>(noise_model(c));
      break;
    case JudgeKind::Replay:
      if (c.replay_log.empty()) throw ConfigError("--judge replay needs --replay-log");
      if (!std::filesystem::is_regular_file(c.replay_log))
        throw ConfigError("replay log " + c.replay_log + " does not exist");
      b.judge = std::make_unique<ReplayJudge>(read_log(c.replay_log));
      break;
    case JudgeKind::Remote: {
      const RemoteJudgeConfig rc = remote_config(c);
      if (c.descriptions.empty()) throw ConfigError("--judge remote needs --descriptions (produced by describe)");
      b.descriptions = std::make_unique<DescriptionCache>(DescriptionCache::load(c.descriptions));
      for (const Item& it : cohort.items())
        if (!b.descriptions->contains(it.id))
          throw DataError("no description for \"" + it.id + "\" in " + c.descriptions + "; run describe first");
      const CriteriaConfig crit = c.criteria.empty() ? CriteriaConfig::defaults() : load_criteria(c.criteria);
      b.client = std::make_unique<RemoteClient>(rc, std::make_shared<HttpTransport>(rc));
      b.judge = std::make_unique<RemoteJudge>(*b.client, crit, *b.descriptions, make_composite_source(cohort, c.compose));
      break;
    }
  }
  return b;
}

}  // namespace livrank::cli
