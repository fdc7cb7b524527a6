#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "livrank/composer.hpp"
#include "livrank/corpus.hpp"
#include "livrank/judge.hpp"
#include "livrank/prompts.hpp"
#include "livrank/ranker.hpp"
#include "livrank/rating.hpp"
#include "livrank/remote.hpp"

namespace livrank::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kRemote = 3 };

/// Every option of every subcommand, with the documented defaults. Options a
/// subcommand does not use keep their defaults and are left out of run.json.
struct RunConfig {
  std::string command;
  std::string config_file;
  bool quiet = false;

  // inputs and outputs
  std::string manifest;
  std::string out = ".";
  std::string log;
  std::string ranking;
  std::string truth;
  std::string survey;
  std::string scores;
  std::string left;
  std::string right;
  bool json = false;

  // judging
  std::string judge = "sim";
  std::string noise = "bradley-terry";
  double sensitivity = 1.0;
  std::uint64_t rng_seed = 0;
  VotePolicy votes;
  std::string replay_log;
  std::string descriptions;
  std::string criteria;

  // remote endpoint; the key itself is read from the named environment variable
  std::string endpoint;
  std::string model;
  std::string api_key_env = "LIVRANK_API_KEY";
  double temperature = 0.2;
  int max_tokens = 1024;
  double timeout_s = 120.0;
  int max_retries = 3;
  double rate_limit = 2.0;

  // ranking
  std::size_t seed_size = 10;
  std::string seed_order;
  bool top_up = true;
  int top_up_threshold = 20;
  int top_up_window = 10;
  std::string insertion_rule = "bisection";
  bool shuffle = false;

  // rating
  RatingParams rating;
  std::string strategy = "minmax";
  double k = 3.0;
  double lo = 0.0;
  double hi = 100.0;

  // composition
  ComposeConfig compose;

  // regression
  std::vector<int> models{1, 2, 3, 4, 5};
};

/// The resolved options relevant to `cfg.command`, including defaults.
nlohmann::json to_json(const RunConfig& cfg);

NoiseModel noise_model(const RunConfig& cfg);
RankerConfig ranker_config(const RunConfig& cfg);
RemoteJudgeConfig remote_config(const RunConfig& cfg);
ScoreStrategy score_strategy(const RunConfig& cfg);

/// Owns a judge and whatever it borrows (client, descriptions, composite source).
struct JudgeBundle {
  std::unique_ptr<RemoteClient> client;
  std::unique_ptr<DescriptionCache> descriptions;
  std::unique_ptr<Judge> judge;
};

/// Builds the judge selected by `cfg.judge`. Throws ConfigError for a replay
/// judge without an existing log or a remote judge without an endpoint.
JudgeBundle make_judge(const RunConfig& cfg, const Cohort& cohort);

/// Parses arguments and runs one subcommand. Results go to `out`, progress
/// lines and diagnostics to `err`. Returns an ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace livrank::cli
