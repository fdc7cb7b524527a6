#include "livrank/cli.hpp"

#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <unordered_map>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "livrank/comparison_log.hpp"
#include "livrank/econometrics.hpp"
#include "livrank/error.hpp"
#include "livrank/image_io.hpp"
#include "livrank/io.hpp"
#include "livrank/metrics.hpp"
#include "livrank/tables.hpp"

#ifndef LIVRANK_VERSION
#define LIVRANK_VERSION "unknown"
#endif

namespace livrank::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Context {
  RunConfig& cfg;
  std::ostream& out;
  std::ostream& err;

  void progress(std::string_view line) const {
    if (!cfg.quiet) err << "[" << cfg.command << "] " << line << '\n';
  }
  void warn(std::string_view line) const { err << "warning: " << line << '\n'; }
};

std::string short_real(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

void write_run_json(const RunConfig& cfg, const fs::path& dir) {
  if (!dir.empty()) fs::create_directories(dir);
  write_file_atomic(dir / "run.json", to_json(cfg).dump(2) + "\n");
}

// --- subcommands -------------------------------------------------------------------

void cmd_describe(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const Cohort cohort = load_manifest(c.manifest);
  const RemoteJudgeConfig rc = remote_config(c);
  const fs::path out_dir = c.out;
  const fs::path cache_path = c.descriptions.empty() ? out_dir / "descriptions.jsonl" : fs::path(c.descriptions);
  write_run_json(c, out_dir);
  if (cache_path.has_parent_path()) fs::create_directories(cache_path.parent_path());

  DescriptionCache cache = DescriptionCache::load(cache_path);
  const std::size_t before = cache.size();
  const CriteriaConfig crit = c.criteria.empty() ? CriteriaConfig::defaults() : load_criteria(c.criteria);
  RemoteClient client(rc, std::make_shared<HttpTransport>(rc));
  describe_cohort(cohort, client, crit, cache, cache_path, [&](const std::string& line) { ctx.progress(line); });
  ctx.out << "described " << cache.size() - before << " new item(s); " << cache.size() << " cached in "
          << cache_path.string() << '\n';
}

void cmd_compose(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  c.compose.validate();
  const Raster a = read_image(c.left);
  const Raster b = read_image(c.right);
  const Raster pair = compose(a, b, c.compose);
  const fs::path out = c.out;
  write_run_json(c, out.parent_path());
  write_image(out, pair);
  ctx.out << "composed " << pair.width << "x" << pair.height << " -> " << out.string() << '\n';
}

void cmd_rank(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const Cohort cohort = load_manifest(c.manifest);
  const RankerConfig rc = ranker_config(c);
  const fs::path out_dir = c.out;
  const fs::path log_path = out_dir / "comparisons.jsonl";
  if (c.judge == "replay" && !c.replay_log.empty() && fs::exists(log_path) &&
      fs::equivalent(fs::path(c.replay_log), log_path))
    throw ConfigError("the replay log " + c.replay_log + " would be overwritten by this run; choose another --out");

  JudgeBundle bundle = make_judge(c, cohort);
  write_run_json(c, out_dir);

  const fs::path partial = log_path.string() + ".partial";
  RankResult res;
  {
    LogWriter writer(partial, true);
    res = rank_cohort(
        cohort, *bundle.judge, rc, [&](const ComparisonRecord& r) { writer.append(r); },
        [&](std::string_view stage, const std::string& id, std::size_t done, std::size_t total) {
          ctx.progress(std::string(stage) + " " + id + " (" + std::to_string(done) + "/" + std::to_string(total) + ")");
        });
  }
  fs::rename(partial, log_path);
  write_file_atomic(out_dir / "ranking.csv", format_ranking(res.ranking));
  write_file_atomic(out_dir / "ledger.csv", format_ledger(res.ledger, cohort));
  write_file_atomic(out_dir / "insertions.csv", format_insertions(res.insertions));

  std::int64_t below = 0;
  for (const auto& [id, n] : res.ledger.appearances)
    if (n < c.top_up_threshold) ++below;
  ctx.out << "ranked " << res.ranking.size() << " items: " << res.ledger.adjudications << " adjudications, "
          << res.ledger.judge_calls << " judge calls, " << res.top_up_adjudications << " top-up adjudications\n";
  ctx.out << "insertions over the comparison bound: " << res.bound_violations << " of " << res.insertions.size() << '\n';
  if (c.top_up && below > 0)
    ctx.warn(std::to_string(below) + " item(s) stayed below " + std::to_string(c.top_up_threshold) +
             " comparisons (no unplayed partner left)");
}

void cmd_rate(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const Cohort cohort = load_manifest(c.manifest);
  const std::vector<ComparisonRecord> log = read_log(c.log);
  ScoreStrategy strategy = score_strategy(c);
  c.rating.validate();

  const auto live = std::count_if(log.begin(), log.end(), [](const ComparisonRecord& r) { return !r.cached; });
  if (live == 0) {
    ctx.warn("comparison log " + c.log + " has no adjudications; every item keeps the prior rating");
    if (strategy.kind == ScoreStrategy::Kind::MinMax) {
      ctx.warn("minmax scaling is undefined for identical ratings; writing raw mu instead");
      strategy = ScoreStrategy::raw_mu();
    }
  }
  write_run_json(c, c.out);
  const RatingTable table = rate_log(log, cohort, c.rating);
  const std::vector<ScoredItem> scores = to_scores(table, strategy);
  write_file_atomic(fs::path(c.out) / "scores.csv", format_scores(scores, cohort));
  ctx.out << "rated " << table.size() << " items from " << live << " adjudications (" << to_string(strategy.kind)
          << " scores)\n";
}

void cmd_eval(const Context& ctx, bool write_outputs) {
  const RunConfig& c = ctx.cfg;
  const Ranking sigma = read_ranking(c.ranking);
  const Ranking truth = read_ranking(c.truth);
  const std::int64_t d = footrule(sigma, truth);
  const double sim = footrule_similarity(sigma, truth);
  const json result = {{"items", sigma.size()},
                       {"footrule", d},
                       {"max_footrule", max_footrule(sigma.size())},
                       {"similarity", sim}};
  if (write_outputs) {
    write_run_json(c, c.out);
    write_file_atomic(fs::path(c.out) / "eval.json", result.dump(2) + "\n");
  }
  if (c.json) {
    ctx.out << result.dump(2) << '\n';
    return;
  }
  ctx.out << "items       " << sigma.size() << '\n'
          << "footrule    " << d << '\n'
          << "max         " << max_footrule(sigma.size()) << '\n'
          << "similarity  " << short_real(sim, 4) << '\n';
}

void cmd_regress(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  std::vector<SurveyRow> rows = load_survey(c.survey);
  if (!c.scores.empty()) {
    std::unordered_map<std::string, double> by_county;
    for (const auto& g : read_aggregate(c.scores))
      if (g.group != kGlobalGroup) by_county[g.group] = g.mean;
    std::size_t matched = 0;
    for (auto& row : rows) {
      auto it = by_county.find(row.county_id);
      if (it == by_county.end()) {
        row.livability.reset();
      } else {
        row.livability = it->second;
        ++matched;
      }
    }
    if (matched == 0) throw DataError("no survey county matches a group in " + c.scores);
    ctx.progress("livability joined for " + std::to_string(matched) + " of " + std::to_string(rows.size()) +
                 " survey counties");
  }
  if (c.models.empty()) throw ConfigError("--models lists no model");

  std::vector<std::pair<std::string, FitReport>> fits;
  json models = json::array();
  std::ostringstream notes;
  for (int m : c.models) {
    const ModelSpec spec = ModelSpec::nested(m);
    const Design design = build_design(rows, spec);
    const std::string label = "(" + std::to_string(m) + ")";
    if (design.dropped > 0)
      ctx.progress("model " + label + ": dropped " + std::to_string(design.dropped) + " row(s) lacking a field");
    FitReport fit = fit_ols(design);

    // The raw square is collinear with its base term by construction, so
    // the diagnostic covers the linear regressors only.
    std::vector<std::string> names;
    std::vector<Eigen::Index> keep;
    for (std::size_t j = 0; j < design.columns.size(); ++j)
      if (design.columns[j] != "Tem2") {
        keep.push_back(static_cast<Eigen::Index>(j));
        names.push_back(design.columns[j]);
      }
    json jm = {{"model", m}, {"label", label}, {"dropped", design.dropped}, {"fit", to_json(fit)}};
    if (names.size() - (design.intercept ? 1 : 0) >= 2) {
      const Eigen::MatrixXd xs = design.x(Eigen::all, keep);
      const auto v = vif(xs, names, design.intercept);
      jm["vif"] = to_json(std::span<const VifEntry>(v));
      notes << "VIF " << label << ":";
      for (const auto& e : v) notes << "  " << e.name << " " << (e.infinite() ? "inf" : short_real(e.value, 4));
      const bool ok = std::all_of(v.begin(), v.end(), [](const VifEntry& e) { return e.value < kVifThreshold; });
      notes << (ok ? "  (all below 10)" : "  (some at or above 10)") << '\n';
    }
    if (spec.has(Regressor::Tem2)) {
      const Vertex vx = quad_vertex(fit.term("Tem2").coefficient, fit.term("Tem").coefficient);
      jm["temperature_vertex"] = {{"location", vx.location}, {"inverted_u", vx.inverted_u}};
      notes << "Temperature turning point " << label << ": " << short_real(vx.location, 4) << " C ("
            << (vx.inverted_u ? "inverted U" : "upright U") << ")\n";
    }
    models.push_back(std::move(jm));
    fits.emplace_back(label, std::move(fit));
  }

  const std::string text = format_regression_table(fits) + "\n" + notes.str();
  const json doc = {{"models", models}};
  write_run_json(c, c.out);
  write_file_atomic(fs::path(c.out) / "regression.txt", text);
  write_file_atomic(fs::path(c.out) / "regression.json", doc.dump(2) + "\n");
  ctx.out << (c.json ? doc.dump(2) + "\n" : text);
}

void cmd_report(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const std::vector<ScoreRow> rows = read_scores(c.scores);
  std::vector<Item> items;
  std::vector<ScoredItem> scores;
  for (const auto& r : rows) {
    items.push_back({r.score.item_id, "", r.province, r.county, "", std::nullopt});
    scores.push_back(r.score);
  }
  const Cohort cohort(std::move(items), c.scores);
  const auto by_county = aggregate(scores, cohort, GroupBy::County);
  const auto by_province = aggregate(scores, cohort, GroupBy::Province);
  write_run_json(c, c.out);
  write_file_atomic(fs::path(c.out) / "aggregate_county.csv", format_aggregate(by_county));
  write_file_atomic(fs::path(c.out) / "aggregate_province.csv", format_aggregate(by_province));
  const GroupStat& all = by_county.back();
  ctx.out << by_county.size() - 1 << " counties, " << by_province.size() - 1 << " provinces; overall mean "
          << short_real(all.mean) << " over " << all.count << " items\n";
}

// --- option wiring -----------------------------------------------------------------

void add_judge_options(CLI::App* s, RunConfig& c) {
  s->add_option("--judge", c.judge, "Judge: sim, remote or replay")
      ->check(CLI::IsMember({"sim", "remote", "replay"}))
      ->capture_default_str();
  s->add_option("--noise", c.noise, "Simulated noise: deterministic, bradley-terry, thurstone")
      ->check(CLI::IsMember({"deterministic", "bradley-terry", "thurstone"}))
      ->capture_default_str();
  s->add_option("--sensitivity", c.sensitivity, "Simulated judge sensitivity to latent differences")->capture_default_str();
  s->add_option("--rng-seed", c.rng_seed, "Seed for every random choice of the run")->capture_default_str();
  s->add_option("--min-votes", c.votes.min_votes, "Votes issued before checking agreement")->capture_default_str();
  s->add_option("--max-votes", c.votes.max_votes, "Upper bound on votes per pair")->capture_default_str();
  s->add_option("--agreement", c.votes.required_agreement, "Identical votes needed for a verdict")->capture_default_str();
  s->add_option("--replay-log", c.replay_log, "Comparison log answering a replay judge");
}

void add_remote_options(CLI::App* s, RunConfig& c) {
  s->add_option("--endpoint", c.endpoint, "Chat-completions URL of the remote model");
  s->add_option("--model", c.model, "Model name sent with each request");
  s->add_option("--api-key-env", c.api_key_env, "Environment variable holding the API key")->capture_default_str();
  s->add_option("--temperature", c.temperature, "Sampling temperature")->capture_default_str();
  s->add_option("--max-tokens", c.max_tokens, "Maximum reply tokens")->capture_default_str();
  s->add_option("--timeout", c.timeout_s, "Per-request timeout in seconds")->capture_default_str();
  s->add_option("--max-retries", c.max_retries, "Retries after a failed or unparseable reply")->capture_default_str();
  s->add_option("--rate-limit", c.rate_limit, "Requests per second (0 disables)")->capture_default_str();
  s->add_option("--descriptions", c.descriptions, "Description cache (JSONL)");
  s->add_option("--criteria", c.criteria, "Criteria JSON replacing the built-in six");
}

void add_compose_options(CLI::App* s, ComposeConfig& c) {
  s->add_option("--gap", c.gap_px, "Pixels between the two images")->capture_default_str();
  s->add_option("--border", c.border_px, "Outer border in pixels")->capture_default_str();
  s->add_option("--max-width", c.max_width_px, "Canvas width cap")->capture_default_str();
  s->add_option("--max-height", c.max_height_px, "Canvas height cap")->capture_default_str();
}

int exit_for(const std::exception& e, std::ostream& err, int code) {
  err << "error: " << e.what() << '\n';
  return code;
}

void ensure_logger() {
  if (!spdlog::get("livrank")) {
    auto logger = spdlog::stderr_color_mt("livrank");
    logger->set_pattern("%^%l%$: %v");
    spdlog::set_default_logger(logger);
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  ensure_logger();
  RunConfig cfg;
  CLI::App app{"Pairwise livability ranking, rating and analysis", "livrank"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_version_flag("--version", LIVRANK_VERSION);
  app.set_config("--config", "", "TOML file with option values (command-line flags take precedence)");
  app.add_flag("-q,--quiet", cfg.quiet, "Suppress per-item progress lines");

  auto* describe = app.add_subcommand("describe", "Cache a text description of every item via the remote model");
  describe->add_option("--manifest", cfg.manifest, "Item manifest CSV")->required();
  describe->add_option("--out", cfg.out, "Output directory")->capture_default_str();
  add_remote_options(describe, cfg);

  auto* compose_cmd = app.add_subcommand("compose", "Place two images side by side on one canvas");
  compose_cmd->add_option("--left", cfg.left, "Left image (Village A)")->required();
  compose_cmd->add_option("--right", cfg.right, "Right image (Village B)")->required();
  compose_cmd->add_option("--out", cfg.out, "Output image (.png, .jpg)")->required();
  add_compose_options(compose_cmd, cfg.compose);

  auto* rank = app.add_subcommand("rank", "Rank a cohort by binary-search insertion over judged pairs");
  rank->add_option("--manifest", cfg.manifest, "Item manifest CSV")->required();
  rank->add_option("--out", cfg.out, "Output directory")->capture_default_str();
  add_judge_options(rank, cfg);
  add_remote_options(rank, cfg);
  add_compose_options(rank, cfg.compose);
  rank->add_option("--seed-size", cfg.seed_size, "Items in the initial ranking")->capture_default_str();
  rank->add_option("--seed-order", cfg.seed_order, "Ranking CSV used verbatim as the initial ranking");
  rank->add_flag("--top-up,!--no-top-up", cfg.top_up, "Top up under-compared items after insertion")
      ->capture_default_str();
  rank->add_option("--top-up-threshold", cfg.top_up_threshold, "Minimum comparisons per item")->capture_default_str();
  rank->add_option("--top-up-window", cfg.top_up_window, "Preferred rank distance of top-up partners")
      ->capture_default_str();
  rank->add_option("--insertion-rule", cfg.insertion_rule, "bisection or neighbor-confirm")
      ->check(CLI::IsMember({"bisection", "neighbor-confirm"}))
      ->capture_default_str();
  rank->add_flag("--shuffle", cfg.shuffle, "Insert items in a seeded random order");

  auto* rate = app.add_subcommand("rate", "Convert a comparison log into TrueSkill ratings and scores");
  rate->add_option("--manifest", cfg.manifest, "Item manifest CSV")->required();
  rate->add_option("--log", cfg.log, "Comparison log (JSONL)")->required();
  rate->add_option("--out", cfg.out, "Output directory")->capture_default_str();
  rate->add_option("--mu0", cfg.rating.mu0, "Prior mean")->capture_default_str();
  rate->add_option("--sigma0", cfg.rating.sigma0, "Prior standard deviation")->capture_default_str();
  rate->add_option("--beta", cfg.rating.beta, "Performance noise")->capture_default_str();
  rate->add_option("--tau", cfg.rating.tau_dyn, "Dynamics noise added before each update")->capture_default_str();
  rate->add_option("--strategy", cfg.strategy, "Score mapping: raw-mu, conservative, minmax")
      ->check(CLI::IsMember({"raw-mu", "conservative", "minmax"}))
      ->capture_default_str();
  rate->add_option("--k", cfg.k, "Conservative score: mu - k sigma")->capture_default_str();
  rate->add_option("--lo", cfg.lo, "Minmax lower end")->capture_default_str();
  rate->add_option("--hi", cfg.hi, "Minmax upper end")->capture_default_str();

  auto* eval = app.add_subcommand("eval", "Footrule distance and similarity between two rankings");
  eval->add_option("--ranking", cfg.ranking, "Ranking CSV to evaluate")->required();
  eval->add_option("--truth", cfg.truth, "Reference ranking CSV")->required();
  eval->add_option("--out", cfg.out, "Also write eval.json and run.json here");
  eval->add_flag("--json", cfg.json, "Print JSON instead of text");

  auto* regress = app.add_subcommand("regress", "Fit the nested livability regressions");
  regress->add_option("--survey", cfg.survey, "County survey CSV")->required();
  regress->add_option("--scores", cfg.scores, "County aggregate CSV supplying livability");
  regress->add_option("--models", cfg.models, "Models to fit, from 1..5")
      ->delimiter(',')
      ->check(CLI::Range(1, 5))
      ->capture_default_str();
  regress->add_option("--out", cfg.out, "Output directory")->capture_default_str();
  regress->add_flag("--json", cfg.json, "Print JSON instead of the table");

  auto* report = app.add_subcommand("report", "Aggregate item scores by county and province");
  report->add_option("--scores", cfg.scores, "Scores CSV from rate")->required();
  report->add_option("--out", cfg.out, "Output directory")->capture_default_str();

  std::vector<const char*> argv{"livrank"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kUsage;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  if (auto* opt = app.get_option_no_throw("--config"); opt && opt->count() > 0) cfg.config_file = opt->as<std::string>();
  const Context ctx{cfg, out, err};
  try {
    if (cfg.command == "describe") cmd_describe(ctx);
    else if (cfg.command == "compose") cmd_compose(ctx);
    else if (cfg.command == "rank") cmd_rank(ctx);
    else if (cfg.command == "rate") cmd_rate(ctx);
    else if (cfg.command == "eval") cmd_eval(ctx, eval->count("--out") > 0);
    else if (cfg.command == "regress") cmd_regress(ctx);
    else if (cfg.command == "report") cmd_report(ctx);
  } catch (const ConfigError& e) {
    return exit_for(e, err, kUsage);
  } catch (const RemoteJudgeError& e) {
    return exit_for(e, err, kRemote);
  } catch (const UnparseableVerdict& e) {
    return exit_for(e, err, kRemote);
  } catch (const UndecidedError& e) {
    return exit_for(e, err, kRemote);
  } catch (const std::exception& e) {
    return exit_for(e, err, kData);
  }
  return kOk;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace livrank::cli
