#include "livrank/comparison_log.hpp"

#include <sstream>

#include "livrank/error.hpp"

namespace livrank {

using nlohmann::json;

std::string_view to_string(Phase p) noexcept {
  switch (p) {
    case Phase::Seed: return "seed";
    case Phase::Insert: return "insert";
    case Phase::NeighborCheck: return "neighbor_check";
    case Phase::TopUp: return "top_up";
  }
  return "?";
}

Phase parse_phase(std::string_view text) {
  if (text == "seed") return Phase::Seed;
  if (text == "insert") return Phase::Insert;
  if (text == "neighbor_check") return Phase::NeighborCheck;
  if (text == "top_up") return Phase::TopUp;
  throw DataError("unknown phase \"" + std::string(text) + "\"");
}

json to_json(const ComparisonRecord& r) {
  json votes = json::array();
  for (const Outcome& o : r.votes) {
    json v{{"winner", to_string(o.winner)}, {"judge", to_string(o.judge_kind)}};
    if (o.attempts != 1) v["attempts"] = o.attempts;
    if (o.raw_text) v["raw"] = *o.raw_text;
    votes.push_back(std::move(v));
  }
  return {{"seq", r.seq},       {"phase", to_string(r.phase)}, {"left", r.left_id},   {"right", r.right_id},
          {"votes", votes},     {"winner", r.final_winner},    {"cached", r.cached}, {"calls", r.calls}};
}

ComparisonRecord record_from_json(const json& j) {
  ComparisonRecord r;
  r.seq = j.at("seq").get<std::uint64_t>();
  r.phase = parse_phase(j.at("phase").get<std::string>());
  r.left_id = j.at("left").get<std::string>();
  r.right_id = j.at("right").get<std::string>();
  r.final_winner = j.at("winner").get<std::string>();
  r.cached = j.value("cached", false);
  for (const auto& v : j.at("votes")) {
    Outcome o;
    o.winner = parse_side(v.at("winner").get<std::string>());
    o.judge_kind = parse_judge_kind(v.value("judge", "simulated"));
    o.attempts = v.value("attempts", 1);
    if (v.contains("raw")) o.raw_text = v.at("raw").get<std::string>();
    r.votes.push_back(std::move(o));
  }
  r.calls = j.value("calls", static_cast<int>(r.votes.size()));
  if (r.final_winner != r.left_id && r.final_winner != r.right_id)
    throw DataError("winner \"" + r.final_winner + "\" is neither " + r.left_id + " nor " + r.right_id);
  if (r.left_id == r.right_id) throw DataError("record compares \"" + r.left_id + "\" with itself");
  return r;
}

LogWriter::LogWriter(const std::filesystem::path& path, bool truncate) : path_(path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, truncate ? std::ios::trunc : std::ios::app);
  if (!out_) throw DataError("cannot open comparison log " + path.string());
}

void LogWriter::append(const ComparisonRecord& r) {
  const std::string line = to_json(r).dump() + "\n";
  std::lock_guard lock(mutex_);
  out_ << line;
  out_.flush();
  if (!out_) throw DataError("failed writing comparison log " + path_.string());
}

std::vector<ComparisonRecord> parse_log(std::istream& in, std::string_view source) {
  std::vector<ComparisonRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw DataError(std::string(source) + ":" + std::to_string(line_no) + ": invalid record: " + e.what());
    } catch (const Error& e) {
      throw DataError(std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<ComparisonRecord> read_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("comparison log " + path.string() + " not found");
  return parse_log(in, path.string());
}

std::string to_jsonl(std::span<const ComparisonRecord> records) {
  std::string out;
  for (const auto& r : records) out += to_json(r).dump() + "\n";
  return out;
}

}  // namespace livrank
