#include "livrank/tables.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "livrank/csv.hpp"
#include "livrank/error.hpp"

namespace livrank {

namespace {

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

void expect_header(const std::vector<csv::Row>& rows, const std::filesystem::path& path,
                   const std::vector<std::string>& header) {
  if (rows.empty()) throw DataError(path.string() + ": file is empty");
  if (rows.front().cells != header) throw DataError(where(path, rows.front().line) + ": expected header " + csv::join(header));
}

void expect_width(const csv::Row& row, std::size_t n, const std::filesystem::path& path) {
  if (row.cells.size() != n)
    throw DataError(where(path, row.line) + ": expected " + std::to_string(n) + " columns, found " +
                    std::to_string(row.cells.size()));
}

double real_cell(const csv::Row& row, std::size_t i, const std::filesystem::path& path, const char* what) {
  auto v = csv::parse_real(row.cells[i]);
  if (!v) throw DataError(where(path, row.line) + ": " + what + " \"" + row.cells[i] + "\" is not a finite number");
  return *v;
}

long long int_cell(const csv::Row& row, std::size_t i, const std::filesystem::path& path, const char* what) {
  const std::string& s = row.cells[i];
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw DataError(where(path, row.line) + ": " + what + " \"" + s + "\" is not an integer");
  return v;
}

}  // namespace

Ranking read_ranking(const std::filesystem::path& path) {
  const auto rows = csv::read_file(path);
  expect_header(rows, path, {"rank", "item_id"});
  const std::size_t n = rows.size() - 1;
  std::vector<std::string> slots(n);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    expect_width(rows[i], 2, path);
    const long long rank = int_cell(rows[i], 0, path, "rank");
    if (rank < 1 || static_cast<std::size_t>(rank) > n)
      throw DataError(where(path, rows[i].line) + ": rank " + std::to_string(rank) + " outside 1.." + std::to_string(n));
    auto& slot = slots[static_cast<std::size_t>(rank - 1)];
    if (!slot.empty()) throw DataError(where(path, rows[i].line) + ": rank " + std::to_string(rank) + " repeated");
    if (rows[i].cells[1].empty()) throw DataError(where(path, rows[i].line) + ": empty item_id");
    slot = rows[i].cells[1];
  }
  Ranking r{std::move(slots)};
  std::vector<std::string> sorted = r.ordered_ids;
  std::sort(sorted.begin(), sorted.end());
  if (auto dup = std::adjacent_find(sorted.begin(), sorted.end()); dup != sorted.end())
    throw DataError(path.string() + ": item \"" + *dup + "\" ranked twice");
  return r;
}

std::string format_ranking(const Ranking& ranking) {
  std::string out = "rank,item_id\n";
  for (std::size_t i = 0; i < ranking.size(); ++i)
    out += std::to_string(i + 1) + "," + csv::escape(ranking.ordered_ids[i]) + "\n";
  return out;
}

std::string format_ledger(const BudgetLedger& ledger, const Cohort& cohort) {
  std::string out = "item_id,appearances\n";
  for (const Item& it : cohort.items()) out += csv::escape(it.id) + "," + std::to_string(ledger.count(it.id)) + "\n";
  return out;
}

std::string format_insertions(std::span<const InsertionStats> stats) {
  std::string out = "item_id,ranking_size,position,adjudications,memo_hits,bound,within_bound\n";
  for (const auto& s : stats)
    out += csv::join({s.item_id, std::to_string(s.ranking_size), std::to_string(s.position + 1),
                      std::to_string(s.adjudications), std::to_string(s.memo_hits), std::to_string(s.bound),
                      s.within_bound() ? "true" : "false"}) +
           "\n";
  return out;
}

std::string format_scores(std::span<const ScoredItem> scores, const Cohort& cohort) {
  std::string out = "item_id,mu,sigma,score,province,county\n";
  for (const auto& s : scores) {
    const Item& it = cohort.at(s.item_id);
    out += csv::join({s.item_id, csv::format_real(s.mu), csv::format_real(s.sigma), csv::format_real(s.score),
                      it.province, it.county}) +
           "\n";
  }
  return out;
}

std::vector<ScoreRow> read_scores(const std::filesystem::path& path) {
  const auto rows = csv::read_file(path);
  expect_header(rows, path, {"item_id", "mu", "sigma", "score", "province", "county"});
  std::vector<ScoreRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    expect_width(rows[i], 6, path);
    ScoreRow r;
    r.score.item_id = rows[i].cells[0];
    r.score.mu = real_cell(rows[i], 1, path, "mu");
    r.score.sigma = real_cell(rows[i], 2, path, "sigma");
    r.score.score = real_cell(rows[i], 3, path, "score");
    r.province = rows[i].cells[4];
    r.county = rows[i].cells[5];
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_aggregate(std::span<const GroupStat> groups) {
  std::string out = "group,mean,count,min,max\n";
  for (const auto& g : groups)
    out += csv::join({g.group, csv::format_real(g.mean), std::to_string(g.count), csv::format_real(g.min),
                      csv::format_real(g.max)}) +
           "\n";
  return out;
}

std::vector<GroupStat> read_aggregate(const std::filesystem::path& path) {
  const auto rows = csv::read_file(path);
  expect_header(rows, path, {"group", "mean", "count", "min", "max"});
  std::vector<GroupStat> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    expect_width(rows[i], 5, path);
    GroupStat g;
    g.group = rows[i].cells[0];
    g.mean = real_cell(rows[i], 1, path, "mean");
    const long long count = int_cell(rows[i], 2, path, "count");
    if (count < 0) throw DataError(where(path, rows[i].line) + ": negative count");
    g.count = static_cast<std::size_t>(count);
    g.min = real_cell(rows[i], 3, path, "min");
    g.max = real_cell(rows[i], 4, path, "max");
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace livrank
