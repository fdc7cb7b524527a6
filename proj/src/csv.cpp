#include "livrank/csv.hpp"

#include <cctype>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>

#include "livrank/error.hpp"

namespace livrank::csv {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<Row> read(std::istream& in, std::string_view source) {
  std::vector<Row> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;

    Row row;
    row.line = line_no;
    std::string cell;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c != '"') {
          cell += c;
        } else if (i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else if (c == '"' && trim(cell).empty() && !was_quoted) {
        cell.clear();
        quoted = was_quoted = true;
      } else if (c == ',') {
        row.cells.emplace_back(was_quoted ? cell : std::string(trim(cell)));
        cell.clear();
        was_quoted = false;
      } else if (was_quoted && c != ' ' && c != '\t') {
        throw DataError(std::string(source) + ":" + std::to_string(line_no) +
                        ": malformed CSV (text after closing quote)");
      } else if (!was_quoted) {
        cell += c;
      }
    }
    if (quoted)
      throw DataError(std::string(source) + ":" + std::to_string(line_no) + ": malformed CSV (unterminated quote)");
    row.cells.emplace_back(was_quoted ? cell : std::string(trim(cell)));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<Row> read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string() + ": no such file or unreadable");
  return read(in, path.string());
}

std::optional<double> parse_real(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::string escape(std::string_view cell) {
  const bool padded = !cell.empty() && (std::isspace(static_cast<unsigned char>(cell.front())) ||
                                        std::isspace(static_cast<unsigned char>(cell.back())));
  if (!padded && cell.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(cell);
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string join(std::initializer_list<std::string_view> cells) {
  std::string out;
  bool first = true;
  for (auto c : cells) {
    if (!first) out += ',';
    out += escape(c);
    first = false;
  }
  return out;
}

std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += escape(cells[i]);
  }
  return out;
}

std::string format_real(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), ptr);
}

}  // namespace livrank::csv
