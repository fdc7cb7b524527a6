#pragma once

#include <cstddef>
#include <filesystem>
#include <initializer_list>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace livrank::csv {

struct Row {
  std::size_t line = 0;  // 1-based line number in the source
  std::vector<std::string> cells;
};

/// Reads a comma-separated table. Blank lines and lines whose first
/// non-space character is '#' are skipped; a UTF-8 BOM and CR line endings
/// are tolerated. Double-quoted cells may contain commas and "" escapes.
/// The first returned row is the header.
std::vector<Row> read(std::istream& in, std::string_view source);
std::vector<Row> read_file(const std::filesystem::path& path);

/// Parses a finite double; rejects trailing garbage, NaN and infinities.
std::optional<double> parse_real(std::string_view text);

std::string escape(std::string_view cell);
std::string join(std::initializer_list<std::string_view> cells);
std::string join(const std::vector<std::string>& cells);

/// Formats a double with the shortest representation that round-trips.
std::string format_real(double value);

}  // namespace livrank::csv
