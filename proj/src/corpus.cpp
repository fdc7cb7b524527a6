#include "livrank/corpus.hpp"

#include <fstream>
#include <sstream>

#include "livrank/csv.hpp"
#include "livrank/error.hpp"

namespace livrank {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kManifestHeader{"id", "name", "province", "county", "image_ref"};
const std::vector<std::string> kSurveyHeader{"county_id", "tem", "ter", "fin", "cinc", "vinc"};

std::string where(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line);
}

bool header_matches(const std::vector<std::string>& got, const std::vector<std::string>& want,
                    std::string_view optional_last) {
  if (got.size() != want.size() && got.size() != want.size() + 1) return false;
  for (std::size_t i = 0; i < want.size(); ++i)
    if (got[i] != want[i]) return false;
  return got.size() == want.size() || got.back() == optional_last;
}

}  // namespace

Cohort::Cohort(std::vector<Item> items, fs::path source) : items_(std::move(items)), source_(std::move(source)) {
  std::size_t with_latent = 0;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const Item& it = items_[i];
    if (it.id.empty()) throw DataError("item " + std::to_string(i) + " has an empty id");
    auto [pos, inserted] = index_.emplace(it.id, i);
    if (!inserted) throw DataError("duplicate id \"" + it.id + "\"");
    if (it.latent_score) ++with_latent;
  }
  if (with_latent != 0 && with_latent != items_.size())
    throw DataError("latent_score must be present for every item or for none (" + std::to_string(with_latent) +
                    " of " + std::to_string(items_.size()) + " have one)");
}

bool Cohort::has_latent_scores() const noexcept {
  return !items_.empty() && items_.front().latent_score.has_value();
}

const Item* Cohort::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &items_[it->second];
}

const Item& Cohort::at(std::string_view id) const {
  if (const Item* it = find(id)) return *it;
  throw DataError("unknown item id \"" + std::string(id) + "\"");
}

std::string Cohort::resolve_image(const Item& item) const {
  if (is_url(item.image_ref)) return item.image_ref;
  fs::path p(item.image_ref);
  if (p.is_relative() && !source_.empty()) p = source_.parent_path() / p;
  return p.string();
}

bool is_url(std::string_view ref) noexcept {
  return ref.starts_with("http://") || ref.starts_with("https://");
}

Cohort parse_manifest(std::istream& in, std::string_view source) {
  const auto rows = csv::read(in, source);
  if (rows.empty()) throw DataError(std::string(source) + ": empty manifest (no header)");
  if (!header_matches(rows.front().cells, kManifestHeader, "latent_score"))
    throw DataError(where(source, rows.front().line) +
                    ": expected header id,name,province,county,image_ref[,latent_score]");
  const std::size_t width = rows.front().cells.size();
  const bool has_latent_column = width == kManifestHeader.size() + 1;

  std::vector<Item> items;
  std::unordered_map<std::string, std::size_t> first_line;
  std::optional<bool> latent_present;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.cells.size() != width)
      throw DataError(where(source, row.line) + ": expected " + std::to_string(width) + " columns, found " +
                      std::to_string(row.cells.size()));
    Item it{row.cells[0], row.cells[1], row.cells[2], row.cells[3], row.cells[4], std::nullopt};
    if (it.id.empty()) throw DataError(where(source, row.line) + ": empty id");
    if (auto [pos, inserted] = first_line.emplace(it.id, row.line); !inserted)
      throw DataError(where(source, row.line) + ": duplicate id \"" + it.id + "\" (first defined on line " +
                      std::to_string(pos->second) + ", repeated on line " + std::to_string(row.line) + ")");
    if (has_latent_column) {
      const std::string& cell = row.cells[5];
      if (!cell.empty()) {
        it.latent_score = csv::parse_real(cell);
        if (!it.latent_score)
          throw DataError(where(source, row.line) + ": latent_score \"" + cell + "\" is not a finite number");
      }
      if (latent_present && *latent_present != it.latent_score.has_value())
        throw DataError(where(source, row.line) + ": mixed presence of latent_score");
      latent_present = it.latent_score.has_value();
    }
    items.push_back(std::move(it));
  }
  return Cohort(std::move(items), fs::path(source));
}

Cohort load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("manifest " + path.string() + " not found or unreadable");
  return parse_manifest(in, path.string());
}

void write_manifest(std::ostream& out, const Cohort& cohort) {
  const bool latent = cohort.has_latent_scores();
  out << "id,name,province,county,image_ref" << (latent ? ",latent_score" : "") << '\n';
  for (const Item& it : cohort.items()) {
    out << csv::join({it.id, it.name, it.province, it.county, it.image_ref});
    if (latent) out << ',' << csv::format_real(*it.latent_score);
    out << '\n';
  }
}

std::vector<SurveyRow> parse_survey(std::istream& in, std::string_view source) {
  const auto rows = csv::read(in, source);
  if (rows.size() < 2) throw DataError(std::string(source) + ": empty survey file");
  if (!header_matches(rows.front().cells, kSurveyHeader, "livability"))
    throw DataError(where(source, rows.front().line) + ": expected header county_id,tem,ter,fin,cinc,vinc[,livability]");
  const auto& header = rows.front().cells;
  const std::size_t width = header.size();

  std::vector<SurveyRow> out;
  out.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string ctx = where(source, row.line) + " (data row " + std::to_string(r) + ")";
    if (row.cells.size() != width)
      throw DataError(ctx + ": expected " + std::to_string(width) + " columns, found " + std::to_string(row.cells.size()));
    SurveyRow s;
    s.county_id = row.cells[0];
    if (s.county_id.empty()) throw DataError(ctx + ": empty county_id");

    auto optional_cell = [&](std::size_t col) -> std::optional<double> {
      const std::string& cell = row.cells[col];
      if (cell.empty()) return std::nullopt;
      auto v = csv::parse_real(cell);
      if (!v) throw DataError(ctx + ": column " + header[col] + " value \"" + cell + "\" is not a finite number");
      return v;
    };
    auto tem = optional_cell(1);
    if (!tem) throw DataError(ctx + ": tem is required");
    s.tem = *tem;
    s.ter = optional_cell(2);
    s.fin = optional_cell(3);
    s.cinc = optional_cell(4);
    s.vinc = optional_cell(5);
    if (width == kSurveyHeader.size() + 1) s.livability = optional_cell(6);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<SurveyRow> load_survey(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("survey " + path.string() + " not found or unreadable");
  return parse_survey(in, path.string());
}

void write_survey(std::ostream& out, std::span<const SurveyRow> rows) {
  auto cell = [](const std::optional<double>& v) { return v ? csv::format_real(*v) : std::string(); };
  out << "county_id,tem,ter,fin,cinc,vinc,livability\n";
  for (const auto& r : rows)
    out << csv::escape(r.county_id) << ',' << csv::format_real(r.tem) << ',' << cell(r.ter) << ','
        << cell(r.fin) << ',' << cell(r.cinc) << ',' << cell(r.vinc) << ',' << cell(r.livability) << '\n';
}

}  // namespace livrank
