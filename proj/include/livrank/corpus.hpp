#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace livrank {

/// One village: the unit being ranked.
struct Item {
  std::string id;
  std::string name;
  std::string province;
  std::string county;
  std::string image_ref;  // file path (relative to the manifest) or http(s) URL
  std::optional<double> latent_score;  // simulation-only ground truth

  friend bool operator==(const Item&, const Item&) = default;
};

/// Ordered, id-unique collection of items loaded from a manifest.
class Cohort {
 public:
  Cohort() = default;
  /// Throws DataError on an empty or duplicate id, or on mixed latent_score presence.
  explicit Cohort(std::vector<Item> items, std::filesystem::path source = {});

  const std::vector<Item>& items() const noexcept { return items_; }
  const std::filesystem::path& source() const noexcept { return source_; }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  bool has_latent_scores() const noexcept;

  const Item* find(std::string_view id) const;
  /// Throws DataError for an unknown id.
  const Item& at(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }

  /// Resolves an item's image_ref against the manifest directory; URLs pass through.
  std::string resolve_image(const Item& item) const;

  friend bool operator==(const Cohort& a, const Cohort& b) { return a.items_ == b.items_; }

 private:
  std::vector<Item> items_;
  std::filesystem::path source_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Manifest CSV: header `id,name,province,county,image_ref[,latent_score]`.
Cohort load_manifest(const std::filesystem::path& path);
Cohort parse_manifest(std::istream& in, std::string_view source);
void write_manifest(std::ostream& out, const Cohort& cohort);

/// County-level covariates. Units for fin/cinc/vinc are 10^4 yuan.
struct SurveyRow {
  std::string county_id;
  double tem = 0.0;  // mean annual temperature, degrees C
  std::optional<double> ter;
  std::optional<double> fin;
  std::optional<double> cinc;
  std::optional<double> vinc;
  std::optional<double> livability;

  friend bool operator==(const SurveyRow&, const SurveyRow&) = default;
};

/// Survey CSV: header `county_id,tem,ter,fin,cinc,vinc[,livability]`.
/// Blank cells other than county_id and tem become absent values.
std::vector<SurveyRow> load_survey(const std::filesystem::path& path);
std::vector<SurveyRow> parse_survey(std::istream& in, std::string_view source);
void write_survey(std::ostream& out, std::span<const SurveyRow> rows);

bool is_url(std::string_view ref) noexcept;

}  // namespace livrank
