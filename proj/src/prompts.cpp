#include "livrank/prompts.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "livrank/error.hpp"

namespace livrank {

CriteriaConfig CriteriaConfig::defaults() {
  CriteriaConfig c;
  c.criteria = {
      {"The villages are predominantly characterized by row houses of two or more stories. The building heights are "
       "observed to be moderate, and the facades are maintained in a clean and uniform manner. A harmonious color "
       "scheme is employed throughout. Modern architectural styles and decorative elements are frequently "
       "incorporated.",
       20.0},
      {"The village development respects natural topography, featuring nature-adaptive building patterns (structures "
       "thoughtfully positioned along terrain contours), clear water bodies (transparent streams and ponds with "
       "visible riparian vegetation), and large patches of flourishing farmland integrated with surrounding natural "
       "greenery.",
       20.0},
      {"The village roads are observed to be clean and undamaged, with vibrant coloration. No loose soil is detected "
       "on the surfaces. Traffic signs are clearly visible and legible. The main thoroughfares are found to be "
       "accessible to vehicular traffic. It is noted that the roads connecting residential areas have been subjected "
       "to hardening processes.",
       20.0},
      {"The quality of villages is generally observed to be superior where a higher proportion of newly constructed "
       "dwellings is present and wall surfaces are found to be undamaged. However, villages predominantly composed of "
       "older structures are not necessarily deemed inferior. The assessment of such villages is contingent upon the "
       "degree of wear and tear exhibited by the buildings.",
       20.0},
      {"The villages feature well-maintained architectural aesthetics, with freshly painted walls and tastefully "
       "decorated facades, indicating higher residential livability.",
       10.0},
      {"The villages present thoughtfully organized building layouts, characterized by clear structural patterns and "
       "orderly orientations, demonstrating a superior living environment.",
       10.0},
  };
  return c;
}

void CriteriaConfig::validate() const {
  if (criteria.empty()) throw ConfigError("criteria list is empty");
  double total = 0.0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    if (c.description.find_first_not_of(" \t\r\n") == std::string::npos)
      throw ConfigError("criterion " + std::to_string(i + 1) + " has an empty description");
    if (!(c.weight > 0.0)) throw ConfigError("criterion " + std::to_string(i + 1) + " needs a positive weight");
    total += c.weight;
  }
  if (std::abs(total - 100.0) > 1e-9)
    throw ConfigError("criteria weights sum to " + std::to_string(total) + ", expected 100");
}

CriteriaConfig load_criteria(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("criteria file " + path.string() + " not found");
  CriteriaConfig cfg;
  try {
    const auto j = nlohmann::json::parse(in);
    cfg.version = j.value("version", cfg.version);
    cfg.language = j.value("language", cfg.language);
    for (const auto& c : j.at("criteria"))
      cfg.criteria.push_back({c.at("description").get<std::string>(), c.at("weight").get<double>()});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": invalid criteria file: " + e.what());
  }
  cfg.validate();
  return cfg;
}

namespace {

std::string weight_text(double w) {
  std::ostringstream ss;
  if (w == std::floor(w)) ss << static_cast<long long>(w);
  else ss << std::fixed << std::setprecision(2) << w;
  ss << '%';
  return ss.str();
}

std::string language_name(const std::string& code) {
  if (code == "en") return "English";
  if (code == "zh") return "Chinese";
  return code;
}

}  // namespace

std::string build_describe_prompt(const CriteriaConfig& cfg) {
  cfg.validate();
  std::ostringstream p;
  p << "You are an expert in rural planning and landscape assessment. The attached image is a drone photograph of a "
       "single village.\n\n"
       "Describe this village factually and concisely. Cover every dimension below, reporting what is visible and "
       "stating explicitly when something cannot be determined from the image:\n";
  for (std::size_t i = 0; i < cfg.criteria.size(); ++i)
    p << (i + 1) << ". (" << weight_text(cfg.criteria[i].weight) << ") " << cfg.criteria[i].description << '\n';
  p << "\nDo not give a score, a rating or a ranking. Write the description in " << language_name(cfg.language)
    << ".\n";
  return p.str();
}

std::string build_compare_prompt(std::string_view desc_a, std::string_view desc_b, const CriteriaConfig& cfg) {
  cfg.validate();
  auto blank = [](std::string_view s) { return s.find_first_not_of(" \t\r\n") == std::string_view::npos; };
  if (blank(desc_a)) throw DataError("description of Village A is empty");
  if (blank(desc_b)) throw DataError("description of Village B is empty");

  std::ostringstream p;
  p << "You are an expert in rural planning and landscape assessment. The attached image shows two drone "
       "photographs of villages placed side by side and separated by a blank gap. The LEFT image is Village A. The "
       "RIGHT image is Village B.\n\n"
       "Village A (left image) description:\n"
    << desc_a
    << "\n\n"
       "Village B (right image) description:\n"
    << desc_b
    << "\n\n"
       "Decide which village has the higher overall livability. Reason step by step, assessing Village A and "
       "Village B on each weighted criterion in turn:\n";
  for (std::size_t i = 0; i < cfg.criteria.size(); ++i)
    p << "Step " << (i + 1) << " (weight " << weight_text(cfg.criteria[i].weight) << "): "
      << cfg.criteria[i].description << '\n';
  p << "Step " << (cfg.criteria.size() + 1)
    << ": Combine the weighted assessments into an overall judgement. You must choose one village; ties are not "
       "allowed.\n\n"
       "Write your reasoning in "
    << language_name(cfg.language)
    << ". End your answer with a final line that is exactly \"Final: A\" if Village A is more livable, or exactly "
       "\"Final: B\" if Village B is more livable.\n";
  return p.str();
}

Outcome parse_verdict(std::string_view model_text) {
  static const std::regex marker(
      R"((?:[Ff]inal(?:\s+[Aa]nswer)?|[Aa]nswer|[Vv]erdict|[Ww]inner|FINAL|ANSWER|VERDICT|WINNER)(?:\s+is)?\s*[:=\-]?\s*(?:[Vv]illage\s+)?[*"'(\[]*([AB])\b)");
  const std::string text(model_text);

  std::optional<char> found;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), marker); it != std::sregex_iterator(); ++it)
    found = (*it)[1].str().front();

  if (!found) {
    // Fall back to a bare last line such as "B" or "**A**".
    std::istringstream lines(text);
    std::string line, last;
    while (std::getline(lines, line))
      if (line.find_first_not_of(" \t\r") != std::string::npos) last = line;
    std::string core;
    for (char c : last)
      if (std::isalnum(static_cast<unsigned char>(c))) core += c;
    if (core == "A" || core == "B") found = core.front();
  }
  if (!found) throw UnparseableVerdict("no final A/B verdict in model response");

  Outcome out;
  out.winner = *found == 'A' ? Side::Left : Side::Right;
  out.raw_text = text;
  out.judge_kind = JudgeKind::Remote;
  return out;
}

}  // namespace livrank
