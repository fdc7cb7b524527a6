#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "livrank/judge.hpp"

namespace livrank {

struct Criterion {
  std::string description;
  double weight = 0.0;  // percent
};

/// Weighted livability criteria that drive both prompts. Versioned so a log
/// can record which template produced it.
struct CriteriaConfig {
  std::string version = "livability-cot-v1";
  std::string language = "en";
  std::vector<Criterion> criteria;

  /// Six expert criteria, weights 20/20/20/20/10/10.
  static CriteriaConfig defaults();
  /// Throws ConfigError unless non-empty, descriptions non-blank, weights sum to 100.
  void validate() const;
};

/// JSON: {"version": ..., "language": ..., "criteria": [{"description": ..., "weight": ...}]}
CriteriaConfig load_criteria(const std::filesystem::path& path);

/// Single-image instruction asking for a factual description covering every criterion.
std::string build_describe_prompt(const CriteriaConfig& cfg);

/// Pair instruction: left image is Village A, right image is Village B, with
/// their descriptions, the weighted criteria as numbered reasoning steps,
/// and a terminal `Final: A` / `Final: B` line.
std::string build_compare_prompt(std::string_view desc_a, std::string_view desc_b,
                                 const CriteriaConfig& cfg);

/// Extracts the last verdict marker ("Final: B", "the answer is A", or a
/// bare last line "A"/"B"). Throws UnparseableVerdict when none is found.
Outcome parse_verdict(std::string_view model_text);

}  // namespace livrank
