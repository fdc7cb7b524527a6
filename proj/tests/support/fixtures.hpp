#pragma once

#include <unistd.h>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "livrank/corpus.hpp"

namespace fixtures {

inline std::filesystem::path data(const std::string& name) { return std::filesystem::path(LIVRANK_TEST_DATA) / name; }

/// Cohort of n items with latent scores drawn from N(0, 1).
inline livrank::Cohort latent_cohort(std::size_t n, std::uint64_t seed, std::size_t provinces = 5) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<livrank::Item> items;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string id = "v" + std::to_string(i);
    items.push_back({id, "Village " + std::to_string(i), "P" + std::to_string(i % provinces),
                     "C" + std::to_string(i % (3 * provinces)), id + ".png", normal(rng)});
  }
  return livrank::Cohort(std::move(items), "synthetic");
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("livrank_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
