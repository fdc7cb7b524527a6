#include "livrank/metrics.hpp"

#include <unordered_map>

#include "livrank/error.hpp"
#include "livrank/kernels.hpp"

namespace livrank {

std::int64_t footrule(const Ranking& sigma, const Ranking& tau) {
  if (sigma.size() != tau.size())
    throw DataError("rankings differ in length (" + std::to_string(sigma.size()) + " vs " +
                    std::to_string(tau.size()) + ")");
  const std::size_t n = sigma.size();
  std::unordered_map<std::string_view, std::int32_t> pos_tau;
  pos_tau.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    if (!pos_tau.emplace(tau.ordered_ids[i], static_cast<std::int32_t>(i + 1)).second)
      throw DataError("ranking lists \"" + tau.ordered_ids[i] + "\" twice");

  std::vector<std::int32_t> a(n), b(n);
  std::unordered_map<std::string_view, bool> seen;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& id = sigma.ordered_ids[i];
    auto it = pos_tau.find(id);
    if (it == pos_tau.end()) throw DataError("\"" + id + "\" appears in only one ranking");
    if (!seen.emplace(id, true).second) throw DataError("ranking lists \"" + id + "\" twice");
    a[i] = static_cast<std::int32_t>(i + 1);
    b[i] = it->second;
  }
  return kernels::parallel::total_displacement(a, b);
}

std::int64_t max_footrule(std::size_t n) noexcept {
  const auto m = static_cast<std::int64_t>(n);
  return m * m / 2;
}

double footrule_similarity(const Ranking& sigma, const Ranking& tau) {
  const std::int64_t d = footrule(sigma, tau);
  if (sigma.size() < 2) throw DataError("similarity needs at least 2 items");
  return 1.0 - static_cast<double>(d) / static_cast<double>(max_footrule(sigma.size()));
}

}  // namespace livrank
