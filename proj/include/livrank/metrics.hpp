#pragma once

#include <cstdint>

#include "livrank/ranker.hpp"

namespace livrank {

/// Spearman's Footrule: sum over items of |pos_sigma(i) - pos_tau(i)| with
/// 1-based positions. Both rankings must hold the same ids exactly once.
std::int64_t footrule(const Ranking& sigma, const Ranking& tau);

/// Largest possible Footrule distance for n items: floor(n^2 / 2).
std::int64_t max_footrule(std::size_t n) noexcept;

/// 1 - footrule / max_footrule(n), for n >= 2.
double footrule_similarity(const Ranking& sigma, const Ranking& tau);

}  // namespace livrank
