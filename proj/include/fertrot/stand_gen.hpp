#pragma once

#include "fertrot/io.hpp"

#include <vector>

namespace fertrot {

// Aggregate ranges of the young, never-thinned spruce stands the generator
// imitates.
inline constexpr double kGenAgeMin = 30.0;
inline constexpr double kGenAgeMax = 45.0;
inline constexpr double kGenStemsMin = 1655.0;
inline constexpr double kGenStemsMax = 2451.0;
inline constexpr double kGenBasalAreaMin = 29.0;
inline constexpr double kGenBasalAreaMax = 49.0;

/// Synthetic spruce-dominated mesic stands, deterministic per seed.
std::vector<StandFile> generate_stands(unsigned long seed, int count);

}  // namespace fertrot
