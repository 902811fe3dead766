#pragma once

// Rotation choice and incremental thinning search.
//
// The search starts from the schedule without thinnings, then introduces
// thinnings one at a time. Each proposal scans a (time, intensity,
// allocation exponent, species profile) grid for the new thinning, refines
// all thinnings by coordinate descent on the same grid, and is accepted
// only if the best expected return rate over rotation ages improves by
// more than epsilon.

#include "fertrot/schedule.hpp"

#include <string>
#include <vector>

namespace fertrot {

struct OptimizationConfig {
  RotationWindow window;
  // thinning times searched: observed_age + thinning_offset_min ...
  // observed_age + thinning_offset_max, on the 2.5-year grid
  double thinning_offset_min = 0.0;
  double thinning_offset_max = 40.0;
  double q_min = 0.05;
  double q_max = 0.6;
  double q_step = 0.05;
  std::vector<int> exponents{-2, -1, 0, 1, 2};
  // adds one profile per present species doubling its intensity
  bool species_profiles = true;
  double epsilon = 1e-5;  // 1/a
  int max_thinnings = 3;
};

void validate(const OptimizationConfig& opt);

/// Rotation age of maximal expected return rate; ties go to the shortest.
/// Throws PreconditionError on an empty curve.
double optimal_rotation(const std::vector<CycleExpectation>& curve);

/// Largest expected return rate of a curve, -inf when empty.
double max_return_rate(const std::vector<CycleExpectation>& curve);

struct SearchTraceRow {
  int iteration = 0;
  std::string candidate;
  double max_return_rate = 0.0;
  long evaluations = 0;
};

struct SearchResult {
  Schedule schedule;  // rotation set to the optimum
  std::vector<CycleExpectation> curve;
  double max_return_rate = 0.0;
  std::vector<SearchTraceRow> trace;  // one row per accepted step
};

/// Scores a schedule by the best expected return rate over the window.
double schedule_objective(const StandState& initial, const Schedule& schedule,
                          const GrowthParams& growth, const EconomicConfig& cfg,
                          const RotationWindow& window);

/// Thinning schedule search. `fertilizations` are held fixed throughout.
SearchResult greedy_thinning_search(const StandState& initial, const GrowthParams& growth,
                                    const EconomicConfig& cfg, const OptimizationConfig& opt,
                                    const std::vector<double>& fertilizations = {});

std::string describe(const ThinningSpec& spec);

}  // namespace fertrot
