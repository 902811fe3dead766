#pragma once

// Fertilization timing scenarios paired against an unfertilized,
// thinning-optimized baseline, and the rotation-extension expense
//
//   E = -dr (tau + dtau) (C + dC)
//
// with its per-volume-per-year form E / (dV (tau + dtau)).

#include "fertrot/optimizer.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fertrot {

enum class ScenarioKind {
  AfterFirstThinning,
  AfterSecondThinning,
  TenYearsBeforeMaturity,
  AtMaturityExtendTen,
};

inline constexpr std::array<ScenarioKind, 4> kAllScenarioKinds{
    ScenarioKind::AfterFirstThinning, ScenarioKind::AfterSecondThinning,
    ScenarioKind::TenYearsBeforeMaturity, ScenarioKind::AtMaturityExtendTen};

std::string_view to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(std::string_view name);

inline constexpr double kExtensionYears = 10.0;

/// Expense of moving from one cycle to another (negative = profitable).
double rotation_extension_expense(double delta_r, double tau_plus, double cap_plus);
/// Throws PreconditionError when delta_v == 0 or tau_plus <= 0.
double stock_expense_rate(double expense, double delta_v, double tau_plus);
/// Rate allocated to the extension period only. Throws PreconditionError
/// when delta_tau <= 0.
double extension_only_rate(double rate, double tau_plus, double delta_tau);

/// Differences of a treated cycle against a reference cycle.
struct PairedDelta {
  std::string label;
  double tau_reference = 0.0;
  double tau_treated = 0.0;
  double delta_tau = 0.0;
  double delta_r = 0.0;          // 1/a
  double delta_v = 0.0;          // m3/ha
  double delta_v_pct = 0.0;      // % of the reference volume
  double delta_k = 0.0;          // Eur/ha
  double extension_expense = 0.0;  // Eur/ha
  std::optional<double> stock_expense_rate;   // Eur/(m3 a)
  std::optional<double> extension_only_rate;  // Eur/(m3 a)
  double carbon_stem = 0.0;      // tCO2/ha
  double carbon_total = 0.0;     // tCO2/ha
};

PairedDelta paired_delta(std::string label, const CycleExpectation& reference,
                         const CycleExpectation& treated, const EconomicConfig& cfg);

struct ScenarioResult {
  ScenarioKind kind{};
  Schedule baseline_schedule;
  Schedule fertilized_schedule;
  std::vector<CycleExpectation> baseline_curve;
  std::vector<CycleExpectation> fertilized_curve;
  double tau_baseline = 0.0;
  double tau_fertilized = 0.0;
  // fertilized optimum against baseline optimum
  PairedDelta at_optima;
  // fertilized run at the baseline rotation, when that rotation is on its curve
  std::optional<PairedDelta> fixed_rotation;
  // AtMaturityExtendTen only: unfertilized extension against the baseline
  // optimum, and fertilized against unfertilized extension
  std::optional<PairedDelta> extension_unfertilized;
  std::optional<PairedDelta> fertilized_vs_extended;
};

/// Baseline shared by all scenario kinds of one stand.
struct Baseline {
  SearchResult search;
  double tau = 0.0;
};

Baseline run_baseline(const StandState& initial, const GrowthParams& growth,
                      const EconomicConfig& cfg, const OptimizationConfig& opt);

/// Throws PreconditionError when the kind does not apply (too few
/// baseline thinnings, fertilization before the observed age) or the site
/// is not a mesic mineral-soil site.
ScenarioResult run_scenario(ScenarioKind kind, const StandState& initial,
                            const GrowthParams& growth, const EconomicConfig& cfg,
                            const OptimizationConfig& opt, const Baseline& baseline);

ScenarioResult run_scenario(ScenarioKind kind, const StandState& initial,
                            const GrowthParams& growth, const EconomicConfig& cfg,
                            const OptimizationConfig& opt);

/// Point of a curve at rotation age tau, if present.
std::optional<CycleExpectation> at_rotation(const std::vector<CycleExpectation>& curve, double tau);

}  // namespace fertrot
