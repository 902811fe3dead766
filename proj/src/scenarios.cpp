#include "fertrot/scenarios.hpp"

#include <cmath>
#include <string>

namespace fertrot {

namespace {

void require_fertilizable(const StandState& s) {
  if (s.site.site_class != SiteClass::Mesic || s.site.soil != Soil::Mineral)
    throw PreconditionError("fertilization scenarios apply to mesic mineral-soil sites only");
  const double total = basal_area(s.stems);
  StemMatrix spruce = StemMatrix::Zero();
  spruce.row(index(Species::Spruce)) = s.stems.row(index(Species::Spruce));
  if (!(total > 0.0) || basal_area(spruce) <= 0.5 * total)
    throw PreconditionError("fertilization scenarios apply to spruce-dominated stands only");
}

const CycleExpectation& point(const std::vector<CycleExpectation>& curve, double tau,
                              const char* what) {
  for (const CycleExpectation& e : curve)
    if (std::abs(e.tau - tau) < 1e-9) return e;
  throw InvariantError(std::string(what) + ": rotation " + std::to_string(tau) + " missing from curve");
}

}  // namespace

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::AfterFirstThinning: return "AfterFirstThinning";
    case ScenarioKind::AfterSecondThinning: return "AfterSecondThinning";
    case ScenarioKind::TenYearsBeforeMaturity: return "TenYearsBeforeMaturity";
    case ScenarioKind::AtMaturityExtendTen: return "AtMaturityExtendTen";
  }
  return "?";
}

ScenarioKind scenario_kind_from_string(std::string_view name) {
  for (ScenarioKind k : kAllScenarioKinds)
    if (to_string(k) == name) return k;
  throw InputError("unknown scenario kind '" + std::string(name) + "'");
}

double rotation_extension_expense(double delta_r, double tau_plus, double cap_plus) {
  return -delta_r * tau_plus * cap_plus;
}

double stock_expense_rate(double expense, double delta_v, double tau_plus) {
  if (delta_v == 0.0) throw PreconditionError("stock expense rate undefined without a volume change");
  if (!(tau_plus > 0.0)) throw PreconditionError("rotation must be positive");
  return expense / (delta_v * tau_plus);
}

double extension_only_rate(double rate, double tau_plus, double delta_tau) {
  if (!(delta_tau > 0.0)) throw PreconditionError("extension-only rate requires a positive extension");
  return rate * tau_plus / delta_tau;
}

std::optional<CycleExpectation> at_rotation(const std::vector<CycleExpectation>& curve, double tau) {
  for (const CycleExpectation& e : curve)
    if (std::abs(e.tau - tau) < 1e-9) return e;
  return std::nullopt;
}

PairedDelta paired_delta(std::string label, const CycleExpectation& reference,
                         const CycleExpectation& treated, const EconomicConfig& cfg) {
  PairedDelta d;
  d.label = std::move(label);
  d.tau_reference = reference.tau;
  d.tau_treated = treated.tau;
  d.delta_tau = treated.tau - reference.tau;
  d.delta_r = treated.expected_return_rate - reference.expected_return_rate;
  d.delta_v = treated.expected_volume - reference.expected_volume;
  d.delta_v_pct = reference.expected_volume > 0.0 ? 100.0 * d.delta_v / reference.expected_volume : 0.0;
  d.delta_k = treated.expected_capitalization - reference.expected_capitalization;
  d.extension_expense =
      rotation_extension_expense(d.delta_r, treated.tau, treated.expected_capitalization);
  if (d.delta_v != 0.0) {
    d.stock_expense_rate = stock_expense_rate(d.extension_expense, d.delta_v, treated.tau);
    if (d.delta_tau > 0.0)
      d.extension_only_rate = extension_only_rate(*d.stock_expense_rate, treated.tau, d.delta_tau);
  }
  d.carbon_stem = carbon_equivalent(d.delta_v, cfg, CarbonMode::Stem);
  d.carbon_total = carbon_equivalent(d.delta_v, cfg, CarbonMode::Total);
  return d;
}

Baseline run_baseline(const StandState& initial, const GrowthParams& growth,
                      const EconomicConfig& cfg, const OptimizationConfig& opt) {
  Baseline b;
  b.search = greedy_thinning_search(initial, growth, cfg, opt);
  b.tau = b.search.schedule.rotation;
  return b;
}

ScenarioResult run_scenario(ScenarioKind kind, const StandState& initial,
                            const GrowthParams& growth, const EconomicConfig& cfg,
                            const OptimizationConfig& opt, const Baseline& baseline) {
  require_fertilizable(initial);
  ScenarioResult r;
  r.kind = kind;
  r.baseline_schedule = baseline.search.schedule;
  r.baseline_curve = baseline.search.curve;
  r.tau_baseline = baseline.tau;
  const double tau_b = baseline.tau;
  const auto& thinnings = baseline.search.schedule.thinnings;

  switch (kind) {
    case ScenarioKind::AfterFirstThinning:
    case ScenarioKind::AfterSecondThinning: {
      const std::size_t which = kind == ScenarioKind::AfterFirstThinning ? 0 : 1;
      if (thinnings.size() <= which)
        throw PreconditionError(std::string(to_string(kind)) + " requires a baseline with at least " +
                                std::to_string(which + 1) + " thinning(s)");
      const SearchResult fert =
          greedy_thinning_search(initial, growth, cfg, opt, {thinnings[which].time});
      r.fertilized_schedule = fert.schedule;
      r.fertilized_curve = fert.curve;
      r.tau_fertilized = fert.schedule.rotation;
      break;
    }
    case ScenarioKind::TenYearsBeforeMaturity: {
      const double t_fert = tau_b - kFertilizationYears;
      if (t_fert < initial.age)
        throw PreconditionError("TenYearsBeforeMaturity: fertilization would precede the observed age");
      Schedule s = baseline.search.schedule;
      s.fertilizations.push_back(t_fert);
      r.fertilized_schedule = s;
      r.fertilized_curve = simulate_schedule(initial, s, growth, cfg, opt.window).curve;
      r.tau_fertilized = tau_b;
      break;
    }
    case ScenarioKind::AtMaturityExtendTen: {
      RotationWindow window = opt.window;
      window.max_rotation = std::max(window.max_rotation, tau_b + kExtensionYears);
      r.baseline_curve = simulate_schedule(initial, baseline.search.schedule, growth, cfg, window).curve;
      Schedule s = baseline.search.schedule;
      s.fertilizations.push_back(tau_b);
      s.rotation = tau_b + kExtensionYears;
      r.fertilized_schedule = s;
      r.fertilized_curve = simulate_schedule(initial, s, growth, cfg, window).curve;
      r.tau_fertilized = s.rotation;
      break;
    }
  }

  const CycleExpectation& ref = point(r.baseline_curve, tau_b, "baseline");
  const CycleExpectation& treated = point(r.fertilized_curve, r.tau_fertilized, "fertilized");
  r.at_optima = paired_delta("fertilized optimum vs baseline optimum", ref, treated, cfg);
  if (auto fixed = at_rotation(r.fertilized_curve, tau_b))
    r.fixed_rotation = paired_delta("fertilized vs baseline at baseline rotation", ref, *fixed, cfg);
  if (kind == ScenarioKind::AtMaturityExtendTen) {
    const CycleExpectation& extended = point(r.baseline_curve, r.tau_fertilized, "extended baseline");
    r.extension_unfertilized =
        paired_delta("unfertilized extension vs baseline optimum", ref, extended, cfg);
    r.fertilized_vs_extended =
        paired_delta("fertilized extension vs unfertilized extension", extended, treated, cfg);
  }
  return r;
}

ScenarioResult run_scenario(ScenarioKind kind, const StandState& initial,
                            const GrowthParams& growth, const EconomicConfig& cfg,
                            const OptimizationConfig& opt) {
  require_fertilizable(initial);
  return run_scenario(kind, initial, growth, cfg, opt, run_baseline(initial, growth, cfg, opt));
}

}  // namespace fertrot
