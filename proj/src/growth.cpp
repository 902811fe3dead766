#include "fertrot/growth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fertrot {

namespace {

bool all_finite(const auto& coeffs) {
  return std::all_of(coeffs.begin(), coeffs.end(),
                     [](double c) { return std::isfinite(c); });
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

std::string_view to_string(Species s) {
  switch (s) {
    case Species::Spruce: return "spruce";
    case Species::Pine: return "pine";
    case Species::Birch: return "birch";
    case Species::Other: return "other";
  }
  return "?";
}

std::string_view to_string(Assortment a) {
  return a == Assortment::Sawlog ? "sawlog" : "pulp";
}

std::string_view to_string(HarvestType h) {
  return h == HarvestType::Thinning ? "thinning" : "clearcut";
}

Species species_from_string(std::string_view name) {
  for (Species s : kAllSpecies)
    if (to_string(s) == name) return s;
  throw InputError("unknown species '" + std::string(name) + "'");
}

Assortment assortment_from_string(std::string_view name) {
  if (name == "sawlog") return Assortment::Sawlog;
  if (name == "pulp") return Assortment::Pulp;
  throw InputError("unknown assortment '" + std::string(name) + "'");
}

bool on_step_grid(double t) {
  const double k = t / kStepYears;
  return std::abs(k - std::round(k)) < 1e-9;
}

void validate(const StandState& state) {
  if (!std::isfinite(state.age) || state.age < 0.0)
    throw PreconditionError("stand age must be >= 0");
  if (!(state.site.site_index > 5.0 && state.site.site_index < 40.0))
    throw PreconditionError("site index must lie in (5, 40) m");
  if (!(state.fert_remaining >= 0.0 && state.fert_remaining <= kFertilizationYears))
    throw PreconditionError("fertilization clock must lie in [0, 10] years");
  if (!state.stems.allFinite() || (state.stems.array() < 0.0).any())
    throw PreconditionError("stem counts must be finite and non-negative");
}

void validate(const GrowthParams& params) {
  if (!std::isfinite(params.site_index_bump) || params.site_index_bump < 0.0)
    throw InputError("site_index_bump must be finite and >= 0");
  for (Species s : kAllSpecies) {
    const SpeciesGrowth& g = params[s];
    const std::string name(to_string(s));
    if (!all_finite(g.increment) || !all_finite(g.survival) || !all_finite(g.ingrowth))
      throw InputError(name + ": non-finite growth coefficient");
    if (g.increment[4] < 0.0)
      throw InputError(name + ": increment must be non-decreasing in site index");
    if (!std::isfinite(g.volume_scale) || !std::isfinite(g.volume_exponent) ||
        g.volume_scale < 0.0)
      throw InputError(name + ": invalid volume function");
    if (!(g.sawlog_max_share >= 0.0 && g.sawlog_max_share <= 1.0) ||
        !(g.sawlog_full_cm > g.sawlog_start_cm))
      throw InputError(name + ": invalid sawlog ramp");
  }
}

double effective_site_index(const StandState& state, double bump) {
  return state.fert_remaining > 0.0 ? state.site.site_index + bump
                                    : state.site.site_index;
}

double basal_area(const StemMatrix& stems) {
  // m2 per stem from a diameter in cm
  const ClassRow area =
      (class_midpoints().array().square() * (std::numbers::pi / 4.0e4)).transpose();
  return (stems.array().rowwise() * area.array()).sum();
}

double annual_increment(const SpeciesGrowth& g, double d, double ba, double si) {
  const auto& c = g.increment;
  return std::max(0.0, c[0] + c[1] * d + c[2] * d * d + c[3] * ba + c[4] * si);
}

double step_survival(const SpeciesGrowth& g, double d, double ba, double si) {
  const auto& a = g.survival;
  const double annual = logistic(a[0] + a[1] * d + a[2] * d * d + a[3] * ba + a[4] * si);
  return annual * annual * std::sqrt(annual);  // annual^2.5
}

double step_ingrowth(const SpeciesGrowth& g, double ba, double si) {
  const auto& c = g.ingrowth;
  return kStepYears * std::max(0.0, c[0] + c[1] * ba + c[2] * si);
}

TransitionMatrix transition_matrix(const ClassVector& survival,
                                   const ClassVector& upgrowth) {
  TransitionMatrix a = TransitionMatrix::Zero();
  for (int j = 0; j < kClassCount; ++j) {
    const double u = j + 1 < kClassCount ? std::clamp(upgrowth(j), 0.0, 1.0) : 0.0;
    a(j, j) = survival(j) * (1.0 - u);
    if (j + 1 < kClassCount) a(j + 1, j) = survival(j) * u;
  }
  return a;
}

StandState advance_step(const StandState& state, const GrowthParams& params) {
  const double ba = basal_area(state.stems);
  const double si = effective_site_index(state, params.site_index_bump);
  StandState next = state;
  for (Species s : kAllSpecies) {
    const int row = index(s);
    // absent species stay absent: no survivors and no ingrowth
    if (state.stems.row(row).sum() == 0.0) continue;
    const SpeciesGrowth& g = params[s];
    ClassVector surv;
    ClassVector up;
    for (int j = 0; j < kClassCount; ++j) {
      const double d = class_midpoint(j);
      surv(j) = step_survival(g, d, ba, si);
      up(j) = kStepYears * annual_increment(g, d, ba, si) / kClassWidthCm;
    }
    ClassVector n = transition_matrix(surv, up) * state.stems.row(row).transpose();
    n(0) += step_ingrowth(g, ba, si);
    next.stems.row(row) = n.transpose();
  }
  next.age = state.age + kStepYears;
  next.fert_remaining = std::max(0.0, state.fert_remaining - kStepYears);
  return next;
}

StandState apply_fertilization(const StandState& state) {
  if (state.fert_remaining > 0.0)
    throw PreconditionError("fertilization applied while a previous application is active");
  StandState next = state;
  next.fert_remaining = kFertilizationYears;
  return next;
}

double stem_volume(const SpeciesGrowth& g, double d) {
  return g.volume_scale * std::pow(d, g.volume_exponent);
}

double sawlog_share(const SpeciesGrowth& g, double d) {
  const double x = (d - g.sawlog_start_cm) / (g.sawlog_full_cm - g.sawlog_start_cm);
  return g.sawlog_max_share * std::clamp(x, 0.0, 1.0);
}

VolumeTable volume_table(const GrowthParams& params) {
  VolumeTable t;
  for (Species s : kAllSpecies) {
    const SpeciesGrowth& g = params[s];
    for (int j = 0; j < kClassCount; ++j) {
      const double d = class_midpoint(j);
      const double total = stem_volume(g, d);
      t.sawlog(index(s), j) = total * sawlog_share(g, d);
      t.pulp(index(s), j) = total - t.sawlog(index(s), j);
    }
  }
  return t;
}

AssortmentMatrix assortment_volumes(const StemMatrix& stems, const VolumeTable& table) {
  AssortmentMatrix v;
  v.col(index(Assortment::Sawlog)) = stems.cwiseProduct(table.sawlog).rowwise().sum();
  v.col(index(Assortment::Pulp)) = stems.cwiseProduct(table.pulp).rowwise().sum();
  return v;
}

AssortmentMatrix assortment_volumes(const StemMatrix& stems, const GrowthParams& params) {
  return assortment_volumes(stems, volume_table(params));
}

StandMetrics stand_metrics(const StandState& state, const GrowthParams& params) {
  StandMetrics m;
  m.basal_area = basal_area(state.stems);
  m.stems = state.stems.sum();
  m.volume = assortment_volumes(state.stems, params);
  return m;
}

}  // namespace fertrot
