#pragma once

// Diameter-class matrix growth model stepped in 30-month increments.
//
// Each species row of the stand matrix evolves as
//
//   n' = A(s, u) n + i e_0
//
// where A is lower bidiagonal: survivors either stay in their class or move
// up one class (fraction u, clamped to [0, 1]); the top class is absorbing.
// Ingrowth i enters the smallest class. Increment, survival and ingrowth
// are evaluated at the stand basal area at the start of the step and the
// effective site index (raised while a fertilization is active).

#include "fertrot/types.hpp"

#include <array>
#include <string>

namespace fertrot {

enum class SiteClass { Mesic };
enum class Soil { Mineral };

struct SiteDescriptor {
  double site_index = 0.0;  // m, dominant height at breast-height age 40
  SiteClass site_class = SiteClass::Mesic;
  Soil soil = Soil::Mineral;
};

struct StandState {
  double age = 0.0;  // years since establishment
  StemMatrix stems = StemMatrix::Zero();
  SiteDescriptor site;
  double fert_remaining = 0.0;  // years of fertilization effect left

  bool has_species(Species s) const { return stems.row(index(s)).sum() > 0.0; }
};

struct SpeciesGrowth {
  // annual diameter increment (cm/a):
  //   max(0, c0 + c1 d + c2 d^2 + c3 BA + c4 SI)
  std::array<double, 5> increment{};
  // annual survival: logistic(a0 + a1 d + a2 d^2 + a3 BA + a4 SI)
  std::array<double, 5> survival{};
  // annual ingrowth (stems/ha/a): max(0, g0 + g1 BA + g2 SI)
  std::array<double, 3> ingrowth{};
  // stem volume (m3) = scale * d^exponent, d in cm
  double volume_scale = 0.0;
  double volume_exponent = 0.0;
  // sawlog share of stem volume ramps linearly from 0 at sawlog_start_cm
  // to sawlog_max_share at sawlog_full_cm
  double sawlog_max_share = 0.0;
  double sawlog_start_cm = 17.0;
  double sawlog_full_cm = 28.0;
};

struct GrowthParams {
  std::array<SpeciesGrowth, kSpeciesCount> species{};
  double site_index_bump = kDefaultSiteIndexBump;
  std::string version;

  const SpeciesGrowth& operator[](Species s) const { return species[index(s)]; }
  SpeciesGrowth& operator[](Species s) { return species[index(s)]; }
};

struct StandMetrics {
  double basal_area = 0.0;        // m2/ha
  double stems = 0.0;             // 1/ha
  AssortmentMatrix volume = AssortmentMatrix::Zero();  // m3/ha

  double total_volume() const { return volume.sum(); }
};

/// Throws PreconditionError unless the state is usable by the engine.
void validate(const StandState& state);
/// Throws InputError on non-finite coefficients or an increment that
/// decreases with site index.
void validate(const GrowthParams& params);

double effective_site_index(const StandState& state,
                            double bump = kDefaultSiteIndexBump);

double basal_area(const StemMatrix& stems);

double annual_increment(const SpeciesGrowth& g, double d, double ba, double si);
double step_survival(const SpeciesGrowth& g, double d, double ba, double si);
double step_ingrowth(const SpeciesGrowth& g, double ba, double si);

/// Single-step transition for one species row. `upgrowth` is clamped to
/// [0, 1] and ignored for the top class.
TransitionMatrix transition_matrix(const ClassVector& survival,
                                   const ClassVector& upgrowth);

StandState advance_step(const StandState& state, const GrowthParams& params);

/// Starts a ten-year fertilization effect. Throws PreconditionError while a
/// previous application is still active.
StandState apply_fertilization(const StandState& state);

double stem_volume(const SpeciesGrowth& g, double d);
double sawlog_share(const SpeciesGrowth& g, double d);

/// Per-stem sawlog and pulp volume (m3) for every species and class.
struct VolumeTable {
  StemMatrix sawlog = StemMatrix::Zero();
  StemMatrix pulp = StemMatrix::Zero();
};

VolumeTable volume_table(const GrowthParams& params);

/// Volume by species and assortment of an arbitrary stem matrix.
AssortmentMatrix assortment_volumes(const StemMatrix& stems, const VolumeTable& table);
AssortmentMatrix assortment_volumes(const StemMatrix& stems,
                                    const GrowthParams& params);

StandMetrics stand_metrics(const StandState& state, const GrowthParams& params);

}  // namespace fertrot
