#pragma once

// Balance-sheet / profit-loss bookkeeping over one rotation and the
// expectations of profit rate, capitalization and return rate under a
// periodic boundary condition, with time uniformly distributed over the
// cycle [0, tau].

#include "fertrot/growth.hpp"

#include <string>
#include <vector>

namespace fertrot {

struct PriceTable {
  AssortmentMatrix thinning = AssortmentMatrix::Zero();  // Eur/m3
  AssortmentMatrix clearcut = AssortmentMatrix::Zero();  // Eur/m3

  const AssortmentMatrix& operator[](HarvestType h) const {
    return h == HarvestType::Thinning ? thinning : clearcut;
  }
};

struct EconomicConfig {
  PriceTable prices;
  double regeneration_cost = 0.0;   // Eur/ha
  double fertilization_cost = 0.0;  // Eur/ha
  double bare_land_value = 0.0;     // Eur/ha
  double interest_rate = 0.0;       // 1/a, charged on capitalization
  double annual_expense = 0.0;      // Eur/ha/a, recurring operative expense
  double carbon_factor_stem = 1.0;  // tCO2 per m3 of stem wood
  double carbon_factor_total = 2.0; // tCO2 per m3 incl. roots, branches, soil
  std::string price_level = "2019";
};

void validate(const EconomicConfig& cfg);

/// Multiplies every monetary quantity (prices, costs, bare land value,
/// recurring expense) by `factor`.
EconomicConfig scale_monetary(EconomicConfig cfg, double factor);

enum class LedgerEventKind {
  RegenerationInvestment,
  FertilizationInvestment,
  ThinningRevenue,
  ClearcutRevenue,
  RegenerationWriteOff,
  FertilizationWriteOff,
  ThinningRealizationLoss,
};

std::string_view to_string(LedgerEventKind k);

struct LedgerEvent {
  double time = 0.0;
  LedgerEventKind kind{};
  double amount = 0.0;  // Eur/ha
};

/// One grid node of the ledger. Left values are limits from the preceding
/// segment, right values limits into the following one; they differ where
/// an event happens at the node.
struct LedgerNode {
  double time = 0.0;
  double capital_left = 0.0;
  double capital_right = 0.0;
  double profit_left = 0.0;   // Eur/ha/a
  double profit_right = 0.0;
  double volume_left = 0.0;   // m3/ha
  double volume_right = 0.0;
  double withdrawal = 0.0;    // harvest revenue taken out at this node
  double investment = 0.0;    // cost booked as book value at this node
  double writeoff = 0.0;      // amortization charged to profit at this node
  // clearcut-priced value of a thinning removal less its revenue, charged
  // to profit (negative when thinning prices exceed clearcut prices)
  double realization_loss = 0.0;
};

struct Ledger {
  double rotation = 0.0;
  std::vector<LedgerNode> nodes;
  std::vector<LedgerEvent> events;
};

struct CycleExpectation {
  double tau = 0.0;
  double start = 0.0;                 // cycle start b, fixed at 0
  double expected_profit_rate = 0.0;  // Eur/ha/a
  double expected_capitalization = 0.0;  // Eur/ha
  double expected_return_rate = 0.0;  // 1/a
  double expected_volume = 0.0;       // m3/ha
};

/// Priced value of an assortment volume table.
double stumpage_value(const AssortmentMatrix& volumes, const EconomicConfig& cfg,
                      HarvestType type = HarvestType::Clearcut);

/// Clearcut-priced stock value plus bare land value plus `book_value`.
double stand_value(const StandState& state, const GrowthParams& growth,
                   const EconomicConfig& cfg, double book_value = 0.0);

/// Revenue from removed volumes at the prices of `type`. Throws InputError on
/// negative or non-finite volumes.
double harvest_revenue(const AssortmentMatrix& removed, HarvestType type,
                       const EconomicConfig& cfg);

/// Stand observations at one grid time: before and after the events at
/// that time. Volumes by species and assortment.
struct TrajectoryPoint {
  double time = 0.0;
  StandState before;
  StandState after;
  AssortmentMatrix volume_before = AssortmentMatrix::Zero();
  AssortmentMatrix volume_after = AssortmentMatrix::Zero();
  AssortmentMatrix thinning_removal = AssortmentMatrix::Zero();
  bool thinned = false;
  bool fertilized = false;
};

struct Trajectory {
  double observed_age = 0.0;
  std::vector<TrajectoryPoint> points;  // one per 2.5-year step from observed_age
};

struct Schedule;

/// Ledger of one rotation ending with a clearcut at `schedule.rotation`.
/// The segment before the observed age is a linear ramp of stock value and
/// volume from zero. Throws PreconditionError on events outside
/// [0, rotation] or a rotation not covered by the trajectory.
Ledger build_ledger(const Trajectory& trajectory, const Schedule& schedule,
                    const EconomicConfig& cfg);

double expected_profit_rate(const Ledger& ledger);
double expected_capitalization(const Ledger& ledger);
double expected_volume(const Ledger& ledger);
/// Throws PreconditionError when the expected capitalization is not positive.
double expected_return_rate(const Ledger& ledger);

CycleExpectation cycle_expectation(const Ledger& ledger);

enum class CarbonMode { Stem, Total };

double carbon_equivalent(double volume, const EconomicConfig& cfg, CarbonMode mode);

}  // namespace fertrot
