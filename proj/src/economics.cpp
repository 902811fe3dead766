#include "fertrot/economics.hpp"

#include "fertrot/schedule.hpp"

#include <cmath>
#include <string>

namespace fertrot {

namespace {

double trapezoid(const std::vector<LedgerNode>& nodes, auto right, auto left) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double dt = nodes[i + 1].time - nodes[i].time;
    sum += 0.5 * dt * (right(nodes[i]) + left(nodes[i + 1]));
  }
  return sum;
}

void require_cycle(const Ledger& ledger) {
  if (!(ledger.rotation > 0.0) || ledger.nodes.size() < 2)
    throw PreconditionError("ledger cycle duration must be positive");
}

}  // namespace

std::string_view to_string(LedgerEventKind k) {
  switch (k) {
    case LedgerEventKind::RegenerationInvestment: return "regeneration_investment";
    case LedgerEventKind::FertilizationInvestment: return "fertilization_investment";
    case LedgerEventKind::ThinningRevenue: return "thinning_revenue";
    case LedgerEventKind::ClearcutRevenue: return "clearcut_revenue";
    case LedgerEventKind::RegenerationWriteOff: return "regeneration_writeoff";
    case LedgerEventKind::FertilizationWriteOff: return "fertilization_writeoff";
    case LedgerEventKind::ThinningRealizationLoss: return "thinning_realization_loss";
  }
  return "?";
}

void validate(const EconomicConfig& cfg) {
  for (const AssortmentMatrix* p : {&cfg.prices.thinning, &cfg.prices.clearcut})
    if (!p->allFinite() || (p->array() < 0.0).any())
      throw InputError("prices must be finite and non-negative");
  auto non_negative = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0)
      throw InputError(std::string(name) + " must be finite and non-negative");
  };
  non_negative(cfg.regeneration_cost, "regeneration_cost");
  non_negative(cfg.fertilization_cost, "fertilization_cost");
  non_negative(cfg.bare_land_value, "bare_land_value");
  non_negative(cfg.interest_rate, "interest_rate");
  non_negative(cfg.annual_expense, "annual_expense");
  non_negative(cfg.carbon_factor_stem, "carbon_factor_stem");
  non_negative(cfg.carbon_factor_total, "carbon_factor_total");
  if (cfg.carbon_factor_total < cfg.carbon_factor_stem)
    throw InputError("carbon_factor_total must be >= carbon_factor_stem");
}

EconomicConfig scale_monetary(EconomicConfig cfg, double factor) {
  cfg.prices.thinning *= factor;
  cfg.prices.clearcut *= factor;
  cfg.regeneration_cost *= factor;
  cfg.fertilization_cost *= factor;
  cfg.bare_land_value *= factor;
  cfg.annual_expense *= factor;
  return cfg;
}

double stumpage_value(const AssortmentMatrix& volumes, const EconomicConfig& cfg,
                      HarvestType type) {
  return (volumes.array() * cfg.prices[type].array()).sum();
}

double stand_value(const StandState& state, const GrowthParams& growth,
                   const EconomicConfig& cfg, double book_value) {
  return stumpage_value(assortment_volumes(state.stems, growth), cfg) +
         cfg.bare_land_value + book_value;
}

double harvest_revenue(const AssortmentMatrix& removed, HarvestType type,
                       const EconomicConfig& cfg) {
  if (!removed.allFinite() || (removed.array() < 0.0).any())
    throw InputError("removed volumes must be finite and non-negative");
  return stumpage_value(removed, cfg, type);
}

Ledger build_ledger(const Trajectory& trajectory, const Schedule& schedule,
                    const EconomicConfig& cfg) {
  const double tau = schedule.rotation;
  const double a0 = trajectory.observed_age;
  if (!(tau > a0) || !on_step_grid(tau - a0))
    throw PreconditionError("rotation must be a step end after the observed age");
  if (trajectory.points.empty() || trajectory.points.back().time < tau - 1e-9)
    throw PreconditionError("trajectory does not reach the rotation age");
  for (const ThinningSpec& t : schedule.thinnings)
    if (t.time < a0 - 1e-9 || t.time >= tau - 1e-9)
      throw PreconditionError("thinning at " + std::to_string(t.time) +
                              " lies outside the rotation");
  for (double t : schedule.fertilizations)
    if (t < a0 - 1e-9 || t >= tau - 1e-9)
      throw PreconditionError("fertilization at " + std::to_string(t) +
                              " lies outside the rotation");

  Ledger ledger;
  ledger.rotation = tau;
  const std::size_t juvenile = a0 > 0.0 ? static_cast<std::size_t>(std::lround(a0 / kStepYears)) : 0;
  const std::size_t steps = static_cast<std::size_t>(std::lround((tau - a0) / kStepYears));
  ledger.nodes.resize(juvenile + steps + 1);

  // stock value and volume, without bare land or book values
  std::vector<double> stock_left(ledger.nodes.size());
  std::vector<double> stock_right(ledger.nodes.size());

  const TrajectoryPoint& first = trajectory.points.front();
  const double first_value = stumpage_value(first.volume_before, cfg);
  const double first_volume = first.volume_before.sum();
  for (std::size_t i = 0; i < juvenile; ++i) {
    LedgerNode& n = ledger.nodes[i];
    n.time = kStepYears * static_cast<double>(i);
    const double w = n.time / a0;
    stock_left[i] = stock_right[i] = w * first_value;
    n.volume_left = n.volume_right = w * first_volume;
  }
  for (std::size_t k = 0; k <= steps; ++k) {
    const TrajectoryPoint& p = trajectory.points[k];
    const std::size_t i = juvenile + k;
    LedgerNode& n = ledger.nodes[i];
    n.time = p.time;
    stock_left[i] = stumpage_value(p.volume_before, cfg);
    n.volume_left = p.volume_before.sum();
    if (k == steps) {
      stock_right[i] = 0.0;
      n.volume_right = 0.0;
      n.withdrawal = stock_left[i];
      ledger.events.push_back({n.time, LedgerEventKind::ClearcutRevenue, n.withdrawal});
    } else {
      stock_right[i] = stumpage_value(p.volume_after, cfg);
      n.volume_right = p.volume_after.sum();
      if (p.thinned) {
        n.withdrawal = harvest_revenue(p.thinning_removal, HarvestType::Thinning, cfg);
        ledger.events.push_back({n.time, LedgerEventKind::ThinningRevenue, n.withdrawal});
        n.realization_loss = stumpage_value(p.thinning_removal, cfg) - n.withdrawal;
        ledger.events.push_back({n.time, LedgerEventKind::ThinningRealizationLoss, n.realization_loss});
      }
    }
  }

  // book values: regeneration from establishment to final harvest,
  // fertilization from application to the first later harvest
  const std::size_t last = ledger.nodes.size() - 1;
  std::vector<double> book_delta(ledger.nodes.size(), 0.0);  // change at node, right minus left
  auto& nodes = ledger.nodes;
  nodes[0].investment += cfg.regeneration_cost;
  book_delta[0] += cfg.regeneration_cost;
  ledger.events.push_back({0.0, LedgerEventKind::RegenerationInvestment, cfg.regeneration_cost});
  for (std::size_t k = 0; k < steps; ++k) {
    const TrajectoryPoint& p = trajectory.points[k];
    if (!p.fertilized) continue;
    const std::size_t i = juvenile + k;
    nodes[i].investment += cfg.fertilization_cost;
    book_delta[i] += cfg.fertilization_cost;
    ledger.events.push_back({p.time, LedgerEventKind::FertilizationInvestment, cfg.fertilization_cost});
    std::size_t w = last;
    for (std::size_t m = k + 1; m < steps; ++m)
      if (trajectory.points[m].thinned) {
        w = juvenile + m;
        break;
      }
    nodes[w].writeoff += cfg.fertilization_cost;
    book_delta[w] -= cfg.fertilization_cost;
    ledger.events.push_back({nodes[w].time, LedgerEventKind::FertilizationWriteOff, cfg.fertilization_cost});
  }
  nodes[last].writeoff += cfg.regeneration_cost;
  book_delta[last] -= cfg.regeneration_cost;
  ledger.events.push_back({tau, LedgerEventKind::RegenerationWriteOff, cfg.regeneration_cost});

  double book = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    LedgerNode& n = nodes[i];
    const double book_left = book;
    book += book_delta[i];
    n.capital_left = stock_left[i] + cfg.bare_land_value + book_left;
    n.capital_right = stock_right[i] + cfg.bare_land_value + book;
  }
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double growth = (stock_left[i + 1] - stock_right[i]) / (nodes[i + 1].time - nodes[i].time);
    nodes[i].profit_right = growth - cfg.interest_rate * nodes[i].capital_right - cfg.annual_expense;
    nodes[i + 1].profit_left = growth - cfg.interest_rate * nodes[i + 1].capital_left - cfg.annual_expense;
  }
  return ledger;
}

double expected_profit_rate(const Ledger& ledger) {
  require_cycle(ledger);
  double sum = trapezoid(
      ledger.nodes, [](const LedgerNode& n) { return n.profit_right; },
      [](const LedgerNode& n) { return n.profit_left; });
  for (const LedgerNode& n : ledger.nodes) sum -= n.writeoff + n.realization_loss;
  return sum / ledger.rotation;
}

double expected_capitalization(const Ledger& ledger) {
  require_cycle(ledger);
  return trapezoid(
             ledger.nodes, [](const LedgerNode& n) { return n.capital_right; },
             [](const LedgerNode& n) { return n.capital_left; }) /
         ledger.rotation;
}

double expected_volume(const Ledger& ledger) {
  require_cycle(ledger);
  return trapezoid(
             ledger.nodes, [](const LedgerNode& n) { return n.volume_right; },
             [](const LedgerNode& n) { return n.volume_left; }) /
         ledger.rotation;
}

double expected_return_rate(const Ledger& ledger) {
  const double k = expected_capitalization(ledger);
  if (!(k > 0.0)) throw PreconditionError("expected capitalization must be positive");
  return expected_profit_rate(ledger) / k;
}

CycleExpectation cycle_expectation(const Ledger& ledger) {
  CycleExpectation e;
  e.tau = ledger.rotation;
  e.expected_profit_rate = expected_profit_rate(ledger);
  e.expected_capitalization = expected_capitalization(ledger);
  if (!(e.expected_capitalization > 0.0))
    throw PreconditionError("expected capitalization must be positive");
  e.expected_return_rate = e.expected_profit_rate / e.expected_capitalization;
  e.expected_volume = expected_volume(ledger);
  return e;
}

double carbon_equivalent(double volume, const EconomicConfig& cfg, CarbonMode mode) {
  return volume * (mode == CarbonMode::Stem ? cfg.carbon_factor_stem : cfg.carbon_factor_total);
}

}  // namespace fertrot
