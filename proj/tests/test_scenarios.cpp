#include "doctest.h"
#include "support.hpp"

#include "fertrot/scenarios.hpp"

using namespace fertrot;
using fertrot::test::default_econ;
using fertrot::test::default_growth;

namespace {

OptimizationConfig quick_opt() {
  OptimizationConfig opt;
  opt.q_step = 0.1;
  opt.exponents = {0, 1, 2};
  return opt;
}

CycleExpectation point(double tau, double r, double k, double v) {
  CycleExpectation e;
  e.tau = tau;
  e.expected_return_rate = r;
  e.expected_capitalization = k;
  e.expected_volume = v;
  return e;
}

void check_zero(const PairedDelta& d) {
  CHECK(d.delta_r == 0.0);
  CHECK(d.delta_v == 0.0);
  CHECK(d.delta_k == 0.0);
  CHECK(d.extension_expense == 0.0);
  CHECK(d.carbon_total == 0.0);
}

}  // namespace

TEST_CASE("rotation extension expense") {
  CHECK(rotation_extension_expense(-0.001, 100, 10000) == 1000.0);
  CHECK(rotation_extension_expense(0.0, 100, 10000) == 0.0);
  CHECK(rotation_extension_expense(0.002, 50, 10000) == -1000.0);
}

TEST_CASE("stock expense rates") {
  CHECK(stock_expense_rate(1000, 25, 100) == 0.4);
  CHECK(stock_expense_rate(-1000, 25, 100) < 0.0);
  CHECK_THROWS_AS(stock_expense_rate(1000, 0, 100), PreconditionError);
  CHECK_THROWS_AS(stock_expense_rate(1000, 25, 0), PreconditionError);
  CHECK(extension_only_rate(0.4, 100, 10) == 4.0);
  CHECK(extension_only_rate(0.4, 100, 100) == 0.4);
  CHECK_THROWS_AS(extension_only_rate(0.4, 100, 0), PreconditionError);
}

TEST_CASE("paired delta") {
  const PairedDelta d =
      paired_delta("x", point(90, 0.031, 9000, 150), point(100, 0.030, 10000, 175), default_econ());
  CHECK(d.delta_tau == 10.0);
  CHECK(d.delta_v == 25.0);
  CHECK(d.delta_v_pct == doctest::Approx(100.0 * 25 / 150));
  CHECK(d.extension_expense == doctest::Approx(1000.0).epsilon(1e-9));
  REQUIRE(d.stock_expense_rate);
  CHECK(*d.stock_expense_rate == doctest::Approx(0.4).epsilon(1e-9));
  REQUIRE(d.extension_only_rate);
  CHECK(*d.extension_only_rate == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(d.carbon_stem == 25.0);
  CHECK(d.carbon_total == 50.0);

  const PairedDelta same = paired_delta("y", point(90, 0.03, 9000, 150), point(90, 0.03, 9000, 150), default_econ());
  CHECK_FALSE(same.stock_expense_rate);
  CHECK_FALSE(same.extension_only_rate);
}

TEST_CASE("scenario kinds round-trip through their names") {
  for (ScenarioKind k : kAllScenarioKinds) CHECK(scenario_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(scenario_kind_from_string("Sometime"), InputError);
}

TEST_CASE("null fertilization changes nothing") {
  GrowthParams g = default_growth();
  g.site_index_bump = 0;
  EconomicConfig c = default_econ();
  c.fertilization_cost = 0;
  const StandState st = fertrot::test::bundled_stand(3).state;
  const OptimizationConfig opt = quick_opt();
  const Baseline base = run_baseline(st, g, c, opt);
  for (ScenarioKind k : kAllScenarioKinds) {
    CAPTURE(to_string(k));
    ScenarioResult r;
    try {
      r = run_scenario(k, st, g, c, opt, base);
    } catch (const PreconditionError&) {
      continue;
    }
    if (k == ScenarioKind::AtMaturityExtendTen) {
      REQUIRE(r.fertilized_vs_extended);
      check_zero(*r.fertilized_vs_extended);
      for (const CycleExpectation& e : r.fertilized_curve) {
        const auto b = at_rotation(r.baseline_curve, e.tau);
        REQUIRE(b);
        CHECK(b->expected_return_rate == e.expected_return_rate);
        CHECK(b->expected_volume == e.expected_volume);
      }
    } else {
      CHECK(r.tau_fertilized == r.tau_baseline);
      check_zero(r.at_optima);
    }
  }
}

TEST_CASE("scenarios need a spruce-dominated stand") {
  StandState st = fertrot::test::bundled_stand(1).state;
  st.stems.row(index(Species::Birch)) = 3.0 * st.stems.row(index(Species::Spruce));
  CHECK_THROWS_AS(run_scenario(ScenarioKind::TenYearsBeforeMaturity, st, default_growth(),
                               default_econ(), quick_opt()),
                  PreconditionError);
}

TEST_CASE("thinning-anchored kinds need enough baseline thinnings") {
  const StandState st = fertrot::test::bundled_stand(1).state;
  EconomicConfig c = default_econ();
  c.prices.thinning.setZero();
  const Baseline base = run_baseline(st, default_growth(), c, quick_opt());
  REQUIRE(base.search.schedule.thinnings.empty());
  CHECK_THROWS_AS(run_scenario(ScenarioKind::AfterFirstThinning, st, default_growth(), c,
                               quick_opt(), base),
                  PreconditionError);
  const ScenarioResult r = run_scenario(ScenarioKind::AtMaturityExtendTen, st, default_growth(),
                                        c, quick_opt(), base);
  REQUIRE(r.fertilized_schedule.fertilizations.size() == 1);
  CHECK(r.fertilized_schedule.fertilizations[0] == r.tau_baseline);
  if (base.tau - 10 < st.age)
    CHECK_THROWS_AS(run_scenario(ScenarioKind::TenYearsBeforeMaturity, st, default_growth(), c,
                                 quick_opt(), base),
                    PreconditionError);
}

TEST_CASE("extension scenario extends by ten years") {
  const StandState st = fertrot::test::bundled_stand(5).state;
  const ScenarioResult r =
      run_scenario(ScenarioKind::AtMaturityExtendTen, st, default_growth(), default_econ(), quick_opt());
  CHECK(r.tau_fertilized == r.tau_baseline + 10);
  CHECK(r.at_optima.delta_tau == 10.0);
  REQUIRE(r.extension_unfertilized);
  CHECK(r.extension_unfertilized->delta_tau == 10.0);
  CHECK(r.extension_unfertilized->extension_expense > 0.0);
  CHECK(r.fertilized_schedule.fertilizations.back() == r.tau_baseline);
}
