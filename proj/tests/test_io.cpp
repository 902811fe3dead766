#include "doctest.h"
#include "support.hpp"

#include "fertrot/stand_gen.hpp"

#include <clocale>
#include <fstream>

using namespace fertrot;
using fertrot::test::default_econ;
using fertrot::test::default_growth;

TEST_CASE("stand files round-trip") {
  const StandFile a = fertrot::test::bundled_stand(2);
  const StandFile b = stand_from_json(to_json(a));
  CHECK(b.id == a.id);
  CHECK(b.provenance == a.provenance);
  CHECK(b.state.age == a.state.age);
  CHECK(b.state.site.site_index == a.state.site.site_index);
  CHECK(b.state.stems == a.state.stems);
}

TEST_CASE("configs round-trip") {
  const GrowthParams g = growth_params_from_json(to_json(default_growth()));
  for (Species s : kAllSpecies) {
    CHECK(g[s].increment == default_growth()[s].increment);
    CHECK(g[s].survival == default_growth()[s].survival);
    CHECK(g[s].ingrowth == default_growth()[s].ingrowth);
    CHECK(g[s].volume_exponent == default_growth()[s].volume_exponent);
  }
  CHECK(g.site_index_bump == default_growth().site_index_bump);

  const EconomicConfig c = econ_config_from_json(to_json(default_econ()));
  CHECK(c.prices.clearcut == default_econ().prices.clearcut);
  CHECK(c.prices.thinning == default_econ().prices.thinning);
  CHECK(c.interest_rate == default_econ().interest_rate);
  CHECK(c.bare_land_value == default_econ().bare_land_value);

  OptimizationConfig o;
  o.q_step = 0.1;
  o.exponents = {0, 2};
  o.max_thinnings = 2;
  const OptimizationConfig o2 = optimization_from_json(to_json(o));
  CHECK(o2.q_step == 0.1);
  CHECK(o2.exponents == o.exponents);
  CHECK(o2.max_thinnings == 2);
}

TEST_CASE("schedules round-trip") {
  Schedule s;
  s.rotation = 72.5;
  ThinningSpec t;
  t.time = 40;
  t.intensity(0) = 0.3;
  t.intensity(2) = 0.6;
  t.allocation_exponent = -1;
  s.thinnings.push_back(t);
  t.time = 50;
  StemMatrix f = StemMatrix::Zero();
  f(0, 4) = 0.25;
  t.class_fractions = f;
  s.thinnings.push_back(t);
  s.fertilizations = {42.5};
  CHECK(schedule_from_json(to_json(s)) == s);
}

TEST_CASE("schema errors name the offending field") {
  nlohmann::json j = to_json(fertrot::test::bundled_stand(1));
  j["stems"]["spruce"][3] = "many";
  try {
    stand_from_json(j);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("stand/stems/spruce/3") != std::string::npos);
  }
  j = to_json(fertrot::test::bundled_stand(1));
  j["schema_version"] = 7;
  CHECK_THROWS_AS(stand_from_json(j), InputError);
  j = to_json(fertrot::test::bundled_stand(1));
  j["stems"]["larch"] = j["stems"]["spruce"];
  CHECK_THROWS_AS(stand_from_json(j), InputError);
  j = to_json(fertrot::test::bundled_stand(1));
  j["site"]["soil"] = "peat";
  CHECK_THROWS_AS(stand_from_json(j), InputError);
}

TEST_CASE("malformed JSON reports line and column") {
  const auto path = std::filesystem::temp_directory_path() / "fertrot_malformed.json";
  {
    std::ofstream out(path);
    out << "{\n  \"schema_version\": 1,\n  \"id\": \n}\n";
  }
  try {
    load_stand(path);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_stand("/nonexistent/stand.json"), InputError);
}

TEST_CASE("numbers are formatted independently of the locale") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(2.5) == "2.5");
  CHECK(format_number(1e-20) == "1e-20");
  if (std::setlocale(LC_NUMERIC, "de_DE.UTF-8")) {
    CHECK(format_number(2.5) == "2.5");
    std::setlocale(LC_NUMERIC, "C");
  }
}

TEST_CASE("csv headers") {
  const std::string curve = curve_csv({}, default_econ());
  CHECK(curve.rfind("tau,expected_profit_rate,expected_capitalization,expected_return_rate,expected_volume", 0) == 0);
  const std::string trace = trace_csv({{0, "no thinning", 0.04, 1}});
  CHECK(trace.find("0,\"no thinning\",0.04,1") != std::string::npos);
}

TEST_CASE("generated stands fall inside the observed ranges") {
  const std::vector<StandFile> stands = generate_stands(1, 5);
  REQUIRE(stands.size() == 5);
  for (const StandFile& s : stands) {
    CHECK(s.state.age >= kGenAgeMin);
    CHECK(s.state.age <= kGenAgeMax);
    CHECK(on_step_grid(s.state.age));
    const StandMetrics m = stand_metrics(s.state, default_growth());
    CHECK(m.basal_area >= kGenBasalAreaMin);
    CHECK(m.basal_area <= kGenBasalAreaMax);
    CHECK(m.stems >= kGenStemsMin);
    CHECK(m.stems <= kGenStemsMax);
    StemMatrix spruce = StemMatrix::Zero();
    spruce.row(0) = s.state.stems.row(0);
    CHECK(basal_area(spruce) > 0.5 * m.basal_area);
    CHECK_FALSE(s.provenance.empty());
  }
  const std::vector<StandFile> again = generate_stands(1, 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(to_json(again[i]).dump() == to_json(stands[i]).dump());
  CHECK(to_json(generate_stands(2, 1)[0]).dump() != to_json(stands[0]).dump());
}

TEST_CASE("bundled stands are the seed-1 generator output") {
  const std::vector<StandFile> stands = generate_stands(1, 5);
  for (int i = 0; i < 5; ++i)
    CHECK(to_json(fertrot::test::bundled_stand(i + 1)).dump() == to_json(stands[static_cast<std::size_t>(i)]).dump());
}
