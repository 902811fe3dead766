#include "doctest.h"
#include "support.hpp"

#include "fertrot/growth.hpp"

#include <numbers>

using namespace fertrot;
using fertrot::test::default_growth;

namespace {

StandState stand(double si, double fert = 0.0) {
  StandState st;
  st.age = 30.0;
  st.site.site_index = si;
  st.fert_remaining = fert;
  return st;
}

}  // namespace

TEST_CASE("effective site index follows the fertilization clock") {
  CHECK(effective_site_index(stand(26, 10)) == 31.0);
  CHECK(effective_site_index(stand(26, 0)) == 26.0);
  CHECK(effective_site_index(stand(26, 2.5)) == 31.0);
  CHECK(effective_site_index(stand(26, 10), 0.0) == 26.0);
}

TEST_CASE("transition splits survivors between staying and moving up") {
  ClassVector s = ClassVector::Constant(0.95);
  ClassVector u = ClassVector::Constant(0.3);
  ClassVector n = ClassVector::Zero();
  n(3) = 1000.0;
  const ClassVector next = transition_matrix(s, u) * n;
  CHECK(next(3) == doctest::Approx(665.0).epsilon(1e-12));
  CHECK(next(4) == doctest::Approx(285.0).epsilon(1e-12));
  CHECK(next.sum() == doctest::Approx(950.0).epsilon(1e-12));
}

TEST_CASE("transition clamps upgrowth and keeps the top class") {
  ClassVector s = ClassVector::Ones();
  ClassVector u = ClassVector::Constant(1.7);
  const TransitionMatrix a = transition_matrix(s, u);
  CHECK(a(0, 0) == 0.0);
  CHECK(a(1, 0) == 1.0);
  CHECK(a(kClassCount - 1, kClassCount - 1) == 1.0);
  u = ClassVector::Constant(-0.5);
  CHECK(transition_matrix(s, u).isIdentity());
}

TEST_CASE("empty stand stays empty") {
  GrowthParams g = default_growth();
  for (SpeciesGrowth& s : g.species) s.ingrowth = {0, 0, 0};
  const StandState next = advance_step(stand(20), g);
  CHECK(next.stems.isZero());
  CHECK(next.age == 32.5);
}

TEST_CASE("identity transition leaves the distribution unchanged") {
  const GrowthParams g = fertrot::test::frozen_growth();
  StandState st = stand(20);
  st.stems(0, 2) = 300;
  st.stems(1, 5) = 40;
  const StandState next = advance_step(st, g);
  CHECK(next.stems == st.stems);
  CHECK(next.age == 32.5);
}

TEST_CASE("absent species get no ingrowth") {
  StandState st = stand(20);
  st.stems(index(Species::Spruce), 3) = 500;
  const StandState next = advance_step(st, default_growth());
  CHECK(next.stems.row(index(Species::Pine)).isZero());
  CHECK(next.stems.row(index(Species::Birch)).isZero());
  CHECK(next.stems(index(Species::Spruce), 0) > 0.0);
}

TEST_CASE("fertilization clock") {
  StandState st = stand(20);
  st.stems(0, 3) = 500;
  st = apply_fertilization(st);
  CHECK(st.fert_remaining == 10.0);
  CHECK_THROWS_AS(apply_fertilization(st), PreconditionError);
  for (int i = 0; i < 4; ++i) st = advance_step(st, default_growth());
  CHECK(st.fert_remaining == 0.0);
  CHECK_NOTHROW(apply_fertilization(st));
}

TEST_CASE("basal area and metrics") {
  StemMatrix m = StemMatrix::Zero();
  m(0, 3) = 1000;  // 20 cm
  CHECK(basal_area(m) == doctest::Approx(1000 * std::numbers::pi * 0.01).epsilon(1e-12));
  CHECK(basal_area(m) == doctest::Approx(31.42).epsilon(1e-3));

  StandState empty = stand(20);
  const StandMetrics e = stand_metrics(empty, default_growth());
  CHECK(e.basal_area == 0.0);
  CHECK(e.stems == 0.0);
  CHECK(e.total_volume() == 0.0);

  StandState a = stand(20), b = stand(20), ab = stand(20);
  a.stems(0, 3) = 400;
  b.stems(2, 7) = 90;
  ab.stems = a.stems + b.stems;
  const StandMetrics ma = stand_metrics(a, default_growth());
  const StandMetrics mb = stand_metrics(b, default_growth());
  const StandMetrics mab = stand_metrics(ab, default_growth());
  CHECK(mab.basal_area == doctest::Approx(ma.basal_area + mb.basal_area).epsilon(1e-12));
  CHECK(mab.stems == ma.stems + mb.stems);
  CHECK(mab.total_volume() == doctest::Approx(ma.total_volume() + mb.total_volume()).epsilon(1e-12));
}

TEST_CASE("sawlog share ramps between the thresholds") {
  const SpeciesGrowth& g = default_growth()[Species::Spruce];
  CHECK(sawlog_share(g, 10) == 0.0);
  CHECK(sawlog_share(g, g.sawlog_start_cm) == 0.0);
  CHECK(sawlog_share(g, 60) == g.sawlog_max_share);
  const double mid = 0.5 * (g.sawlog_start_cm + g.sawlog_full_cm);
  CHECK(sawlog_share(g, mid) == doctest::Approx(0.5 * g.sawlog_max_share));
}

TEST_CASE("volume table matches direct evaluation") {
  const GrowthParams& g = default_growth();
  StemMatrix m = StemMatrix::Zero();
  m(1, 6) = 1;
  const AssortmentMatrix v = assortment_volumes(m, g);
  const SpeciesGrowth& pine = g[Species::Pine];
  const double total = pine.volume_scale * std::pow(35.0, pine.volume_exponent);
  CHECK(v(1, 0) == doctest::Approx(total * sawlog_share(pine, 35.0)).epsilon(1e-12));
  CHECK(v.sum() == doctest::Approx(total).epsilon(1e-12));
}

TEST_CASE("validation rejects bad states and parameters") {
  StandState st = stand(45);
  CHECK_THROWS_AS(validate(st), PreconditionError);
  st = stand(20, 12);
  CHECK_THROWS_AS(validate(st), PreconditionError);
  st = stand(20);
  st.stems(0, 0) = -1;
  CHECK_THROWS_AS(validate(st), PreconditionError);

  GrowthParams g = default_growth();
  CHECK_NOTHROW(validate(g));
  g[Species::Birch].increment[4] = -0.01;
  CHECK_THROWS_AS(validate(g), InputError);
  g = default_growth();
  g[Species::Pine].survival[1] = std::nan("");
  CHECK_THROWS_AS(validate(g), InputError);
}
