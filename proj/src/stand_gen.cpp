#include "fertrot/stand_gen.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace fertrot {

namespace {

// Uniform draw built from raw engine output so streams are identical
// across standard library implementations.
double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

double round_to(double v, double unit) { return std::round(v / unit) * unit; }

// Normal-shaped class distribution with `total` stems around `mean` cm.
ClassRow bell(double mean, double total) {
  ClassRow w;
  const double sd = 0.35 * mean;
  for (int j = 0; j < kClassCount; ++j) {
    const double z = (class_midpoint(j) - mean) / sd;
    w(j) = std::exp(-0.5 * z * z);
  }
  return w * (total / w.sum());
}

}  // namespace

std::vector<StandFile> generate_stands(unsigned long seed, int count) {
  if (count < 1) throw PreconditionError("stand count must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<StandFile> out;
  for (int i = 0; i < count; ++i) {
    const double age = kGenAgeMin + kStepYears * std::floor(uniform(rng, 0.0, 7.0));
    const double stems = round_to(uniform(rng, kGenStemsMin + 45.0, kGenStemsMax - 45.0), 1.0);
    const double target_ba = round_to(uniform(rng, kGenBasalAreaMin + 2.0, kGenBasalAreaMax - 2.0), 0.1);
    const double site_index = round_to(uniform(rng, 15.0, 19.0), 0.1);
    const double spruce_share = uniform(rng, 0.72, 0.9);
    const double pine_split = uniform(rng, 0.0, 1.0);

    const std::array<double, kSpeciesCount> share{
        spruce_share, (1.0 - spruce_share) * pine_split, (1.0 - spruce_share) * (1.0 - pine_split), 0.0};
    const std::array<double, kSpeciesCount> size_factor{1.0, 1.05, 0.85, 1.0};

    auto build = [&](double mean) {
      StemMatrix m = StemMatrix::Zero();
      for (int s = 0; s < kSpeciesCount; ++s)
        if (share[s] > 0.0) m.row(s) = bell(mean * size_factor[s], stems * share[s]);
      return m;
    };
    // basal area grows with the mean diameter; bisect for the target
    double lo = 4.0;
    double hi = 35.0;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (basal_area(build(mid)) < target_ba ? lo : hi) = mid;
    }
    StemMatrix m = build(0.5 * (lo + hi));
    m = (m.array() * 10.0).round() / 10.0;

    StandFile f;
    std::ostringstream id;
    id << "synthetic-" << seed << '-' << (i + 1);
    f.id = id.str();
    f.state.age = age;
    f.state.stems = m;
    f.state.site.site_index = site_index;
    std::ostringstream prov;
    prov << "synthetic stand generated with seed " << seed << ", index " << (i + 1)
         << "; class distribution drawn to match target stems " << stems << "/ha and basal area "
         << target_ba << " m2/ha";
    f.provenance = prov.str();
    validate(f.state);
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace fertrot
